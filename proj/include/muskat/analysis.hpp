//==============================================================================
// analysis.hpp
//
// Monitors and verification tools.
//
//   - EnergyLedger with the weighted norms |h|_{s, mu t} and the energy E(t).
//   - Smallness thresholds, energy/decay verification, decay-rate fitting.
//   - Fourier-tail analyticity radius.
//   - Counter-based RNG and random admissible data for the inequality lab.
//==============================================================================
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "muskat/params.hpp"
#include "muskat/spectral.hpp"

namespace muskat::analysis {

using evolution::DimensionlessParams;
using spectral::Spectrum;

struct LedgerRow {
    double t = 0.0;
    long step = 0;
    double norm0 = 0.0;      // |h|_{0, mu t}
    double norm1 = 0.0;      // |h|_1
    double norm1_mu = 0.0;   // |h|_{1, mu t}
    double norm4_mu = 0.0;   // |h|_{4, mu t}
    double integral4 = 0.0;  // int_0^t |h|_{4, mu s} ds, trapezoid over steps
    double energy = 0.0;     // |h|_{1, mu t} + c int_0^t |h|_{4, mu s} ds
    double radius = 0.0;
    bool band_limited = false;
    int phi2_iterations = 0;
    double rhs_mean = 0.0;
    double sup_h = 0.0;
    double diffeo_margin = 0.0;
};

class EnergyLedger {
public:
    EnergyLedger() = default;
    EnergyLedger(double mu, double energy_coeff) : mu_(mu), coeff_(energy_coeff) {}

    // Enforces t strictly increasing and a nondecreasing integral.
    void append(const LedgerRow& r);
    const std::vector<LedgerRow>& rows() const { return rows_; }
    bool empty() const { return rows_.empty(); }
    double mu() const { return mu_; }
    double energy_coeff() const { return coeff_; }

    void write_csv(std::ostream& os, uint64_t seed = 0) const;

private:
    double mu_ = 0.0;
    double coeff_ = 0.0;
    std::vector<LedgerRow> rows_;
};

LedgerRow measure(const Spectrum& h, double t, const DimensionlessParams& p);

struct RadiusFit {
    double radius = 0.0;
    bool band_limited = false;
    int n_lo = 0, n_hi = 0;
    int active = 0;
};
// Slope of -log|h(n)| over the upper half of the resolved tail. Modes below
// max(floor, rel_floor * max|h(n)|) count as unresolved.
RadiusFit analyticity_radius(const Spectrum& h, double floor = 1e-30, double rel_floor = 1e-13);

struct Condition {
    std::string name;
    double actual = 0.0;
    double threshold = 0.0;
    bool pass = false;
};
struct SmallnessReport {
    std::vector<Condition> conditions;
    bool all_pass() const;
    const Condition& get(const std::string& name) const;
};
constexpr double kC0 = 3120.0;
// min{1/(C0 eps), 1} (nu sqrt(delta) - 1)/nu
double theorem_threshold(const DimensionlessParams& p);
// largest admissible c0: min{1/(2 sqrt(delta)), (nu sqrt(delta) - 1)/(C0 nu sqrt(delta))}
double c0_choice(const DimensionlessParams& p);
// conditions "theorem", "c0_form" (|h|_1 < c0 sqrt(delta)/(260 eps)) and "diffeo" (eps |h|_1 < 1/2)
SmallnessReport smallness_check(const Spectrum& h0, const DimensionlessParams& p);

struct EnergyReport {
    bool energy_bounded = true;     // E(t) <= |h0|_1
    bool envelope_ok = true;        // |h(t)|_{1,mu t} <= |h0|_1 e^{-rate t}
    bool energy_monotone = true;    // E nonincreasing up to tol
    bool no_pinch_off = true;       // eps sup|h| < 1
    double worst_energy_margin = 0.0;
    double worst_envelope_margin = 0.0;
    double worst_monotone_increase = 0.0;
    double max_eps_sup = 0.0;
    bool ok() const { return energy_bounded && envelope_ok && energy_monotone && no_pinch_off; }
};
EnergyReport verify_energy(const EnergyLedger& ledger, double h0_norm, const DimensionlessParams& p,
                           double tol = 1e-6);  // absolute slack on all three checks

// Least-squares slope of -log|h|_1 over rows with t >= t_from.
double decay_rate_fit(const EnergyLedger& ledger, double t_from = 0.0);

// Simpson recomputation of int |h|_{4,mu t} on the stored samples (uniform spacing required).
double simpson_integral4(const EnergyLedger& ledger);

// SplitMix64 in counter mode: value i is mix(seed + (i+1) * golden).
class CounterRng {
public:
    explicit CounterRng(uint64_t seed) : seed_(seed) {}
    uint64_t next_u64();
    double uniform();                    // [0, 1)
    double uniform(double a, double b);  // [a, b)
    uint64_t seed() const { return seed_; }
    uint64_t counter() const { return counter_; }

private:
    uint64_t seed_;
    uint64_t counter_ = 0;
};

// h(n) = r_n e^{i theta_n} e^{-rho n}/(1+n)^4, rescaled to |h|_1 = target.
Spectrum random_interface(CounterRng& rng, int N, double target_norm1);
// |h(n)| proportional to (1+n)^{-4} with random phases, |h|_1 = target.
Spectrum rough_interface(CounterRng& rng, int N, double target_norm1);

}  // namespace muskat::analysis
