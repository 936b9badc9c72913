/**
 * @file analysis.cpp
 * @brief Energy ledger, smallness checks, radius fit and random data.
 */
#include "muskat/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "muskat/errors.hpp"
#include "muskat/geometry.hpp"

namespace muskat::analysis {

void EnergyLedger::append(const LedgerRow& r) {
    if (!rows_.empty()) {
        const auto& last = rows_.back();
        if (!(r.t > last.t)) throw std::logic_error("ledger: time must increase strictly");
        if (r.integral4 < last.integral4) throw std::logic_error("ledger: energy integral decreased");
    }
    rows_.push_back(r);
}

void EnergyLedger::write_csv(std::ostream& os, uint64_t seed) const {
    os << "# seed=" << seed << " mu=" << mu_ << " energy_coeff=" << coeff_ << "\n";
    os << "t,step,norm0_mu,norm1,norm1_mu,norm4_mu,integral4,energy,radius,band_limited,"
          "phi2_iterations,rhs_mean,sup_h,diffeo_margin\n";
    const auto old = os.precision(17);
    for (const auto& r : rows_) {
        os << r.t << ',' << r.step << ',' << r.norm0 << ',' << r.norm1 << ',' << r.norm1_mu << ',' << r.norm4_mu
           << ',' << r.integral4 << ',' << r.energy << ',' << r.radius << ',' << (r.band_limited ? 1 : 0) << ','
           << r.phi2_iterations << ',' << r.rhs_mean << ',' << r.sup_h << ',' << r.diffeo_margin << '\n';
    }
    os.precision(old);
}

LedgerRow measure(const Spectrum& h, double t, const DimensionlessParams& p) {
    LedgerRow r;
    r.t = t;
    const double lam = p.mu * t;
    r.norm0 = spectral::wiener_norm(h, 0.0, lam);
    r.norm1 = spectral::wiener_norm(h, 1.0);
    r.norm1_mu = spectral::wiener_norm(h, 1.0, lam);
    r.norm4_mu = spectral::wiener_norm(h, 4.0, lam);
    const RadiusFit f = analyticity_radius(h);
    r.radius = f.radius;
    r.band_limited = f.band_limited;
    r.sup_h = spectral::sup_abs(h);
    r.diffeo_margin = geometry::diffeo_check(h, p.eps).margin;
    return r;
}

namespace {

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    double mx = 0, my = 0;
    for (size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxx > 0 ? sxy / sxx : 0.0;
}

}  // namespace

RadiusFit analyticity_radius(const Spectrum& h, double floor, double rel_floor) {
    RadiusFit out;
    const int N = h.cutoff();
    double amax = 0.0;
    for (int n = 1; n <= N; ++n) amax = std::max(amax, std::abs(h[n]));
    const double fl = std::max(floor, rel_floor * amax);
    int n_act = 0;
    for (int n = 1; n <= N; ++n)
        if (std::abs(h[n]) > fl) n_act = n;
    out.active = n_act;
    if (n_act == 0) return out;

    std::vector<double> x, y;
    if (n_act == N && N >= 8) {
        out.n_lo = N / 2;
        out.n_hi = N;
        for (int n = out.n_lo; n <= N; ++n)
            if (std::abs(h[n]) > fl) {
                x.push_back(n);
                y.push_back(-std::log(std::abs(h[n])));
            }
    } else {
        // resolved spectrum ends inside the band: the floor bounds the decay from below
        out.band_limited = true;
        out.n_lo = std::max(1, n_act / 2);
        out.n_hi = n_act + 1;
        for (int n = out.n_lo; n <= n_act; ++n)
            if (std::abs(h[n]) > fl) {
                x.push_back(n);
                y.push_back(-std::log(std::abs(h[n])));
            }
        x.push_back(n_act + 1);
        y.push_back(-std::log(fl));
    }
    if (x.size() < 2) return out;
    out.radius = std::max(0.0, ls_slope(x, y));
    return out;
}

bool SmallnessReport::all_pass() const {
    return std::all_of(conditions.begin(), conditions.end(), [](const Condition& c) { return c.pass; });
}

const Condition& SmallnessReport::get(const std::string& name) const {
    for (const auto& c : conditions)
        if (c.name == name) return c;
    throw std::out_of_range("no condition named " + name);
}

double theorem_threshold(const DimensionlessParams& p) {
    const double sd = p.sqrt_delta();
    return std::min(1.0 / (kC0 * p.eps), 1.0) * (p.nu * sd - 1.0) / p.nu;
}

double c0_choice(const DimensionlessParams& p) {
    const double sd = p.sqrt_delta();
    return std::min(1.0 / (2.0 * sd), (p.nu * sd - 1.0) / (kC0 * p.nu * sd));
}

SmallnessReport smallness_check(const Spectrum& h0, const DimensionlessParams& p) {
    SmallnessReport r;
    const double n1 = spectral::wiener_norm(h0, 1.0);
    const double thr = theorem_threshold(p);
    r.conditions.push_back({"theorem", n1, thr, n1 < thr});
    const double lim = c0_choice(p) * p.sqrt_delta() / (260.0 * p.eps);
    r.conditions.push_back({"c0_form", n1, lim, n1 < lim || n1 == 0.0});
    r.conditions.push_back({"diffeo", p.eps * n1, 0.5, p.eps * n1 < 0.5});
    return r;
}

EnergyReport verify_energy(const EnergyLedger& ledger, double h0_norm, const DimensionlessParams& p, double tol) {
    EnergyReport rep;
    const double rate = p.decay_rate();
    double prev = 0.0;
    bool first = true;
    for (const auto& r : ledger.rows()) {
        const double m1 = r.energy - h0_norm;
        rep.worst_energy_margin = std::max(rep.worst_energy_margin, m1);
        if (m1 > tol) rep.energy_bounded = false;
        const double env = h0_norm * std::exp(-rate * r.t);
        const double m2 = r.norm1_mu - env;
        rep.worst_envelope_margin = std::max(rep.worst_envelope_margin, m2);
        if (m2 > tol) rep.envelope_ok = false;
        if (!first) {
            const double inc = r.energy - prev;
            rep.worst_monotone_increase = std::max(rep.worst_monotone_increase, inc);
            if (inc > tol) rep.energy_monotone = false;
        }
        prev = r.energy;
        first = false;
        rep.max_eps_sup = std::max(rep.max_eps_sup, p.eps * r.sup_h);
        if (p.eps * r.sup_h >= 1.0) rep.no_pinch_off = false;
    }
    return rep;
}

double decay_rate_fit(const EnergyLedger& ledger, double t_from) {
    std::vector<double> x, y;
    for (const auto& r : ledger.rows())
        if (r.t >= t_from && r.norm1 > 0.0) {
            x.push_back(r.t);
            y.push_back(-std::log(r.norm1));
        }
    if (x.size() < 2) throw std::invalid_argument("decay_rate_fit: fewer than two samples");
    return ls_slope(x, y);
}

double simpson_integral4(const EnergyLedger& ledger) {
    const auto& rows = ledger.rows();
    const size_t n = rows.size();
    if (n < 2) return 0.0;
    const double hstep = rows[1].t - rows[0].t;
    for (size_t i = 1; i < n; ++i)
        if (std::abs(rows[i].t - rows[i - 1].t - hstep) > 1e-9 * std::max(1.0, rows[i].t))
            throw std::invalid_argument("simpson_integral4: non-uniform sampling");
    const size_t m = n - 1;
    double s = 0.0;
    const size_t even_end = (m % 2 == 0) ? m : m - 1;
    for (size_t i = 0; i + 2 <= even_end; i += 2)
        s += hstep / 3.0 * (rows[i].norm4_mu + 4.0 * rows[i + 1].norm4_mu + rows[i + 2].norm4_mu);
    if (even_end < m) s += 0.5 * hstep * (rows[m - 1].norm4_mu + rows[m].norm4_mu);
    return s;
}

uint64_t CounterRng::next_u64() {
    uint64_t z = seed_ + (++counter_) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double CounterRng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double CounterRng::uniform(double a, double b) { return a + (b - a) * uniform(); }

namespace {

Spectrum rescale_norm1(Spectrum h, double target) {
    const double n1 = spectral::wiener_norm(h, 1.0);
    if (n1 > 0.0) h *= target / n1;
    return h;
}

}  // namespace

Spectrum random_interface(CounterRng& rng, int N, double target_norm1) {
    Spectrum h(N);
    const double rho = rng.uniform(0.05, 1.0);
    for (int n = 1; n <= N; ++n) {
        const double r = rng.uniform();
        const double th = rng.uniform(0.0, 2.0 * std::numbers::pi);
        h[n] = std::polar(r * std::exp(-rho * n) / std::pow(1.0 + n, 4), th);
    }
    return rescale_norm1(std::move(h), target_norm1);
}

Spectrum rough_interface(CounterRng& rng, int N, double target_norm1) {
    Spectrum h(N);
    for (int n = 1; n <= N; ++n) {
        const double th = rng.uniform(0.0, 2.0 * std::numbers::pi);
        h[n] = std::polar(std::pow(1.0 + n, -4.0), th);
    }
    return rescale_norm1(std::move(h), target_norm1);
}

}  // namespace muskat::analysis
