//==============================================================================
// evolution.hpp
//
// Interface evolution h_t + L h = N_phi1 + N_phi2 + N_h on the cutoff-N
// Galerkin system.
//
//   - L(k) = (1/eps) tanh(sqrt(delta) k)(nu alpha k^3 - eps k), integrated exactly.
//   - Second-order exponential Runge-Kutta (ETD-RK2) for the nonlinear part.
//   - Ledger of Wiener norms, energy integral and analyticity radius.
//==============================================================================
#pragma once

#include <functional>
#include <optional>
#include <string>

#include "muskat/analysis.hpp"
#include "muskat/params.hpp"
#include "muskat/potentials.hpp"

namespace muskat::evolution {

using potentials::PoissonSolution;
using spectral::Spectrum;

double linear_symbol(int k, const DimensionlessParams& p);

struct SimState {
    double t = 0.0;
    long step = 0;
    Spectrum h;
    std::optional<PoissonSolution> warm;  // last phi2 solve
};

struct RhsTerms {
    Spectrum n_phi1, n_phi2, n_h;
    int phi2_iterations = 0;
};

// The three nonlinear terms, without mean removal.
RhsTerms nonlinear_terms(const Spectrum& h, const DimensionlessParams& p, const PoissonSolution* warm = nullptr,
                         PoissonSolution* phi2_out = nullptr);

struct RhsInfo {
    int phi2_iterations = 0;
    double mean = 0.0;  // removed mean of the full right-hand side
};

// Sum of the nonlinear terms with the mean removed.
Spectrum nonlinear_rhs(const SimState& s, const DimensionlessParams& p, RhsInfo* info = nullptr,
                       PoissonSolution* phi2_out = nullptr);

// h_t computed without the linear/nonlinear split, straight from
// -sqrt(delta)(A_1^k d_k phi) d1 h + (1/alpha) A_2^2 d2 phi at x2 = 0.
Spectrum full_rhs_direct(const Spectrum& h, const DimensionlessParams& p);

struct StepInfo {
    int phi2_iterations = 0;
    double rhs_mean = 0.0;
};

SimState step(const SimState& s, const DimensionlessParams& p, StepInfo* info = nullptr);

struct RunControl {
    long output_every = 1;  // ledger cadence in steps
    // called after each recorded row; returning false stops the run
    std::function<bool(const SimState&, const analysis::LedgerRow&)> on_row;
};

struct RunResult {
    analysis::EnergyLedger ledger;
    SimState final_state;
    std::string status = "ok";  // ok, pinch-off, blowup, solver-failure
    std::string message;
};

// Continues from `start` (t, step, accumulated energy integral in `integral4`).
RunResult run(const SimState& start, const DimensionlessParams& p, const RunControl& ctl = {},
              double integral4 = 0.0);
RunResult run(const Spectrum& h0, const DimensionlessParams& p, const RunControl& ctl = {});

}  // namespace muskat::evolution
