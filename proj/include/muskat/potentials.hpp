//==============================================================================
// potentials.hpp
//
// Velocity potentials on the flattened strip.
//
//   - phi1: closed-form harmonic (for Delta_delta) extension of the capillary
//     pressure psi = nu alpha K_alpha + eps h.
//   - Green-kernel solver for Delta_delta phi = div_delta g with phi = 0 on top
//     and d2 phi = 0 on the bottom, one O(M) sweep per mode.
//   - phi2: fixed point of the perturbation problem with the symmetric matrix Q.
//   - Finite-difference oracle for phi2 built on the non-divergence form.
//==============================================================================
#pragma once

#include <array>
#include <vector>

#include "muskat/geometry.hpp"
#include "muskat/params.hpp"

namespace muskat::potentials {

using evolution::DimensionlessParams;
using geometry::StripField;
using spectral::cplx;
using spectral::Spectrum;

struct PoissonSolution {
    StripField grad1;   // sqrt(delta) d1 phi
    StripField grad2;   // d2 phi
    Spectrum trace_d2;  // d2 phi at x2 = 0
    double residual = 0.0;
    int iterations = 0;
    double contraction = 0.0;

    double norm(double s, double lambda = 0.0) const {
        return grad1.norm(s, 1, lambda) + grad2.norm(s, 1, lambda);
    }
};

// psi = nu alpha K_alpha(h) + eps h
Spectrum capillary_pressure(const Spectrum& h, const DimensionlessParams& p);
// d2^j phi1 as value, d2^{j+1} phi1 as dz
StripField phi1_field(const Spectrum& h, const DimensionlessParams& p, int j = 0);
// (sqrt(delta) d1 phi1, d2 phi1)
std::array<StripField, 2> grad_delta_phi1(const Spectrum& h, const DimensionlessParams& p);
// traces at x2 = 0: d1 phi1 and d2 phi1 = sqrt(delta) tanh(sqrt(delta) Lambda) Lambda psi
std::array<Spectrum, 2> phi1_traces(const Spectrum& h, const DimensionlessParams& p);

// Green kernels in stable form. which = 1 (y <= x) or 2 (y >= x); j, l count d/dx2 and d/dy2.
double pi_kernel(int which, double kappa, double y, double x, int j, int l);
// Same kernels through cosh/sinh products (moderate kappa only).
double pi_kernel_direct(int which, double kappa, double y, double x, int j, int l);

struct KernelTable {
    double kappa = 0.0;
    std::vector<double> nodes;
    // values[(which-1)][j][l][iy * nodes + ix]
    std::array<std::array<std::array<std::vector<double>, 3>, 3>, 2> values;
    double at(int which, int j, int l, int iy, int ix) const {
        return values[which - 1][j][l][static_cast<size_t>(iy) * nodes.size() + ix];
    }
};
KernelTable kernel_table(double kappa, int intervals);

struct KernelBoundRow {
    int j = 0, l = 0;
    double pi1 = 0.0, pi2 = 0.0;          // max_y int |d Pi| dx2
    double bound1 = 0.0, bound2 = 0.0;    // 2 kappa^{j+l-1}, (5/2) kappa^{j+l-1}
    double ratio1 = 0.0, ratio2 = 0.0;
    double sup_first1 = 0.0, sup_first2 = 0.0;  // int max_y |d Pi| dx2, reported only
};
// with_sup_first = false skips the reported-only sup_first columns.
std::vector<KernelBoundRow> kernel_integral_bounds(double kappa, bool with_sup_first = true);

// Exact exponential-weight integrals of a cubic Hermite interpolant on one cell:
// int_0^h e^{-kappa (h-t)} p(t) dt = w[0] f0 + w[1] f0' + w[2] f1 + w[3] f1'.
std::array<double, 4> hermite_exp_weights(double kappa, double h);

PoissonSolution solve_poisson_green(const StripField& g1, const StripField& g2, double delta);

// Iterates phi2 <- Green(-eps Q grad_delta(phi1 + phi2)).
PoissonSolution solve_phi2(const Spectrum& h, const DimensionlessParams& p, const PoissonSolution* warm = nullptr,
                           bool override_smallness = false);
// Largest |h|_1 accepted by solve_phi2 without override: c0 sqrt(delta)/(260 eps) with c0 = 1/(2 sqrt(delta)).
double phi2_smallness_limit(const DimensionlessParams& p);

// order 2: standard three-point scheme; order 4: Numerov with compact derivative recovery.
PoissonSolution solve_phi2_fd(const Spectrum& h, const DimensionlessParams& p, bool override_smallness = false,
                              int order = 4);

}  // namespace muskat::potentials
