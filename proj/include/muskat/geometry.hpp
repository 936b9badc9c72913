//==============================================================================
// geometry.hpp
//
// Fields on the strip S = T x (-1, 0) and the ALE change of variables.
//
//   - StripField: per-mode profiles on a uniform x2 grid, value and d/dx2.
//   - Harmonic extension sigma of the interface and its gradient.
//   - Inverse Jacobian A, the symmetric perturbation Q, their traces.
//   - Modified curvature h''(1 + F(alpha h')) and the diffeomorphism check.
//==============================================================================
#pragma once

#include <vector>

#include "muskat/spectral.hpp"

namespace muskat::geometry {

using spectral::cplx;
using spectral::Spectrum;

// Profiles are stored node-major: entry (j, n) for node j in 0..M, mode n in 0..N.
// Both the profile and its x2 derivative are carried, so that A^{s,1} norms and
// product rules never need numerical differentiation.
class StripField {
public:
    StripField() = default;
    StripField(int cutoff, int intervals);

    int cutoff() const { return N_; }
    int intervals() const { return M_; }
    int nodes() const { return M_ + 1; }
    double x2(int j) const { return -1.0 + static_cast<double>(j) / M_; }
    double step() const { return 1.0 / M_; }
    std::vector<double> grid() const;

    cplx& val(int j, int n) { return v_[idx(j, n)]; }
    cplx val(int j, int n) const { return v_[idx(j, n)]; }
    cplx& dz(int j, int n) { return d_[idx(j, n)]; }
    cplx dz(int j, int n) const { return d_[idx(j, n)]; }
    cplx* val_row(int j) { return &v_[idx(j, 0)]; }
    const cplx* val_row(int j) const { return &v_[idx(j, 0)]; }
    cplx* dz_row(int j) { return &d_[idx(j, 0)]; }
    const cplx* dz_row(int j) const { return &d_[idx(j, 0)]; }

    Spectrum node(int j) const;
    Spectrum node_dz(int j) const;
    Spectrum trace_top() const { return node(M_); }
    Spectrum trace_bottom() const { return node(0); }

    // sum_n (1+|n|)^s e^{lambda|n|} int |d^k profile_n| dx2, k in {0, 1}
    double norm(double s, int k, double lambda = 0.0) const;
    // sup over the grid of the Wiener norm of each horizontal slice
    double sup_slice_norm(double s, double lambda = 0.0) const;

    StripField& operator+=(const StripField& o);
    StripField& operator-=(const StripField& o);
    StripField& operator*=(double a);
    bool same_shape(const StripField& o) const { return N_ == o.N_ && M_ == o.M_; }

private:
    size_t idx(int j, int n) const { return static_cast<size_t>(j) * (N_ + 1) + n; }
    int N_ = 0;
    int M_ = 0;
    std::vector<cplx> v_;
    std::vector<cplx> d_;
};

StripField operator+(StripField a, const StripField& b);
StripField operator-(StripField a, const StripField& b);
StripField operator*(double s, StripField a);

// Composite Simpson weights on the uniform grid (trapezoid when M is odd).
std::vector<double> quadrature_weights(int intervals);

// Dealiased per-node product, d/dx2 by the product rule.
StripField product(const StripField& f, const StripField& g);

// Stable profile ratios with nonpositive exponents.
double sinh_ratio(double k, double x2);  // sinh((1+x2)k)/sinh(k), (1+x2) at k = 0
double dn_profile(double k, double x2);  // k cosh((1+x2)k)/sinh(k), 1 at k = 0

StripField sigma_field(const Spectrum& h, int intervals);
struct SigmaGradient {
    StripField d1;  // d1 sigma (dz = d1 d2 sigma)
    StripField d2;  // d2 sigma (dz = d2^2 sigma)
};
SigmaGradient grad_sigma(const Spectrum& h, int intervals);
Spectrum dn_trace(const Spectrum& h);

// A_j^i is row i, column j of A = (grad Sigma)^{-1}; A_1^1 = 1 and A_2^1 = 0.
struct AleMatrices {
    StripField A12;  // A_1^2 = -eps d1 sigma / (1 + eps d2 sigma)
    StripField A22;  // A_2^2 = 1 / (1 + eps d2 sigma)
    StripField Q11, Q12, Q22;  // Q symmetric, Q21 = Q12
    Spectrum traceA12;  // eps h' (G(eps dn h) - 1)
    Spectrum traceA22;  // 1 - G(eps dn h)
};
AleMatrices ale_matrices(const Spectrum& h, double eps, double delta, int intervals);

// Pointwise samples of sigma derivatives at node j on a grid of P points.
struct SigmaSamples {
    std::vector<double> s1, s2, s11, s12, s22;
};
SigmaSamples sigma_samples(const Spectrum& h, double x2, int P);

// x2 = 0 entries of A by direct pointwise evaluation, for cross-checks.
struct TraceA {
    Spectrum A12, A22;
};
TraceA trace_a_direct(const Spectrum& h, double eps);

Spectrum curvature(const Spectrum& h, double alpha);

struct DiffeoStatus {
    bool ok;
    double margin;  // 1/2 - eps |h|_1
};
DiffeoStatus diffeo_check(const Spectrum& h, double eps);

}  // namespace muskat::geometry
