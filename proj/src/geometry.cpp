/**
 * @file geometry.cpp
 * @brief Strip fields, harmonic extension, ALE matrices and curvature.
 */
#include "muskat/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "muskat/errors.hpp"

namespace muskat::geometry {

using spectral::grid_from_modes;
using spectral::modes_from_grid;

// =============================================================================
// StripField
// =============================================================================

StripField::StripField(int cutoff, int intervals) : N_(cutoff), M_(intervals) {
    if (cutoff < 0 || intervals < 2) throw ShapeError("strip field needs N >= 0 and M >= 2");
    const size_t sz = static_cast<size_t>(M_ + 1) * (N_ + 1);
    v_.assign(sz, cplx(0.0));
    d_.assign(sz, cplx(0.0));
}

std::vector<double> StripField::grid() const {
    std::vector<double> g(static_cast<size_t>(M_ + 1));
    for (int j = 0; j <= M_; ++j) g[j] = x2(j);
    return g;
}

Spectrum StripField::node(int j) const {
    return Spectrum(N_, std::vector<cplx>(val_row(j), val_row(j) + N_ + 1));
}

Spectrum StripField::node_dz(int j) const {
    return Spectrum(N_, std::vector<cplx>(dz_row(j), dz_row(j) + N_ + 1));
}

std::vector<double> quadrature_weights(int M) {
    std::vector<double> w(static_cast<size_t>(M + 1));
    const double h = 1.0 / M;
    if (M % 2 == 0) {
        for (int j = 0; j <= M; ++j) w[j] = (j == 0 || j == M) ? 1.0 : (j % 2 ? 4.0 : 2.0);
        for (auto& x : w) x *= h / 3.0;
    } else {
        for (int j = 0; j <= M; ++j) w[j] = (j == 0 || j == M) ? h / 2.0 : h;
    }
    return w;
}

double StripField::norm(double s, int k, double lambda) const {
    if (k != 0 && k != 1) throw DomainError("strip norm supports k in {0, 1}", k);
    if (lambda * N_ > 700.0) throw OverflowRisk(lambda, N_);
    const auto w = quadrature_weights(M_);
    const auto& data = k == 0 ? v_ : d_;
    double total = 0.0;
    for (int n = 0; n <= N_; ++n) {
        double integral = 0.0;
        for (int j = 0; j <= M_; ++j) integral += w[j] * std::abs(data[idx(j, n)]);
        const double weight = (n == 0 ? 1.0 : 2.0) * std::pow(1.0 + n, s) * std::exp(lambda * n);
        total += weight * integral;
    }
    return total;
}

double StripField::sup_slice_norm(double s, double lambda) const {
    double best = 0.0;
    for (int j = 0; j <= M_; ++j) best = std::max(best, spectral::wiener_norm(node(j), s, lambda));
    return best;
}

StripField& StripField::operator+=(const StripField& o) {
    if (!same_shape(o)) throw ShapeError("strip field shape mismatch");
    for (size_t i = 0; i < v_.size(); ++i) {
        v_[i] += o.v_[i];
        d_[i] += o.d_[i];
    }
    return *this;
}

StripField& StripField::operator-=(const StripField& o) {
    if (!same_shape(o)) throw ShapeError("strip field shape mismatch");
    for (size_t i = 0; i < v_.size(); ++i) {
        v_[i] -= o.v_[i];
        d_[i] -= o.d_[i];
    }
    return *this;
}

StripField& StripField::operator*=(double a) {
    for (size_t i = 0; i < v_.size(); ++i) {
        v_[i] *= a;
        d_[i] *= a;
    }
    return *this;
}

StripField operator+(StripField a, const StripField& b) { return a += b; }
StripField operator-(StripField a, const StripField& b) { return a -= b; }
StripField operator*(double s, StripField a) { return a *= s; }

StripField product(const StripField& f, const StripField& g) {
    if (!f.same_shape(g)) throw ShapeError("strip field shape mismatch in product");
    const int N = f.cutoff();
    const int P = spectral::product_grid(N);
    StripField out(N, f.intervals());
    std::vector<double> a(P), b(P), da(P), db(P), r(P);
    for (int j = 0; j < f.nodes(); ++j) {
        grid_from_modes(f.val_row(j), N + 1, P, a.data());
        grid_from_modes(g.val_row(j), N + 1, P, b.data());
        grid_from_modes(f.dz_row(j), N + 1, P, da.data());
        grid_from_modes(g.dz_row(j), N + 1, P, db.data());
        for (int i = 0; i < P; ++i) r[i] = a[i] * b[i];
        modes_from_grid(r.data(), P, out.val_row(j), N + 1);
        for (int i = 0; i < P; ++i) r[i] = da[i] * b[i] + a[i] * db[i];
        modes_from_grid(r.data(), P, out.dz_row(j), N + 1);
    }
    return out;
}

// =============================================================================
// Harmonic extension
// =============================================================================

double sinh_ratio(double k, double x2) {
    if (k == 0.0) return 1.0 + x2;
    return std::exp(k * x2) * (-std::expm1(-2.0 * k * (1.0 + x2))) / (-std::expm1(-2.0 * k));
}

double dn_profile(double k, double x2) {
    if (k == 0.0) return 1.0;
    return k * std::exp(k * x2) * (1.0 + std::exp(-2.0 * k * (1.0 + x2))) / (-std::expm1(-2.0 * k));
}

StripField sigma_field(const Spectrum& h, int M) {
    const int N = h.cutoff();
    StripField s(N, M);
    for (int j = 0; j <= M; ++j) {
        const double x = s.x2(j);
        for (int n = 0; n <= N; ++n) {
            s.val(j, n) = sinh_ratio(n, x) * h[n];
            s.dz(j, n) = dn_profile(n, x) * h[n];
        }
    }
    return s;
}

SigmaGradient grad_sigma(const Spectrum& h, int M) {
    const int N = h.cutoff();
    SigmaGradient g{StripField(N, M), StripField(N, M)};
    for (int j = 0; j <= M; ++j) {
        const double x = g.d1.x2(j);
        for (int n = 0; n <= N; ++n) {
            const cplx ik(0.0, n);
            const double S = sinh_ratio(n, x);
            const double D = dn_profile(n, x);
            g.d1.val(j, n) = ik * S * h[n];
            g.d1.dz(j, n) = ik * D * h[n];
            g.d2.val(j, n) = D * h[n];
            g.d2.dz(j, n) = static_cast<double>(n) * n * S * h[n];
        }
    }
    return g;
}

Spectrum dn_trace(const Spectrum& h) { return spectral::dn_symbol(h); }

SigmaSamples sigma_samples(const Spectrum& h, double x2, int P) {
    const int N = h.cutoff();
    std::vector<cplx> m1(N + 1), m2(N + 1), m11(N + 1), m12(N + 1), m22(N + 1);
    for (int n = 0; n <= N; ++n) {
        const cplx ik(0.0, n);
        const double S = sinh_ratio(n, x2);
        const double D = dn_profile(n, x2);
        m1[n] = ik * S * h[n];
        m2[n] = D * h[n];
        m11[n] = -static_cast<double>(n) * n * S * h[n];
        m12[n] = ik * D * h[n];
        m22[n] = static_cast<double>(n) * n * S * h[n];
    }
    SigmaSamples out;
    for (auto* p : {&out.s1, &out.s2, &out.s11, &out.s12, &out.s22}) p->resize(P);
    grid_from_modes(m1.data(), N + 1, P, out.s1.data());
    grid_from_modes(m2.data(), N + 1, P, out.s2.data());
    grid_from_modes(m11.data(), N + 1, P, out.s11.data());
    grid_from_modes(m12.data(), N + 1, P, out.s12.data());
    grid_from_modes(m22.data(), N + 1, P, out.s22.data());
    return out;
}

// =============================================================================
// ALE matrices
// =============================================================================

AleMatrices ale_matrices(const Spectrum& h, double eps, double delta, int M) {
    const int N = h.cutoff();
    const int P = spectral::composition_grid(N);
    const double sd = std::sqrt(delta);
    AleMatrices out{StripField(N, M), StripField(N, M), StripField(N, M), StripField(N, M), StripField(N, M),
                    Spectrum(N), Spectrum(N)};
    std::vector<double> r(P), dr(P);
    auto store = [&](StripField& f, int j) {
        modes_from_grid(r.data(), P, f.val_row(j), N + 1);
        modes_from_grid(dr.data(), P, f.dz_row(j), N + 1);
    };
    for (int j = 0; j <= M; ++j) {
        const auto s = sigma_samples(h, out.A12.x2(j), P);
        for (int i = 0; i < P; ++i) {
            const double J = 1.0 + eps * s.s2[i];
            if (!(J > 0.0)) throw DomainError("pole guard: 1 + eps d2 sigma <= 0", J);
        }
        for (int i = 0; i < P; ++i) {
            const double J = 1.0 + eps * s.s2[i];
            r[i] = -eps * s.s1[i] / J;
            dr[i] = -eps * (s.s12[i] * J - s.s1[i] * eps * s.s22[i]) / (J * J);
        }
        store(out.A12, j);
        for (int i = 0; i < P; ++i) {
            const double J = 1.0 + eps * s.s2[i];
            r[i] = 1.0 / J;
            dr[i] = -eps * s.s22[i] / (J * J);
        }
        store(out.A22, j);
        for (int i = 0; i < P; ++i) {
            r[i] = s.s2[i];
            dr[i] = s.s22[i];
        }
        store(out.Q11, j);
        for (int i = 0; i < P; ++i) {
            r[i] = -sd * s.s1[i];
            dr[i] = -sd * s.s12[i];
        }
        store(out.Q12, j);
        for (int i = 0; i < P; ++i) {
            const double J = 1.0 + eps * s.s2[i];
            const double num = -s.s2[i] + eps * delta * s.s1[i] * s.s1[i];
            const double dnum = -s.s22[i] + 2.0 * eps * delta * s.s1[i] * s.s12[i];
            r[i] = num / J;
            dr[i] = (dnum * J - num * eps * s.s22[i]) / (J * J);
        }
        store(out.Q22, j);
    }
    const Spectrum hx = spectral::derivative(h);
    const Spectrum Gd = spectral::compose_G(eps * dn_trace(h));
    out.traceA12 = eps * (spectral::product(hx, Gd) - hx);
    out.traceA22 = Spectrum::cosine(N, 0, 1.0) - Gd;
    return out;
}

TraceA trace_a_direct(const Spectrum& h, double eps) {
    const int N = h.cutoff();
    const int P = spectral::composition_grid(N);
    auto s1 = spectral::to_grid(spectral::derivative(h), P);
    auto s2 = spectral::to_grid(dn_trace(h), P);
    std::vector<double> a(P), b(P);
    for (int i = 0; i < P; ++i) {
        const double J = 1.0 + eps * s2[i];
        a[i] = -eps * s1[i] / J;
        b[i] = 1.0 / J;
    }
    return {spectral::from_grid(a, N), spectral::from_grid(b, N)};
}

Spectrum curvature(const Spectrum& h, double alpha) {
    const Spectrum hxx = spectral::derivative(h, 2);
    if (alpha == 0.0) return hxx;
    return hxx + spectral::product(spectral::compose_F(spectral::derivative(h), alpha), hxx);
}

DiffeoStatus diffeo_check(const Spectrum& h, double eps) {
    const double m = 0.5 - eps * spectral::wiener_norm(h, 1.0, 0.0);
    return {m > 0.0, m};
}

}  // namespace muskat::geometry
