/**
 * @file potentials.cpp
 * @brief phi1 in closed form, the Green-kernel Poisson solver, the phi2 fixed point
 *        and the finite-difference oracle.
 */
#include "muskat/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "muskat/errors.hpp"

namespace muskat::potentials {

using geometry::sigma_samples;
using spectral::grid_from_modes;
using spectral::modes_from_grid;

namespace {

const cplx I(0.0, 1.0);

// cosh(k(1+x))/cosh(k) and sinh(k(1+x))/cosh(k) with nonpositive exponents
double cosh_ratio(double k, double x) {
    if (k == 0.0) return 1.0;
    return std::exp(k * x) * (1.0 + std::exp(-2.0 * k * (1.0 + x))) / (1.0 + std::exp(-2.0 * k));
}

double sinh_over_cosh(double k, double x) {
    if (k == 0.0) return 0.0;
    return std::exp(k * x) * (-std::expm1(-2.0 * k * (1.0 + x))) / (1.0 + std::exp(-2.0 * k));
}

double sgn_pow(int e) { return (e % 2 == 0) ? 1.0 : -1.0; }

}  // namespace

// =============================================================================
// phi1
// =============================================================================

Spectrum capillary_pressure(const Spectrum& h, const DimensionlessParams& p) {
    return p.nu * p.alpha * geometry::curvature(h, p.alpha) + p.eps * h;
}

StripField phi1_field(const Spectrum& h, const DimensionlessParams& p, int j) {
    const Spectrum psi = capillary_pressure(h, p);
    const int N = h.cutoff();
    StripField f(N, p.M);
    const double sd = p.sqrt_delta();
    auto profile = [](double k, double x, int order) {
        const double base = (order % 2 == 0) ? cosh_ratio(k, x) : sinh_over_cosh(k, x);
        return std::pow(k, order) * base;
    };
    for (int r = 0; r <= p.M; ++r) {
        const double x = f.x2(r);
        for (int n = 0; n <= N; ++n) {
            const double k = sd * n;
            f.val(r, n) = profile(k, x, j) * psi[n];
            f.dz(r, n) = profile(k, x, j + 1) * psi[n];
        }
    }
    return f;
}

std::array<StripField, 2> grad_delta_phi1(const Spectrum& h, const DimensionlessParams& p) {
    const Spectrum psi = capillary_pressure(h, p);
    const int N = h.cutoff();
    const double sd = p.sqrt_delta();
    std::array<StripField, 2> g{StripField(N, p.M), StripField(N, p.M)};
    for (int r = 0; r <= p.M; ++r) {
        const double x = g[0].x2(r);
        for (int n = 0; n <= N; ++n) {
            const double k = sd * n;
            const double C = cosh_ratio(k, x);
            const double S = sinh_over_cosh(k, x);
            const cplx d1 = I * (sd * n);
            g[0].val(r, n) = d1 * C * psi[n];
            g[0].dz(r, n) = d1 * k * S * psi[n];
            g[1].val(r, n) = k * S * psi[n];
            g[1].dz(r, n) = k * k * C * psi[n];
        }
    }
    return g;
}

std::array<Spectrum, 2> phi1_traces(const Spectrum& h, const DimensionlessParams& p) {
    const Spectrum psi = capillary_pressure(h, p);
    const double sd = p.sqrt_delta();
    Spectrum d2 = spectral::apply_multiplier([sd](int n) { return sd * n * std::tanh(sd * n); }, 0.0, psi);
    return {spectral::derivative(psi), d2};
}

// =============================================================================
// Kernels
// =============================================================================

double pi_kernel(int which, double kappa, double y, double x, int j, int l) {
    const double k = kappa;
    const double pre = std::pow(k, j + l) / (2.0 * (1.0 + std::exp(-2.0 * k)));
    if (which == 1) {
        return pre * (std::exp(k * (y + x)) - sgn_pow(j) * std::exp(k * (y - x)) +
                      sgn_pow(l) * std::exp(k * (-2.0 - y + x)) - sgn_pow(j + l) * std::exp(k * (-2.0 - y - x)));
    }
    return pre * (std::exp(k * (y + x)) + sgn_pow(j) * std::exp(k * (y - x - 2.0)) +
                  sgn_pow(l) * std::exp(k * (x - y - 2.0)) - sgn_pow(j + l) * std::exp(k * (-2.0 - y - x))) -
           std::pow(k, j + l) * sgn_pow(l) * std::exp(k * (x - y)) / 2.0;
}

double pi_kernel_direct(int which, double kappa, double y, double x, int j, int l) {
    const double k = kappa;
    const double cy = (l % 2 == 0) ? std::cosh(k * (1.0 + y)) : std::sinh(k * (1.0 + y));
    const double sx = (j % 2 == 0) ? std::sinh(k * x) : std::cosh(k * x);
    double v = std::pow(k, j + l) * cy * sx / std::cosh(k);
    if (which == 2) {
        const double z = k * (y - x);
        v += std::pow(k, j + l) * sgn_pow(j) * ((j + l) % 2 == 0 ? std::sinh(z) : std::cosh(z));
    }
    return v;
}

KernelTable kernel_table(double kappa, int M) {
    KernelTable t;
    t.kappa = kappa;
    for (int i = 0; i <= M; ++i) t.nodes.push_back(-1.0 + static_cast<double>(i) / M);
    const size_t n = t.nodes.size();
    for (int w = 1; w <= 2; ++w)
        for (int j = 0; j < 3; ++j)
            for (int l = 0; l < 3; ++l) {
                auto& v = t.values[w - 1][j][l];
                v.assign(n * n, 0.0);
                for (size_t iy = 0; iy < n; ++iy)
                    for (size_t ix = 0; ix < n; ++ix)
                        v[iy * n + ix] = pi_kernel(w, kappa, t.nodes[iy], t.nodes[ix], j, l);
            }
    return t;
}

namespace {

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double diff = left + right - whole;
    if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    if (b <= a) return 0.0;
    // split into pieces so that boundary layers of width 1/kappa are resolved
    const int pieces = 64;
    double total = 0.0;
    for (int i = 0; i < pieces; ++i) {
        const double lo = a + (b - a) * i / pieces, hi = a + (b - a) * (i + 1) / pieces;
        const double fa = f(lo), fb = f(hi), fm = f(0.5 * (lo + hi));
        total += adaptive_simpson(f, lo, hi, fa, fm, fb, (hi - lo) / 6.0 * (fa + 4.0 * fm + fb), tol / pieces, 40);
    }
    return total;
}

}  // namespace

std::vector<KernelBoundRow> kernel_integral_bounds(double kappa, bool with_sup_first) {
    if (!(kappa > 0.0)) throw DomainError("kernel bounds need sqrt(delta)|k| > 0", kappa);
    std::vector<KernelBoundRow> rows;
    const int ny = 400;
    std::vector<double> ys;
    for (int i = 0; i <= ny; ++i) ys.push_back(-1.0 + static_cast<double>(i) / ny);
    // extra samples in the boundary layers
    for (int i = 1; i < 40; ++i) {
        const double d = std::min(1.0, 4.0 / kappa) * i / 40.0;
        ys.push_back(-1.0 + d);
        ys.push_back(-d);
    }
    std::sort(ys.begin(), ys.end());
    for (int j = 0; j <= 2; ++j)
        for (int l = 0; l <= 2; ++l) {
            if (j + l > 3) continue;
            KernelBoundRow r;
            r.j = j;
            r.l = l;
            const double scale = std::pow(kappa, j + l - 1);
            r.bound1 = 2.0 * scale;
            r.bound2 = 2.5 * scale;
            const double tol = 1e-10 * std::max(scale, 1e-300);
            for (double y : ys) {
                auto f1 = [&](double x) { return std::abs(pi_kernel(1, kappa, y, x, j, l)); };
                auto f2 = [&](double x) { return std::abs(pi_kernel(2, kappa, y, x, j, l)); };
                r.pi1 = std::max(r.pi1, integrate(f1, y, 0.0, tol));
                r.pi2 = std::max(r.pi2, integrate(f2, -1.0, y, tol));
            }
            // integral over x2 of the sup over y2
            auto sup1 = [&](double x) {
                double m = 0.0;
                for (double y : ys)
                    if (y <= x) m = std::max(m, std::abs(pi_kernel(1, kappa, y, x, j, l)));
                return std::max(m, std::abs(pi_kernel(1, kappa, x, x, j, l)));
            };
            auto sup2 = [&](double x) {
                double m = 0.0;
                for (double y : ys)
                    if (y >= x) m = std::max(m, std::abs(pi_kernel(2, kappa, y, x, j, l)));
                return std::max(m, std::abs(pi_kernel(2, kappa, x, x, j, l)));
            };
            const int nx = with_sup_first ? 400 : -1;
            for (int i = 0; i <= nx; ++i) {
                const double x = -1.0 + static_cast<double>(i) / nx;
                const double w = (i == 0 || i == nx) ? 0.5 / nx : 1.0 / nx;
                r.sup_first1 += w * sup1(x);
                r.sup_first2 += w * sup2(x);
            }
            r.ratio1 = r.pi1 / r.bound1;
            r.ratio2 = r.pi2 / r.bound2;
            rows.push_back(r);
        }
    return rows;
}

// =============================================================================
// Green solver
// =============================================================================

std::array<double, 4> hermite_exp_weights(double kappa, double h) {
    const double z = kappa * h;
    // q_m = int_0^1 e^{-z(1-t)} t^m dt
    double q[4];
    if (z < 4.0) {
        for (int m = 0; m < 4; ++m) {
            double fact_m = 1.0;
            for (int i = 2; i <= m; ++i) fact_m *= i;
            // term_k = (-z)^k m! / (k+m+1)!
            double denom = 1.0;
            for (int i = 2; i <= m + 1; ++i) denom *= i;
            double term = fact_m / denom;
            double sum = term;
            for (int k = 1; k < 200; ++k) {
                term *= -z / (k + m + 1);
                sum += term;
                if (std::abs(term) < 1e-18 * std::abs(sum)) break;
            }
            q[m] = sum;
        }
    } else {
        q[0] = -std::expm1(-z) / z;
        for (int m = 1; m < 4; ++m) q[m] = 1.0 / z - m / z * q[m - 1];
    }
    return {h * (2.0 * q[3] - 3.0 * q[2] + q[0]), h * h * (q[3] - 2.0 * q[2] + q[1]), h * (-2.0 * q[3] + 3.0 * q[2]),
            h * h * (q[3] - q[2])};
}

namespace {

struct Cumulative {
    std::vector<cplx> S, T, V, U;
};

// S(x) = int_{-1}^x e^{k(y-x)} f,  T(x) = int_{-1}^x e^{-k(1+y)} f,
// V(x) = int_x^0 e^{k y} f,        U(x) = int_x^0 e^{k(x-y)} f.
Cumulative cumulative(const std::vector<cplx>& f, const std::vector<cplx>& fd, double k, double hstep,
                      const std::vector<double>& x, const std::array<double, 4>& w) {
    const int M = static_cast<int>(f.size()) - 1;
    Cumulative c{std::vector<cplx>(M + 1), std::vector<cplx>(M + 1), std::vector<cplx>(M + 1),
                 std::vector<cplx>(M + 1)};
    const double E = std::exp(-k * hstep);
    std::vector<cplx> R(M), L(M);
    for (int i = 0; i < M; ++i) {
        R[i] = w[0] * f[i] + w[1] * fd[i] + w[2] * f[i + 1] + w[3] * fd[i + 1];
        L[i] = w[0] * f[i + 1] - w[1] * fd[i + 1] + w[2] * f[i] - w[3] * fd[i];
    }
    for (int i = 0; i < M; ++i) {
        c.S[i + 1] = E * c.S[i] + R[i];
        c.T[i + 1] = c.T[i] + std::exp(-k * (1.0 + x[i])) * L[i];
    }
    for (int i = M - 1; i >= 0; --i) {
        c.V[i] = c.V[i + 1] + std::exp(k * x[i + 1]) * R[i];
        c.U[i] = E * c.U[i + 1] + L[i];
    }
    return c;
}

}  // namespace

PoissonSolution solve_poisson_green(const StripField& g1, const StripField& g2, double delta) {
    if (!g1.same_shape(g2)) throw ShapeError("forcing components differ in shape");
    const int N = g1.cutoff();
    const int M = g1.intervals();
    const double hstep = g1.step();
    const double sd = std::sqrt(delta);
    const std::vector<double> x = g1.grid();
    PoissonSolution sol{StripField(N, M), StripField(N, M), Spectrum(N), 0.0, 1, 0.0};

    std::vector<cplx> f1(M + 1), f1d(M + 1), f2(M + 1), f2d(M + 1), phi(M + 1), dphi(M + 1);
    double boundary_defect = 0.0, scale = 0.0;
    for (int n = 0; n <= N; ++n) {
        for (int j = 0; j <= M; ++j) {
            f1[j] = g1.val(j, n);
            f1d[j] = g1.dz(j, n);
            f2[j] = g2.val(j, n);
            f2d[j] = g2.dz(j, n);
            scale = std::max({scale, std::abs(f1[j]), std::abs(f2[j])});
        }
        if (n == 0) {
            // d2^2 phi = d2 g2 with phi(0) = 0, d2 phi(-1) = 0
            for (int j = 0; j <= M; ++j) dphi[j] = f2[j] - f2[0];
            phi[M] = 0.0;
            for (int j = M - 1; j >= 0; --j)
                phi[j] = phi[j + 1] - (hstep / 2.0 * (dphi[j] + dphi[j + 1]) +
                                       hstep * hstep / 12.0 * (f2d[j] - f2d[j + 1]));
            for (int j = 0; j <= M; ++j) {
                sol.grad1.val(j, 0) = 0.0;
                sol.grad1.dz(j, 0) = 0.0;
                sol.grad2.val(j, 0) = dphi[j];
                sol.grad2.dz(j, 0) = f2d[j];
            }
            boundary_defect += std::abs(phi[M]) + std::abs(dphi[0]);
            continue;
        }
        const double k = sd * n;
        const auto w = hermite_exp_weights(k, hstep);
        const Cumulative c1 = cumulative(f1, f1d, k, hstep, x, w);
        const Cumulative c2 = cumulative(f2, f2d, k, hstep, x, w);
        const double em2 = std::exp(-2.0 * k);
        const double D = 2.0 * (1.0 + em2);
        for (int j = 0; j <= M; ++j) {
            const double xx = x[j];
            const double e2x = std::exp(2.0 * k * xx), exm1 = std::exp(k * (xx - 1.0));
            const double emx1 = std::exp(-k * (1.0 + xx)), ex = std::exp(k * xx);
            const double emx2 = std::exp(-k * (xx + 2.0)), em2x2 = std::exp(-2.0 * k * (1.0 + xx));
            auto J = [&](const Cumulative& c, int jj, int ll) {
                const double sj = sgn_pow(jj), sl = sgn_pow(ll), sjl = sgn_pow(jj + ll);
                const cplx v = (e2x - sj) * c.S[j] + (sl * exm1 - sjl * emx1) * c.T[j] + (ex + sj * emx2) * c.V[j] +
                               (sl * em2 - sjl * em2x2 - (1.0 + em2) * sl) * c.U[j];
                return std::pow(k, jj + ll) / D * v;
            };
            const double sc = (exm1 - emx1) / (1.0 + em2);  // sinh(kx)/cosh(k)
            const double cc = (exm1 + emx1) / (1.0 + em2);  // cosh(kx)/cosh(k)
            phi[j] = I * J(c1, 0, 0) - sc / k * f2[0] - J(c2, 0, 1) / k;
            dphi[j] = I * J(c1, 1, 0) - cc * f2[0] + f2[j] - J(c2, 1, 1) / k;
        }
        const cplx d1 = I * (sd * n);
        for (int j = 0; j <= M; ++j) {
            sol.grad1.val(j, n) = d1 * phi[j];
            sol.grad1.dz(j, n) = d1 * dphi[j];
            sol.grad2.val(j, n) = dphi[j];
            sol.grad2.dz(j, n) = k * k * phi[j] + d1 * f1[j] + f2d[j];
        }
        boundary_defect += std::abs(phi[M]) + std::abs(dphi[0]);
    }
    sol.trace_d2 = sol.grad2.trace_top();
    sol.residual = scale > 0.0 ? boundary_defect / scale : boundary_defect;
    if (!std::isfinite(sol.residual) || sol.residual > 1e-8)
        throw SolverError("Green quadrature failed to meet the boundary conditions", sol.residual);
    return sol;
}

// =============================================================================
// phi2 fixed point
// =============================================================================

double phi2_smallness_limit(const DimensionlessParams& p) { return 1.0 / (520.0 * p.eps); }

namespace {

void check_phi2_smallness(const Spectrum& h, const DimensionlessParams& p, bool override_smallness) {
    const double h1 = spectral::wiener_norm(h, 1.0, 0.0);
    if (!override_smallness && !(h1 < phi2_smallness_limit(p)))
        throw DomainError("interface too large for the phi2 contraction (|h|_1 >= 1/(520 eps))", h1);
}

}  // namespace

PoissonSolution solve_phi2(const Spectrum& h, const DimensionlessParams& p, const PoissonSolution* warm,
                           bool override_smallness) {
    check_phi2_smallness(h, p, override_smallness);
    const int N = h.cutoff();
    const int M = p.M;
    const int P = spectral::product_grid(N);
    const double eps = p.eps, sd = p.sqrt_delta();
    const size_t stride = static_cast<size_t>(P);
    std::vector<double> q11((M + 1) * stride), q12((M + 1) * stride), q22((M + 1) * stride);
    std::vector<double> d11((M + 1) * stride), d12((M + 1) * stride), d22((M + 1) * stride);
    const double hstep = 1.0 / M;
    for (int j = 0; j <= M; ++j) {
        const auto s = sigma_samples(h, -1.0 + j * hstep, P);
        const size_t o = j * stride;
        for (int i = 0; i < P; ++i) {
            const double J = 1.0 + eps * s.s2[i];
            if (!(J > 0.0)) throw DomainError("pole guard: 1 + eps d2 sigma <= 0", J);
            const double num = -s.s2[i] + eps * p.delta * s.s1[i] * s.s1[i];
            const double dnum = -s.s22[i] + 2.0 * eps * p.delta * s.s1[i] * s.s12[i];
            q11[o + i] = s.s2[i];
            d11[o + i] = s.s22[i];
            q12[o + i] = -sd * s.s1[i];
            d12[o + i] = -sd * s.s12[i];
            q22[o + i] = num / J;
            d22[o + i] = (dnum * J - num * eps * s.s22[i]) / (J * J);
        }
    }
    const auto W1 = grad_delta_phi1(h, p);
    PoissonSolution cur{StripField(N, M), StripField(N, M), Spectrum(N), 0.0, 0, 0.0};
    if (warm && warm->grad1.cutoff() == N && warm->grad1.intervals() == M) {
        cur.grad1 = warm->grad1;
        cur.grad2 = warm->grad2;
    }
    StripField g1(N, M), g2(N, M);
    std::vector<cplx> wa(N + 1), wb(N + 1), wda(N + 1), wdb(N + 1);
    std::vector<double> a(P), b(P), da(P), db(P), r(P);
    double prev_dist = -1.0, factor = 0.0;
    int growth = 0;
    for (int it = 1; it <= p.phi2_max_iter; ++it) {
        for (int j = 0; j <= M; ++j) {
            for (int n = 0; n <= N; ++n) {
                wa[n] = W1[0].val(j, n) + cur.grad1.val(j, n);
                wb[n] = W1[1].val(j, n) + cur.grad2.val(j, n);
                wda[n] = W1[0].dz(j, n) + cur.grad1.dz(j, n);
                wdb[n] = W1[1].dz(j, n) + cur.grad2.dz(j, n);
            }
            grid_from_modes(wa.data(), N + 1, P, a.data());
            grid_from_modes(wb.data(), N + 1, P, b.data());
            grid_from_modes(wda.data(), N + 1, P, da.data());
            grid_from_modes(wdb.data(), N + 1, P, db.data());
            const size_t o = j * stride;
            for (int i = 0; i < P; ++i) r[i] = -eps * (q11[o + i] * a[i] + q12[o + i] * b[i]);
            modes_from_grid(r.data(), P, g1.val_row(j), N + 1);
            for (int i = 0; i < P; ++i)
                r[i] = -eps * (d11[o + i] * a[i] + q11[o + i] * da[i] + d12[o + i] * b[i] + q12[o + i] * db[i]);
            modes_from_grid(r.data(), P, g1.dz_row(j), N + 1);
            for (int i = 0; i < P; ++i) r[i] = -eps * (q12[o + i] * a[i] + q22[o + i] * b[i]);
            modes_from_grid(r.data(), P, g2.val_row(j), N + 1);
            for (int i = 0; i < P; ++i)
                r[i] = -eps * (d12[o + i] * a[i] + q12[o + i] * da[i] + d22[o + i] * b[i] + q22[o + i] * db[i]);
            modes_from_grid(r.data(), P, g2.dz_row(j), N + 1);
        }
        PoissonSolution next = solve_poisson_green(g1, g2, p.delta);
        const double dist = (next.grad1 - cur.grad1).norm(0.0, 1) + (next.grad2 - cur.grad2).norm(0.0, 1);
        const double size = next.norm(0.0);
        cur = std::move(next);
        if (prev_dist > 0.0) {
            factor = dist / prev_dist;
            growth = dist > prev_dist ? growth + 1 : 0;
            if (growth >= 3) throw SolverError("phi2 iteration is not contracting", factor);
        }
        prev_dist = dist;
        if (dist <= p.phi2_tol * size || dist == 0.0) {
            cur.iterations = it;
            cur.contraction = factor;
            return cur;
        }
    }
    throw SolverError("phi2 iteration hit the iteration cap", factor);
}

// =============================================================================
// Finite-difference oracle
// =============================================================================

PoissonSolution solve_phi2_fd(const Spectrum& h, const DimensionlessParams& p, bool override_smallness, int order) {
    check_phi2_smallness(h, p, override_smallness);
    const int N = h.cutoff();
    const int M = p.M;
    const int P = spectral::product_grid(N);
    const double eps = p.eps, delta = p.delta, sd = p.sqrt_delta();
    const double hs = 1.0 / M;
    const size_t stride = static_cast<size_t>(P);
    const size_t row = static_cast<size_t>(N + 1);

    // coefficients of the pulled-back operator delta (D1^2) + D2^2, D1 = d1 + a d2, D2 = b d2
    std::vector<double> ca((M + 1) * stride), cb(ca.size()), ca1(ca.size()), ca2(ca.size()), cb2(ca.size());
    for (int j = 0; j <= M; ++j) {
        const auto s = sigma_samples(h, -1.0 + j * hs, P);
        const size_t o = j * stride;
        for (int i = 0; i < P; ++i) {
            const double J = 1.0 + eps * s.s2[i];
            if (!(J > 0.0)) throw DomainError("pole guard: 1 + eps d2 sigma <= 0", J);
            ca[o + i] = -eps * s.s1[i] / J;
            cb[o + i] = 1.0 / J;
            ca1[o + i] = -eps * (s.s11[i] * J - s.s1[i] * eps * s.s12[i]) / (J * J);
            ca2[o + i] = -eps * (s.s12[i] * J - s.s1[i] * eps * s.s22[i]) / (J * J);
            cb2[o + i] = -eps * s.s22[i] / (J * J);
        }
    }
    // phi1 and its exact x2 derivatives
    const Spectrum psi = capillary_pressure(h, p);
    std::vector<cplx> u0((M + 1) * row), u2e(u0.size()), u22e(u0.size());
    for (int j = 0; j <= M; ++j)
        for (int n = 0; n <= N; ++n) {
            const double k = sd * n, x = -1.0 + j * hs;
            u0[j * row + n] = cosh_ratio(k, x) * psi[n];
            u2e[j * row + n] = k * sinh_over_cosh(k, x) * psi[n];
            u22e[j * row + n] = k * k * cosh_ratio(k, x) * psi[n];
        }

    // phi2 values and its first and second x2 derivatives at the nodes
    std::vector<cplx> phi(u0.size(), cplx(0.0)), dphi(u0.size(), cplx(0.0)), ddphi(u0.size(), cplx(0.0));
    std::vector<cplx> rhs(u0.size(), cplx(0.0));
    std::vector<cplx> U1(row), U2(row), U22(row), U12(row);
    std::vector<double> g1(P), g2(P), g22(P), g12(P), r(P);
    std::vector<cplx> out(row);
    std::vector<double> lo(M), di(M), up(M), cp(M);
    std::vector<cplx> b(M), dp(M), sol(M + 1);
    const bool fourth = (order == 4);
    if (order != 2 && order != 4) throw DomainError("finite-difference order must be 2 or 4", order);

    auto update_derivatives = [&](int n) {
        auto f = [&](int j) { return phi[j * row + n]; };
        auto dd = [&](int j) { return ddphi[j * row + n]; };
        const double k2 = delta * n * n;
        if (fourth) {
            // phi'' from the equation, phi' from the compact relations
            for (int j = 0; j <= M; ++j) ddphi[j * row + n] = k2 * f(j) + rhs[j * row + n];
            dphi[n] = 0.0;
            for (int j = 1; j < M; ++j)
                dphi[j * row + n] = (f(j + 1) - f(j - 1)) / (2.0 * hs) - hs / 12.0 * (dd(j + 1) - dd(j - 1));
            // Taylor at the top with phi''' and phi'''' from one-sided differences of phi''
            const cplx d3 = (3.0 * dd(M) - 4.0 * dd(M - 1) + dd(M - 2)) / (2.0 * hs);
            const cplx d4 = (dd(M) - 2.0 * dd(M - 1) + dd(M - 2)) / (hs * hs);
            dphi[M * row + n] = (f(M) - f(M - 1)) / hs + hs / 2.0 * dd(M) - hs * hs / 6.0 * d3 + hs * hs * hs / 24.0 * d4;
        } else {
            dphi[n] = 0.0;
            ddphi[n] = 2.0 * (f(1) - f(0)) / (hs * hs);
            for (int j = 1; j < M; ++j) {
                dphi[j * row + n] = (f(j + 1) - f(j - 1)) / (2.0 * hs);
                ddphi[j * row + n] = (f(j + 1) - 2.0 * f(j) + f(j - 1)) / (hs * hs);
            }
            dphi[M * row + n] = (3.0 * f(M) - 4.0 * f(M - 1) + f(M - 2)) / (2.0 * hs);
            ddphi[M * row + n] = (2.0 * f(M) - 5.0 * f(M - 1) + 4.0 * f(M - 2) - f(M - 3)) / (hs * hs);
        }
    };

    double prev = -1.0;
    int growth = 0;
    int it = 1;
    for (; it <= std::max(p.phi2_max_iter, 400); ++it) {
        // perturbation operator applied to phi1 + phi2 at every node
        for (int j = 0; j <= M; ++j) {
            for (int n = 0; n <= N; ++n) {
                const cplx ik(0.0, n);
                const size_t q = j * row + n;
                const cplx d2 = u2e[q] + dphi[q];
                U1[n] = ik * (u0[q] + phi[q]);
                U2[n] = d2;
                U22[n] = u22e[q] + ddphi[q];
                U12[n] = ik * d2;
            }
            grid_from_modes(U1.data(), N + 1, P, g1.data());
            grid_from_modes(U2.data(), N + 1, P, g2.data());
            grid_from_modes(U22.data(), N + 1, P, g22.data());
            grid_from_modes(U12.data(), N + 1, P, g12.data());
            const size_t o = j * stride;
            for (int i = 0; i < P; ++i) {
                const double a = ca[o + i], bb = cb[o + i];
                r[i] = delta * (ca1[o + i] * g2[i] + 2.0 * a * g12[i] + a * ca2[o + i] * g2[i] + a * a * g22[i]) +
                       bb * cb2[o + i] * g2[i] + (bb * bb - 1.0) * g22[i];
            }
            modes_from_grid(r.data(), P, out.data(), N + 1);
            for (int n = 0; n <= N; ++n) rhs[j * row + n] = -out[n];
        }
        // phi2'' - delta n^2 phi2 = rhs per mode, phi2(0) = 0, ghost node phi_{-1} = phi_1 at the bottom
        double change = 0.0, size = 0.0;
        for (int n = 0; n <= N; ++n) {
            const double k2h = delta * n * n * hs * hs;
            auto R = [&](int j) { return rhs[j * row + n]; };
            if (fourth) {
                // Numerov: (1 - k2h/12) (phi_{j-1} + phi_{j+1}) - (2 + 10 k2h/12) phi_j = h^2 (R_{j-1} + 10 R_j + R_{j+1})/12
                const double off = 1.0 - k2h / 12.0, dia = -(2.0 + 10.0 * k2h / 12.0);
                di[0] = dia;
                up[0] = 2.0 * off;
                b[0] = hs * hs * (10.0 * R(0) + 2.0 * R(1)) / 12.0;
                for (int j = 1; j < M; ++j) {
                    lo[j] = off;
                    di[j] = dia;
                    up[j] = off;
                    b[j] = hs * hs * (R(j - 1) + 10.0 * R(j) + R(j + 1)) / 12.0;
                }
            } else {
                di[0] = -(2.0 + k2h);
                up[0] = 2.0;
                b[0] = hs * hs * R(0);
                for (int j = 1; j < M; ++j) {
                    lo[j] = 1.0;
                    di[j] = -(2.0 + k2h);
                    up[j] = 1.0;
                    b[j] = hs * hs * R(j);
                }
            }
            // Thomas, phi_M = 0 drops the last super-diagonal entry
            cp[0] = up[0] / di[0];
            dp[0] = b[0] / di[0];
            for (int j = 1; j < M; ++j) {
                const double m = di[j] - lo[j] * cp[j - 1];
                if (m == 0.0) throw SolverError("singular finite-difference system");
                cp[j] = up[j] / m;
                dp[j] = (b[j] - lo[j] * dp[j - 1]) / m;
            }
            sol[M] = 0.0;
            sol[M - 1] = dp[M - 1];
            for (int j = M - 2; j >= 0; --j) sol[j] = dp[j] - cp[j] * sol[j + 1];
            for (int j = 0; j <= M; ++j) {
                change = std::max(change, std::abs(sol[j] - phi[j * row + n]));
                size = std::max(size, std::abs(sol[j]));
                phi[j * row + n] = sol[j];
            }
            update_derivatives(n);
        }
        if (change <= 1e-13 * size || change == 0.0) break;
        if (prev > 0.0) {
            growth = change > prev ? growth + 1 : 0;
            if (growth >= 3) throw SolverError("finite-difference iteration is not contracting", change / prev);
        }
        prev = change;
    }

    PoissonSolution res{StripField(N, M), StripField(N, M), Spectrum(N), 0.0, it, 0.0};
    for (int n = 0; n <= N; ++n) {
        const cplx d1 = cplx(0.0, sd * n);
        for (int j = 0; j <= M; ++j) {
            const size_t q = j * row + n;
            res.grad1.val(j, n) = d1 * phi[q];
            res.grad1.dz(j, n) = d1 * dphi[q];
            res.grad2.val(j, n) = dphi[q];
            res.grad2.dz(j, n) = ddphi[q];
        }
    }
    res.trace_d2 = res.grad2.trace_top();
    return res;
}

}  // namespace muskat::potentials
