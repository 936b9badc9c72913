/**
 * @file evolution.cpp
 * @brief Linear symbol, nonlinear terms, ETD-RK2 step and the run loop.
 */
#include "muskat/evolution.hpp"

#include <cmath>

#include "muskat/errors.hpp"
#include "muskat/geometry.hpp"

namespace muskat::evolution {

using spectral::apply_multiplier;
using spectral::product;

double linear_symbol(int k, const DimensionlessParams& p) {
    const double a = std::abs(k);
    if (a == 0.0) return 0.0;
    return std::tanh(p.sqrt_delta() * a) * (p.nu * p.alpha * a * a * a - p.eps * a) / p.eps;
}

RhsTerms nonlinear_terms(const Spectrum& h, const DimensionlessParams& p, const PoissonSolution* warm,
                         PoissonSolution* phi2_out) {
    const int N = h.cutoff();
    const double eps = p.eps, sd = p.sqrt_delta(), na = p.nu * p.alpha;
    const Spectrum hx = spectral::derivative(h);
    const Spectrum Gd = spectral::compose_G(eps * geometry::dn_trace(h));
    const Spectrum Fa = spectral::compose_F(hx, p.alpha);

    // N_h = (1/eps)[G(eps dn h) L0 h - (1 - G(eps dn h)) nu alpha tanh(sqrt(delta) Lambda) Lambda (F(alpha h') Lambda^2 h)]
    const Spectrum Lh = apply_multiplier(
        [&](int n) { return std::tanh(sd * n) * (na * n * n * n - eps * n); }, 0.0, h);
    const Spectrum FL = product(Fa, spectral::lambda_power(h, 2));
    const Spectrum Mh = apply_multiplier([&](int n) { return na * std::tanh(sd * n) * n; }, 0.0, FL);
    RhsTerms out;
    out.n_h = (1.0 / eps) * (product(Gd, Lh) - Mh + product(Gd, Mh));

    const auto tr = potentials::phi1_traces(h, p);
    const Spectrum A12 = eps * (product(hx, Gd) - hx);
    out.n_phi1 = -sd * product(tr[0] + product(A12, tr[1]), hx);

    PoissonSolution phi2 = potentials::solve_phi2(h, p, warm, p.override_smallness);
    const Spectrum& s2 = phi2.trace_d2;
    out.n_phi2 = -sd * product(product(A12, s2), hx) + (1.0 / p.alpha) * (s2 - product(Gd, s2));
    out.phi2_iterations = phi2.iterations;
    if (phi2_out) *phi2_out = std::move(phi2);
    (void)N;
    return out;
}

Spectrum nonlinear_rhs(const SimState& s, const DimensionlessParams& p, RhsInfo* info, PoissonSolution* phi2_out) {
    if (p.linear_only || s.h.is_zero()) {
        if (info) *info = {};
        return Spectrum(s.h.cutoff());
    }
    const RhsTerms t = nonlinear_terms(s.h, p, s.warm ? &*s.warm : nullptr, phi2_out);
    Spectrum total = t.n_phi1 + t.n_phi2 + t.n_h;
    if (info) {
        info->phi2_iterations = t.phi2_iterations;
        info->mean = total[0].real();
    }
    total[0] = 0.0;
    return total;
}

Spectrum full_rhs_direct(const Spectrum& h, const DimensionlessParams& p) {
    const int N = h.cutoff();
    const int P = spectral::composition_grid(N);
    const double eps = p.eps, sd = p.sqrt_delta();
    const auto tr = potentials::phi1_traces(h, p);
    const auto phi2 = potentials::solve_phi2(h, p, nullptr, p.override_smallness);
    const auto hx = spectral::to_grid(spectral::derivative(h), P);
    const auto dn = spectral::to_grid(geometry::dn_trace(h), P);
    const auto d1 = spectral::to_grid(tr[0], P);
    const auto d2 = spectral::to_grid(tr[1] + phi2.trace_d2, P);
    std::vector<double> r(P);
    for (int i = 0; i < P; ++i) {
        const double J = 1.0 + eps * dn[i];
        const double a12 = -eps * hx[i] / J, a22 = 1.0 / J;
        r[i] = -sd * (d1[i] + a12 * d2[i]) * hx[i] + a22 * d2[i] / p.alpha;
    }
    return spectral::from_grid(r, N);
}

namespace {

// phi_1(c) = (e^c - 1)/c and phi_2(c) = (e^c - 1 - c)/c^2
void etd_weights(double c, double& e, double& f1, double& f2) {
    e = std::exp(c);
    if (std::abs(c) < 1e-2) {
        f1 = 1.0 + c / 2.0 + c * c / 6.0 + c * c * c / 24.0 + c * c * c * c / 120.0;
        f2 = 0.5 + c / 6.0 + c * c / 24.0 + c * c * c / 120.0 + c * c * c * c / 720.0;
    } else {
        f1 = std::expm1(c) / c;
        f2 = (std::expm1(c) - c) / (c * c);
    }
}

void check_state(const Spectrum& h, const DimensionlessParams& p) {
    if (!h.finite()) throw BlowupError("non-finite Fourier coefficient");
    const auto d = geometry::diffeo_check(h, p.eps);
    if (!d.ok) throw PinchOffError("diffeomorphism condition eps|h|_1 < 1/2 violated", d.margin);
}

}  // namespace

SimState step(const SimState& s, const DimensionlessParams& p, StepInfo* info) {
    const int N = s.h.cutoff();
    const double dt = p.dt;
    std::vector<double> E(N + 1), F1(N + 1), F2(N + 1);
    for (int n = 0; n <= N; ++n) etd_weights(-linear_symbol(n, p) * dt, E[n], F1[n], F2[n]);

    RhsInfo i0, i1;
    PoissonSolution w0, w1;
    const Spectrum N0 = nonlinear_rhs(s, p, &i0, &w0);
    SimState a;
    a.t = s.t;
    a.h = Spectrum(N);
    for (int n = 1; n <= N; ++n) a.h[n] = E[n] * s.h[n] + dt * F1[n] * N0[n];
    if (!p.linear_only && !s.h.is_zero()) a.warm = w0;
    check_state(a.h, p);
    const Spectrum N1 = nonlinear_rhs(a, p, &i1, &w1);

    SimState out;
    out.step = s.step + 1;
    out.t = out.step * dt;
    out.h = Spectrum(N);
    for (int n = 1; n <= N; ++n) out.h[n] = a.h[n] + dt * F2[n] * (N1[n] - N0[n]);
    if (!p.linear_only && !a.h.is_zero()) out.warm = std::move(w1);
    check_state(out.h, p);
    if (info) {
        info->phi2_iterations = i0.phi2_iterations + i1.phi2_iterations;
        info->rhs_mean = i1.mean;
    }
    return out;
}

RunResult run(const SimState& start, const DimensionlessParams& p, const RunControl& ctl, double integral4) {
    p.validate();
    const long every = std::max<long>(1, ctl.output_every);
    const long total_steps = std::lround(p.T_final / p.dt);
    RunResult res;
    res.ledger = analysis::EnergyLedger(p.mu, p.decay_rate());
    SimState s = start;
    s.t = s.step * p.dt;

    auto norm4 = [&](const SimState& st) { return spectral::wiener_norm(st.h, 4.0, p.mu * st.t); };
    double prev4 = norm4(s);
    StepInfo info;
    auto record = [&](const SimState& st) {
        analysis::LedgerRow r = analysis::measure(st.h, st.t, p);
        r.step = st.step;
        r.integral4 = integral4;
        r.energy = r.norm1_mu + res.ledger.energy_coeff() * integral4;
        r.phi2_iterations = info.phi2_iterations;
        r.rhs_mean = info.rhs_mean;
        res.ledger.append(r);
        return ctl.on_row ? ctl.on_row(st, r) : true;
    };

    try {
        check_state(s.h, p);
        if (!record(s)) {
            res.final_state = s;
            return res;
        }
        while (s.step < total_steps) {
            s = step(s, p, &info);
            const double cur4 = norm4(s);
            integral4 += 0.5 * p.dt * (prev4 + cur4);
            prev4 = cur4;
            if (s.step % every == 0 || s.step == total_steps)
                if (!record(s)) break;
        }
    } catch (const PinchOffError& e) {
        res.status = "pinch-off";
        res.message = e.what();
    } catch (const BlowupError& e) {
        res.status = "blowup";
        res.message = e.what();
    } catch (const SolverError& e) {
        res.status = "solver-failure";
        res.message = e.what();
    } catch (const DomainError& e) {
        res.status = "solver-failure";
        res.message = e.what();
    }
    res.final_state = s;
    return res;
}

RunResult run(const Spectrum& h0, const DimensionlessParams& p, const RunControl& ctl) {
    SimState s;
    s.h = h0;
    s.h[0] = 0.0;
    return run(s, p, ctl, 0.0);
}

}  // namespace muskat::evolution
