//==============================================================================
// test_evolution.cpp
//
// Linear symbol, nonlinear terms, ETD-RK2 stepping and the run loop.
//==============================================================================
#include <doctest.h>

#include <cmath>

#include "muskat/errors.hpp"
#include "muskat/evolution.hpp"

using namespace muskat;
using evolution::DimensionlessParams;
using spectral::Spectrum;

namespace {

DimensionlessParams small_params(int N) {
    auto p = DimensionlessParams::reference();
    p.N = N;
    p.M = 32;
    return p;
}

double max_diff(const Spectrum& a, const Spectrum& b) {
    double d = 0.0;
    for (int n = 0; n <= a.cutoff(); ++n) d = std::max(d, std::abs(a[n] - b[n]));
    return d;
}

}  // namespace

TEST_CASE("linear symbol values") {
    const auto p = DimensionlessParams::reference();
    CHECK(evolution::linear_symbol(0, p) == 0.0);
    CHECK(evolution::linear_symbol(1, p) == doctest::Approx(0.46211715726001).epsilon(1e-12));
    CHECK(evolution::linear_symbol(2, p) == doctest::Approx(10.662318183380709).epsilon(1e-12));
    CHECK(evolution::linear_symbol(-2, p) == evolution::linear_symbol(2, p));
    auto u = DimensionlessParams::from_eps_delta_nu(0.1, 0.25, 1.5);
    CHECK(evolution::linear_symbol(1, u) == doctest::Approx(-0.11552928931500).epsilon(1e-12));
}

TEST_CASE("nonlinear terms vanish at rest and are quadratic") {
    const auto p = small_params(16);
    evolution::SimState s;
    s.h = Spectrum(16);
    CHECK(evolution::nonlinear_rhs(s, p).is_zero());
    double prev = 0.0, prev_a = 0.0;
    for (double a : {1e-8, 1e-6, 1e-4}) {
        s.h = Spectrum::cosine(16, 1, a);
        const double n0 = spectral::wiener_norm(evolution::nonlinear_rhs(s, p), 0.0);
        if (prev > 0.0) {
            const double slope = std::log(n0 / prev) / std::log(a / prev_a);
            INFO("slope " << slope);
            CHECK(slope == doctest::Approx(2.0).epsilon(0.02));
        }
        prev = n0;
        prev_a = a;
    }
}

TEST_CASE("split form equals the direct right-hand side") {
    const auto p = small_params(24);
    analysis::CounterRng rng(8);
    for (int t = 0; t < 5; ++t) {
        const Spectrum h = analysis::random_interface(rng, 24, rng.uniform(1e-4, 5e-3));
        const auto terms = evolution::nonlinear_terms(h, p);
        const Spectrum lin = spectral::apply_multiplier([&](int n) { return evolution::linear_symbol(n, p); }, 0.0, h);
        const Spectrum split = terms.n_phi1 + terms.n_phi2 + terms.n_h - lin;
        const Spectrum direct = evolution::full_rhs_direct(h, p);
        CHECK(max_diff(split, direct) <= 1e-11 * spectral::wiener_norm(direct, 0.0));
    }
}

TEST_CASE("N_h norm bound") {
    // |N_h|_1 <= 2 sqrt(delta) nu alpha |h|_1 [(1+alpha) eps/(1 - eps|h|_1) + alpha] |h|_4 with the
    // sqrt(delta) prefactor in front of the bracket; the simulator's term carries 1/eps instead
    const auto p = small_params(24);
    analysis::CounterRng rng(12);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
        const Spectrum h = analysis::random_interface(rng, 24, rng.uniform(1e-5, 8e-4));
        const Spectrum nh = (p.sqrt_delta() * p.eps) * evolution::nonlinear_terms(h, p).n_h;
        const double h1 = spectral::wiener_norm(h, 1), h4 = spectral::wiener_norm(h, 4);
        const double rhs = 2 * p.sqrt_delta() * p.nu * p.alpha * h1 *
                           ((1 + p.alpha) * p.eps / (1 - p.eps * h1) + p.alpha) * h4;
        worst = std::max(worst, spectral::wiener_norm(nh, 1) / rhs);
    }
    INFO("worst " << worst);
    CHECK(worst <= 1.0);
}

TEST_CASE("rest state is an equilibrium") {
    auto p = small_params(16);
    p.dt = 0.5;
    evolution::SimState s;
    s.h = Spectrum(16);
    const auto next = evolution::step(s, p);
    CHECK(next.h.is_zero());
    CHECK(next.t == 0.5);
}

TEST_CASE("linear-only steps are exact per mode") {
    auto p = small_params(16);
    p.linear_only = true;
    p.dt = 0.01;
    p.T_final = 0.5;
    analysis::CounterRng rng(3);
    const Spectrum h0 = analysis::random_interface(rng, 16, 1e-3);
    const auto res = evolution::run(h0, p);
    REQUIRE(res.status == "ok");
    const double t = res.final_state.t;
    CHECK(t == doctest::Approx(0.5));
    for (int n = 1; n <= 16; ++n) {
        const auto expect = h0[n] * std::exp(-evolution::linear_symbol(n, p) * t);
        CHECK(std::abs(res.final_state.h[n] - expect) <= 1e-13 * std::abs(h0[n]) + 1e-300);
    }
}

TEST_CASE("tiny data decays at the linear rate") {
    auto p = small_params(16);
    p.dt = 1e-2;
    p.T_final = 5.0;
    evolution::RunControl ctl;
    ctl.output_every = 10;
    const auto res = evolution::run(Spectrum::cosine(16, 1, 1e-6), p, ctl);
    REQUIRE(res.status == "ok");
    const double rate = analysis::decay_rate_fit(res.ledger);
    CHECK(rate == doctest::Approx(0.46211715726).epsilon(0.01));
    CHECK(res.final_state.h[0] == 0.0);
}

TEST_CASE("run ledger and failure reporting") {
    auto p = small_params(16);
    p.dt = 0.01;
    p.T_final = 0.2;
    evolution::RunControl ctl;
    ctl.output_every = 5;
    const auto flat = evolution::run(Spectrum(16), p, ctl);
    CHECK(flat.status == "ok");
    CHECK(flat.ledger.rows().size() == 5);
    for (const auto& r : flat.ledger.rows()) CHECK(r.energy == 0.0);

    // eps |h|_1 = 0.6 violates the diffeomorphism condition before any step
    p.override_smallness = true;
    const auto bad = evolution::run(Spectrum::cosine(16, 1, 3.0), p, ctl);
    CHECK(bad.status == "pinch-off");

    // stopping from the row callback
    int calls = 0;
    ctl.on_row = [&](const evolution::SimState&, const analysis::LedgerRow&) { return ++calls < 2; };
    const auto stopped = evolution::run(Spectrum::cosine(16, 1, 1e-4), p, ctl);
    CHECK(calls == 2);
    CHECK(stopped.ledger.rows().size() == 2);
}

TEST_CASE("RT-unstable mode grows at |L(1)|") {
    auto p = DimensionlessParams::from_eps_delta_nu(0.1, 0.25, 1.5);
    p.N = 16;
    p.M = 32;
    p.linear_only = true;
    p.dt = 0.01;
    p.T_final = 2.0;
    evolution::RunControl ctl;
    ctl.output_every = 10;
    const auto res = evolution::run(Spectrum::cosine(16, 1, 1e-6), p, ctl);
    REQUIRE(res.status == "ok");
    CHECK(-analysis::decay_rate_fit(res.ledger) == doctest::Approx(0.11552928931500).epsilon(1e-6));
}
