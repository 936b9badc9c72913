//==============================================================================
// test_geometry.cpp
//
// Harmonic extension, ALE matrices, curvature and the diffeomorphism check.
//==============================================================================
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "muskat/analysis.hpp"
#include "muskat/errors.hpp"
#include "muskat/geometry.hpp"

using namespace muskat;
using geometry::StripField;
using spectral::Spectrum;

namespace {

double max_diff(const Spectrum& a, const Spectrum& b) {
    double d = 0.0;
    for (int n = 0; n <= a.cutoff(); ++n) d = std::max(d, std::abs(a[n] - b[n]));
    return d;
}

double q_norm(const geometry::AleMatrices& A, double s) {
    return A.Q11.norm(s, 1) + 2.0 * A.Q12.norm(s, 1) + A.Q22.norm(s, 1);
}

}  // namespace

TEST_CASE("profile ratios") {
    CHECK(geometry::sinh_ratio(1.0, -0.5) == doctest::Approx(0.443409441985037).epsilon(1e-14));
    CHECK(geometry::sinh_ratio(1.0, -1.0) == 0.0);
    CHECK(geometry::sinh_ratio(0.0, -0.25) == doctest::Approx(0.75));
    CHECK(geometry::dn_profile(1.0, 0.0) == doctest::Approx(1.313035285499331).epsilon(1e-14));
    CHECK(geometry::dn_profile(0.0, -0.3) == 1.0);
    // large k stays finite and matches e^{k x2} asymptotics
    CHECK(geometry::sinh_ratio(2000.0, -0.01) == doctest::Approx(std::exp(-20.0)).epsilon(1e-12));
    CHECK(std::isfinite(geometry::dn_profile(5000.0, 0.0)));
}

TEST_CASE("harmonic extension sigma") {
    const Spectrum c = Spectrum::cosine(8, 1, 1.0);
    const StripField sig = geometry::sigma_field(c, 8);
    CHECK(std::abs(sig.val(0, 1)) == 0.0);
    CHECK(sig.val(4, 1).real() == doctest::Approx(0.5 * 0.443409441985037).epsilon(1e-14));
    CHECK(max_diff(sig.trace_top(), c) < 1e-15);
    CHECK(geometry::sigma_field(Spectrum(8), 8).norm(0, 0) == 0.0);

    const auto g = geometry::grad_sigma(c, 8);
    CHECK(g.d2.val(8, 1).real() == doctest::Approx(0.5 * 1.313035285499331).epsilon(1e-14));
    // d1^2 sigma + d2^2 sigma = 0 mode by mode
    analysis::CounterRng rng(2);
    const Spectrum h = analysis::random_interface(rng, 16, 1e-2);
    const auto gh = geometry::grad_sigma(h, 16);
    const StripField sh = geometry::sigma_field(h, 16);
    double worst = 0.0;
    for (int j = 0; j <= 16; ++j)
        for (int n = 0; n <= 16; ++n) worst = std::max(worst, std::abs(gh.d2.dz(j, n) - double(n * n) * sh.val(j, n)));
    CHECK(worst < 1e-15);
}

TEST_CASE("harmonicity by finite differences in x2") {
    // second differences of the sigma profiles converge at second order
    const Spectrum h = Spectrum::cosine(4, 3, 1.0);
    double prev = 0.0;
    for (int M : {32, 64, 128}) {
        const StripField s = geometry::sigma_field(h, M);
        const double dx = 1.0 / M;
        double err = 0.0;
        for (int j = 1; j < M; ++j) {
            const auto d2 = (s.val(j + 1, 3) - 2.0 * s.val(j, 3) + s.val(j - 1, 3)) / (dx * dx);
            err = std::max(err, std::abs(d2 - 9.0 * s.val(j, 3)));
        }
        if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.05));
        prev = err;
    }
}

TEST_CASE("Dirichlet-Neumann trace") {
    CHECK(geometry::dn_trace(Spectrum(8)).is_zero());
    CHECK(geometry::dn_trace(Spectrum::cosine(8, 1, 1.0))[1].real() == doctest::Approx(0.5 * 1.313035285499331));
    CHECK(geometry::dn_trace(Spectrum::cosine(8, 5, 1.0))[5].real() == doctest::Approx(0.5 * 5.000454019910097));
}

TEST_CASE("ALE matrices at rest") {
    const auto A = geometry::ale_matrices(Spectrum(8), 0.1, 0.25, 8);
    CHECK(A.A12.norm(0, 0) == 0.0);
    CHECK(A.Q11.norm(0, 0) + A.Q12.norm(0, 0) + A.Q22.norm(0, 0) == 0.0);
    for (int j = 0; j <= 8; ++j) CHECK(A.A22.val(j, 0).real() == doctest::Approx(1.0));
    CHECK(A.traceA22[0].real() == doctest::Approx(1.0));
}

TEST_CASE("ALE traces against pointwise evaluation") {
    analysis::CounterRng rng(9);
    for (int t = 0; t < 10; ++t) {
        const Spectrum h = analysis::random_interface(rng, 24, 0.5);
        const auto A = geometry::ale_matrices(h, 0.1, 0.25, 16);
        const auto D = geometry::trace_a_direct(h, 0.1);
        // the spectral trace multiplies the truncated G(eps dn h) by h', the direct one projects
        // the pointwise product: they differ by the tail of G beyond the cutoff
        CHECK(max_diff(A.traceA12, D.A12) < 1e-8);
        CHECK(max_diff(A.traceA22, D.A22) < 1e-13);
        // the strip fields at x2 = 0 carry the same traces
        CHECK(max_diff(A.A12.trace_top(), D.A12) < 1e-13);
        CHECK(max_diff(A.A22.trace_top(), D.A22) < 1e-13);
        // Q symmetric entry is -sqrt(delta) d1 sigma
        const auto g = geometry::grad_sigma(h, 16);
        for (int j = 0; j <= 16; j += 4) CHECK(max_diff(A.Q12.node(j), -0.5 * g.d1.node(j)) < 1e-14);
    }
}

TEST_CASE("ALE pole guard") {
    const Spectrum h = Spectrum::cosine(8, 1, 20.0);
    CHECK_THROWS_AS(geometry::ale_matrices(h, 0.1, 0.25, 8), DomainError);
}

TEST_CASE("Q bound under smallness") {
    analysis::CounterRng rng(13);
    const double eps = 0.1;
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
        const double s = t % 2;
        const double lim = 1.0 / (4.0 * spectral::kappa_s(s) * eps);
        const Spectrum h = analysis::random_interface(rng, 16, rng.uniform(0.01, 0.99) * lim);
        const auto A = geometry::ale_matrices(h, eps, 0.25, 32);
        worst = std::max(worst, q_norm(A, s) / (10.0 * spectral::wiener_norm(h, s + 1)));
    }
    INFO("worst " << worst);
    CHECK(worst <= 1.0);
}

TEST_CASE("strip field norms and product") {
    // profile (1 + x2) on mode 1: A^{0,0} norm 2 * 1/2 * 1/2, A^{0,1} norm 2 * 1/2 * 1
    StripField f(4, 8);
    for (int j = 0; j <= 8; ++j) {
        f.val(j, 1) = 0.5 * (1.0 + f.x2(j));
        f.dz(j, 1) = 0.5;
    }
    CHECK(f.norm(0, 0) == doctest::Approx(0.5));
    CHECK(f.norm(0, 1) == doctest::Approx(1.0));
    CHECK(f.norm(1, 1) == doctest::Approx(2.0));
    const StripField ff = geometry::product(f, f);
    // (1+x2)^2 cos^2 x1: mode 0 = (1+x2)^2/2, d/dx2 = (1+x2)
    CHECK(ff.val(8, 0).real() == doctest::Approx(0.5));
    CHECK(ff.dz(4, 0).real() == doctest::Approx(0.5));
    CHECK(ff.norm(0, 1) <= 2.0 * f.norm(0, 1) * f.sup_slice_norm(0) + 1e-15);
    CHECK_THROWS_AS(geometry::product(f, StripField(4, 6)), ShapeError);
}

TEST_CASE("modified curvature") {
    CHECK(geometry::curvature(Spectrum(8), 0.05).is_zero());
    const Spectrum c = Spectrum::cosine(16, 1, 1.0);
    CHECK(max_diff(geometry::curvature(c, 0.0), -1.0 * c) < 1e-15);
    const Spectrum K = geometry::curvature(c, 0.05);
    const int P = 96;
    const auto g = spectral::to_grid(K, P);
    double err = 0.0;
    for (int i = 0; i < P; ++i) {
        const double x = 2.0 * std::numbers::pi * i / P;
        const double direct = -std::cos(x) / std::pow(1.0 + 0.0025 * std::sin(x) * std::sin(x), 1.5);
        err = std::max(err, std::abs(g[i] - direct));
    }
    CHECK(err < 1e-10);
}

TEST_CASE("diffeomorphism check") {
    const auto z = geometry::diffeo_check(Spectrum(8), 0.1);
    CHECK(z.ok);
    CHECK(z.margin == 0.5);
    const Spectrum c = Spectrum::cosine(8, 1, 1.0);
    const auto a = geometry::diffeo_check(c, 0.1);
    CHECK(a.ok);
    CHECK(a.margin == doctest::Approx(0.3));
    CHECK_FALSE(geometry::diffeo_check(c, 0.3).ok);
    // determinant 1 + eps d2 sigma stays positive when the check passes
    analysis::CounterRng rng(4);
    for (int t = 0; t < 50; ++t) {
        const Spectrum h = analysis::random_interface(rng, 16, rng.uniform(0.1, 4.9));
        REQUIRE(geometry::diffeo_check(h, 0.1).ok);
        for (double x2 : {-1.0, -0.5, 0.0}) {
            const auto s = geometry::sigma_samples(h, x2, 64);
            for (double v : s.s2) CHECK(1.0 + 0.1 * v > 0.0);
        }
    }
}
