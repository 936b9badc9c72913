//==============================================================================
// acceptance.cpp
//
// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed criteria. Optional arguments restrict the run to criterion numbers.
//==============================================================================
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "muskat/analysis.hpp"
#include "muskat/evolution.hpp"
#include "muskat/lab.hpp"
#include "muskat/potentials.hpp"

using namespace muskat;
using evolution::DimensionlessParams;
using spectral::Spectrum;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char b[512];
    std::snprintf(b, sizeof b, f, args...);
    return b;
}

DimensionlessParams linear_params(double nu) {
    auto p = DimensionlessParams::from_eps_delta_nu(0.1, 0.25, nu);
    p.N = 64;
    p.M = 64;
    p.linear_only = true;
    p.dt = 1e-3;
    p.T_final = 5.0;
    return p;
}

double linear_rate(const DimensionlessParams& p) {
    evolution::RunControl ctl;
    ctl.output_every = 100;
    const auto res = evolution::run(Spectrum::cosine(p.N, 1, 1e-6), p, ctl);
    if (res.status != "ok") return std::nan("");
    return analysis::decay_rate_fit(res.ledger);
}

//------------------------------------------------------------------------------

Outcome c1_linear_dispersion() {
    const auto p = linear_params(4.0);
    const double expect = evolution::linear_symbol(1, p);  // 0.462117
    const double rate = linear_rate(p);
    const double rel = std::abs(rate - expect) / expect;
    return {rel <= 0.01, fmt("rate %.7f vs L(1) = %.7f, rel err %.2e (tol 1e-2)", rate, expect, rel)};
}

Outcome c2_elliptic_constant() {
    const int N = 32, M = 64, trials = 1000;
    analysis::CounterRng rng(2);
    double worst[2] = {0.0, 0.0};
    for (int t = 0; t < trials; ++t) {
        const double d = rng.uniform(0.01, 1.0);
        const auto g1 = analysis::random_strip_forcing(rng, N, M, rng.uniform(0.0, 1.0));
        const auto g2 = analysis::random_strip_forcing(rng, N, M, rng.uniform(0.0, 1.0));
        const auto sol = potentials::solve_poisson_green(g1, g2, d);
        for (int s = 0; s <= 1; ++s)
            worst[s] = std::max(worst[s], sol.norm(s) / (g1.norm(s, 1) + g2.norm(s, 1)));
    }
    const double w = std::max(worst[0], worst[1]);
    return {w <= 13.0, fmt("%d forcings, max ratio s=0: %.4f, s=1: %.4f (bound 13)", trials, worst[0], worst[1])};
}

Outcome c3_kernel_bounds() {
    double r1 = 0.0, r2 = 0.0;
    int rows = 0;
    for (double kappa : {0.1, 1.0, 10.0, 100.0})
        for (const auto& r : potentials::kernel_integral_bounds(kappa, false)) {
            r1 = std::max(r1, r.ratio1);
            r2 = std::max(r2, r.ratio2);
            ++rows;
        }
    return {r1 <= 1.0 && r2 <= 1.0,
            fmt("%d (kappa, j, l) rows, max Pi1/(2 k^{j+l-1}) = %.4f, max Pi2/((5/2) k^{j+l-1}) = %.4f", rows, r1, r2)};
}

Outcome c4_phi2_oracle() {
    auto p = DimensionlessParams::reference();
    p.N = 64;
    p.M = 128;
    analysis::CounterRng rng(4);
    double worst = 0.0;
    const int count = 100;
    for (int t = 0; t < count; ++t) {
        const Spectrum h = analysis::random_interface(rng, p.N, rng.uniform(1e-4, 1e-2));
        const auto g = potentials::solve_phi2(h, p);
        const auto f = potentials::solve_phi2_fd(h, p);
        const double d = (f.grad1 - g.grad1).norm(0.0, 1) + (f.grad2 - g.grad2).norm(0.0, 1);
        worst = std::max(worst, d / g.norm(0.0));
    }
    return {worst <= 1e-4, fmt("%d interfaces at N=%d, M=%d, max relative A^{0,1} gap %.3e (tol 1e-4)", count, p.N,
                               p.M, worst)};
}

struct DecayRun {
    bool done = false;
    evolution::RunResult res;
    double h0_norm = 0.0;
    DimensionlessParams p;
};

DecayRun& decay_run() {
    static DecayRun d;
    if (d.done) return d;
    d.p = DimensionlessParams::reference();
    d.p.mu = 0.01;
    d.p.T_final = 50.0;
    analysis::CounterRng rng(5);
    const Spectrum h0 = analysis::rough_interface(rng, d.p.N, 5e-4);
    d.h0_norm = spectral::wiener_norm(h0, 1.0);
    evolution::RunControl ctl;
    ctl.output_every = 100;
    d.res = evolution::run(h0, d.p, ctl);
    d.done = true;
    return d;
}

Outcome c5_decay_theorem() {
    const auto& d = decay_run();
    if (d.res.status != "ok") return {false, "run stopped: " + d.res.status + ": " + d.res.message};
    const auto rep = analysis::verify_energy(d.res.ledger, d.h0_norm, d.p, 1e-6);
    const double t_end = d.res.ledger.rows().back().t;
    return {rep.envelope_ok && rep.energy_monotone && rep.no_pinch_off && t_end >= 50.0 - 1e-9,
            fmt("|h0|_1 = %.3e (threshold %.5e), t = %.1f, %zu rows; envelope %s (worst margin %.2e), "
                "E nonincreasing %s (worst rise %.2e), max eps sup|h| = %.2e, energy bounded %s",
                d.h0_norm, analysis::theorem_threshold(d.p), t_end, d.res.ledger.rows().size(),
                rep.envelope_ok ? "ok" : "VIOLATED", rep.worst_envelope_margin, rep.energy_monotone ? "ok" : "NO",
                rep.worst_monotone_increase, rep.max_eps_sup, rep.energy_bounded ? "yes" : "no")};
}

Outcome c6_analyticity_gain() {
    const auto& d = decay_run();
    if (d.res.status != "ok") return {false, "run stopped: " + d.res.status};
    int checked = 0, bad = 0;
    double min_margin = 1e300, first_bad_t = -1.0;
    for (const auto& r : d.res.ledger.rows()) {
        if (r.t < 1.0 - 1e-12) continue;
        ++checked;
        const double margin = r.radius - d.p.mu * r.t;
        min_margin = std::min(min_margin, margin);
        if (margin < 0.0) {
            if (bad == 0) first_bad_t = r.t;
            ++bad;
        }
    }
    return {checked > 0 && bad == 0,
            fmt("%d rows with t >= 1, min(radius - mu t) = %.4f, rows below mu t: %d%s", checked, min_margin, bad,
                bad ? fmt(" (first at t = %.2f)", first_bad_t).c_str() : "")};
}

Outcome c7_inequality_battery() {
    analysis::LabOptions o;
    o.seed = 1;
    o.trials = 1000;
    const auto rep = analysis::constants_lab(o);
    std::string bad;
    for (const auto& v : rep.violations) bad += fmt(" %s(ratio %.4f)", v.id.c_str(), v.ratio);
    return {rep.ok(), fmt("%zu rows x %ld trials, violating rows: %zu%s", rep.rows.size(), o.trials,
                          rep.violations.size(), bad.c_str())};
}

Outcome c8_instability() {
    const auto p = linear_params(1.5);
    const double expect = -evolution::linear_symbol(1, p);  // 0.1155293
    const double growth = -linear_rate(p);
    const double rel = std::abs(growth - expect) / expect;
    return {expect > 0.0 && rel <= 0.01,
            fmt("nu sqrt(delta) = 0.75: growth %.7f vs |L(1)| = %.7f, rel err %.2e", growth, expect, rel)};
}

}  // namespace

int main(int argc, char** argv) {
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> fn;
    };
    const std::vector<Criterion> all = {
        {1, "linear dispersion", 5, c1_linear_dispersion},
        {2, "elliptic constant", 120, c2_elliptic_constant},
        {3, "kernel integral bounds", 10, c3_kernel_bounds},
        {4, "phi2 oracle equivalence", 300, c4_phi2_oracle},
        {5, "global decay theorem", 600, c5_decay_theorem},
        {6, "analyticity gain", 600, c6_analyticity_gain},
        {7, "inequality battery", 600, c7_inequality_battery},
        {8, "instability sanity", 5, c8_instability},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    int failed = 0;
    for (const auto& c : all) {
        if (!only.empty() && !only.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.budget_s;
        const bool pass = o.pass && in_time;
        if (!pass) ++failed;
        std::printf("%s criterion %d (%s): %s [%.1f s, budget %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.c_str(), secs, c.budget_s, in_time ? "" : ", OVER BUDGET");
        std::fflush(stdout);
    }
    return failed;
}
