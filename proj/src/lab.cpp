/**
 * @file lab.cpp
 * @brief Constants lab rows, CSV report and counterexample bundles.
 */
#include "muskat/lab.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "muskat/errors.hpp"
#include "muskat/evolution.hpp"
#include "muskat/potentials.hpp"

namespace muskat::analysis {

using geometry::StripField;
using nlohmann::json;
using spectral::cplx;
using spectral::kappa_s;
using spectral::wiener_norm;

const LabRow& LabReport::get(const std::string& id) const {
    for (const auto& r : rows)
        if (r.id == id) return r;
    throw std::out_of_range("no lab row " + id);
}

StripField random_strip_forcing(CounterRng& rng, int N, int M, double decay) {
    StripField g(N, M);
    for (int n = 0; n <= N; ++n) {
        cplx c[4];
        for (int m = 1; m <= 3; ++m)
            c[m] = cplx(rng.uniform(-1, 1), n == 0 ? 0.0 : rng.uniform(-1, 1)) * std::exp(-decay * n);
        for (int j = 0; j <= M; ++j) {
            const double y = 1.0 + g.x2(j);
            g.val(j, n) = c[1] * y + c[2] * y * y + c[3] * y * y * y;
            g.dz(j, n) = c[1] + 2.0 * c[2] * y + 3.0 * c[3] * y * y;
        }
    }
    return g;
}

Spectrum random_spectrum(CounterRng& rng, int N, double decay) {
    Spectrum v(N);
    v[0] = rng.uniform(-1, 1);
    for (int n = 1; n <= N; ++n) v[n] = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1)) * std::exp(-decay * n);
    return v;
}

json strip_to_json(const StripField& f) {
    json val = json::array(), dz = json::array();
    for (int j = 0; j < f.nodes(); ++j) {
        json rv = json::array(), rd = json::array();
        for (int n = 0; n <= f.cutoff(); ++n) {
            rv.push_back({f.val(j, n).real(), f.val(j, n).imag()});
            rd.push_back({f.dz(j, n).real(), f.dz(j, n).imag()});
        }
        val.push_back(rv);
        dz.push_back(rd);
    }
    return {{"cutoff", f.cutoff()}, {"intervals", f.intervals()}, {"val", val}, {"dz", dz}};
}

namespace {

// Accumulates one row; keeps the worst violating trial.
class Acc {
public:
    Acc(std::string id, std::string formula, uint64_t seed) : seed_(seed) {
        row_.id = std::move(id);
        row_.formula = std::move(formula);
    }

    // rhs = constant * base; inputs is only evaluated for violations
    void add(double lhs, double rhs, double constant, const std::function<json()>& inputs) {
        const long trial = row_.trials++;
        double ratio = 0.0;
        if (rhs > 0.0) ratio = lhs / rhs;
        else if (lhs > 0.0) ratio = std::numeric_limits<double>::infinity();
        row_.max_ratio = std::max(row_.max_ratio, ratio);
        row_.empirical_constant = std::max(row_.empirical_constant, ratio * constant);
        if (lhs > rhs * (1.0 + kLabSlack)) {
            ++row_.violations;
            if (!worst_ || ratio > worst_->ratio) {
                LabViolation v;
                v.id = row_.id;
                v.trial = trial;
                v.row_seed = seed_;
                v.lhs = lhs;
                v.rhs = rhs;
                v.ratio = ratio;
                v.inputs = inputs();
                worst_ = v;
            }
        }
    }

    void finish(LabReport& rep) {
        rep.rows.push_back(row_);
        if (worst_) rep.violations.push_back(*worst_);
    }

private:
    uint64_t seed_;
    LabRow row_;
    std::optional<LabViolation> worst_;
};

uint64_t row_seed(uint64_t seed, size_t index) {
    CounterRng r(seed ^ (0xD1B54A32D192ED03ULL * (index + 1)));
    return r.next_u64();
}

double scale_to(Spectrum& v, double target, double s, double lambda = 0.0) {
    const double n = wiener_norm(v, s, lambda);
    if (n > 0.0) v *= target / n;
    return target;
}

// nu alpha (1 + 2 alpha |h|_1)|h|_{a} + eps |h|_{b}
double pressure_bound(const Spectrum& h, const DimensionlessParams& p, double a, double b) {
    const double h1 = wiener_norm(h, 1);
    return p.nu * p.alpha * (1 + 2 * p.alpha * h1) * wiener_norm(h, a) + p.eps * wiener_norm(h, b);
}

json spec_json(const Spectrum& v) { return spectral::to_json(v); }

struct Ctx {
    const LabOptions& opt;
    LabReport& rep;
    size_t index = 0;

    // Runs body(rng, acc) trials times for one row.
    void row(const std::string& id, const std::string& formula,
             const std::function<void(CounterRng&, Acc&)>& body) {
        const uint64_t rs = row_seed(opt.seed, index++);
        if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), id) == opt.only.end()) return;
        CounterRng rng(rs);
        Acc acc(id, formula, rs);
        for (long t = 0; t < opt.trials; ++t) body(rng, acc);
        acc.finish(rep);
    }
    double z() const { return opt.zero_inputs ? 0.0 : 1.0; }
};

//==============================================================================
// Periodic Wiener-space rows
//==============================================================================

void spectral_rows(Ctx& c) {
    const int N = 16;
    c.row("product_rule", "|fg|_{s,l} <= K_s (|f|_{0,l}|g|_{s,l} + |f|_{s,l}|g|_{0,l}), s in [0,3]",
          [&](CounterRng& rng, Acc& a) {
              const double s = rng.uniform(0, 3), l = rng.uniform(0, 0.5);
              const Spectrum f = c.z() * random_spectrum(rng, N, rng.uniform(0, 1));
              const Spectrum g = c.z() * random_spectrum(rng, N, rng.uniform(0, 1));
              const double lhs = wiener_norm(spectral::product(f, g), s, l);
              const double base = wiener_norm(f, 0, l) * wiener_norm(g, s, l) + wiener_norm(f, s, l) * wiener_norm(g, 0, l);
              a.add(lhs, kappa_s(s) * base, kappa_s(s), [&] {
                  return json{{"s", s}, {"lambda", l}, {"f", spec_json(f)}, {"g", spec_json(g)}};
              });
          });
    c.row("product_rule_2s1", "|fg|_{s,l} <= 2^{s+1} |f|_{s,l}|g|_{s,l}", [&](CounterRng& rng, Acc& a) {
        const double s = rng.uniform(0, 3), l = rng.uniform(0, 0.5);
        const Spectrum f = c.z() * random_spectrum(rng, N, rng.uniform(0, 1));
        const Spectrum g = c.z() * random_spectrum(rng, N, rng.uniform(0, 1));
        const double k = std::pow(2.0, s + 1);
        a.add(wiener_norm(spectral::product(f, g), s, l), k * wiener_norm(f, s, l) * wiener_norm(g, s, l), k,
              [&] { return json{{"s", s}, {"lambda", l}, {"f", spec_json(f)}, {"g", spec_json(g)}}; });
    });
    c.row("interpolation", "|v|_{s_theta,l} <= |v|_{s1,l}^theta |v|_{s2,l}^{1-theta}", [&](CounterRng& rng, Acc& a) {
        double s1 = rng.uniform(0, 4), s2 = rng.uniform(0, 4);
        if (s1 > s2) std::swap(s1, s2);
        const double th = rng.uniform(0, 1), l = rng.uniform(0, 0.5);
        const Spectrum v = c.z() * random_spectrum(rng, N, rng.uniform(0, 1));
        const double st = th * s1 + (1 - th) * s2;
        a.add(wiener_norm(v, st, l), std::pow(wiener_norm(v, s1, l), th) * std::pow(wiener_norm(v, s2, l), 1 - th), 1.0,
              [&] { return json{{"s1", s1}, {"s2", s2}, {"theta", th}, {"lambda", l}, {"v", spec_json(v)}}; });
    });
    c.row("power_rule", "|v^n|_{s,l} <= K_{s,n} |v|_{0,l}^{n-1} |v|_{s,l}, n in 2..5", [&](CounterRng& rng, Acc& a) {
        const double s = rng.uniform(0, 3), l = rng.uniform(0, 0.5);
        const int n = 2 + static_cast<int>(rng.uniform(0, 4));
        const Spectrum v = c.z() * random_spectrum(rng, N, rng.uniform(0, 1));
        Spectrum vn = v;
        for (int i = 1; i < n; ++i) vn = spectral::product(vn, v);
        const double k = spectral::ksn_constant(s, n);
        a.add(wiener_norm(vn, s, l), k * std::pow(wiener_norm(v, 0, l), n - 1) * wiener_norm(v, s, l), k,
              [&] { return json{{"s", s}, {"lambda", l}, {"n", n}, {"v", spec_json(v)}}; });
    });
    auto zero_mean = [&](CounterRng& rng) {
        Spectrum v = c.z() * random_spectrum(rng, N, rng.uniform(0, 1));
        v[0] = 0.0;
        return v;
    };
    c.row("hom_nonhom_corrected", "zero mean: 2^{-s}|v|_{s,l} <= sum |n|^s e^{l|n|}|v(n)| <= |v|_{s,l}",
          [&](CounterRng& rng, Acc& a) {
              const double s = rng.uniform(0, 4), l = rng.uniform(0, 0.5);
              const Spectrum v = zero_mean(rng);
              const double hom = spectral::wiener_norm_hom(v, s, l), full = wiener_norm(v, s, l);
              auto in = [&] { return json{{"s", s}, {"lambda", l}, {"v", spec_json(v)}}; };
              a.add(full, std::pow(2.0, s) * hom, std::pow(2.0, -s), in);
              a.add(hom, full, 1.0, in);
          });
    c.row("multiplier_tanh", "|tanh(sqrt(delta) Lambda) f|_{s,l} <= |f|_{s,l}", [&](CounterRng& rng, Acc& a) {
        const double s = rng.uniform(0, 4), l = rng.uniform(0, 0.5), d = rng.uniform(0.01, 1);
        const Spectrum f = c.z() * random_spectrum(rng, N, rng.uniform(0, 1));
        a.add(wiener_norm(spectral::tanh_sqrt_delta(f, d), s, l), wiener_norm(f, s, l), 1.0,
              [&] { return json{{"s", s}, {"lambda", l}, {"delta", d}, {"f", spec_json(f)}}; });
    });
    c.row("multiplier_dn", "|eps Lambda/tanh(Lambda) f|_{s,l} <= eps |f|_{s+1,l}", [&](CounterRng& rng, Acc& a) {
        const double s = rng.uniform(0, 3), l = rng.uniform(0, 0.5), e = rng.uniform(0.01, 1);
        const Spectrum f = c.z() * random_spectrum(rng, N, rng.uniform(0, 1));
        a.add(wiener_norm(e * spectral::dn_symbol(f), s, l), e * wiener_norm(f, s + 1, l), 1.0,
              [&] { return json{{"s", s}, {"lambda", l}, {"eps", e}, {"f", spec_json(f)}}; });
    });
}

//==============================================================================
// Compositions with F(x) = (1+x^2)^{-3/2} - 1 and G(x) = x/(1+x)
//==============================================================================

void composition_rows(Ctx& c) {
    const int N = 16;
    // |v|_{0,l} = r with random mean
    auto draw = [&](CounterRng& rng, double s_max, double r_max, double& s, double& l, double& r) {
        s = rng.uniform(0, s_max);
        l = rng.uniform(0, 0.5);
        r = rng.uniform(0.01, r_max);
        // alternate dense spectra with sparse ones (mean plus up to three random modes)
        Spectrum v(N);
        if (rng.uniform() < 0.5) {
            v = random_spectrum(rng, N, rng.uniform(0, 1));
        } else {
            v[0] = rng.uniform(-1, 1);
            const int modes = 1 + static_cast<int>(rng.uniform(0, 3));
            for (int i = 0; i < modes; ++i) {
                const int k = 1 + static_cast<int>(rng.uniform(0, N));
                v[k] += std::polar(std::pow(10.0, rng.uniform(-4, 0)), rng.uniform(0, 2 * M_PI));
            }
        }
        v *= c.z();
        scale_to(v, c.z() * r, 0, l);
        return v;
    };
    auto in = [](const Spectrum& v, double s, double l) {
        return [&v, s, l] { return json{{"s", s}, {"lambda", l}, {"v", spec_json(v)}}; };
    };
    c.row("compose_F_literal", "|F(v)|_{s,l} <= |v|_{s,l} for |v|_{0,l} < min{1, 1/K_s}, s in [0,2]",
          [&](CounterRng& rng, Acc& a) {
              double s, l, r;
              const double smax = 2.0;
              Spectrum v = draw(rng, smax, 0.99, s, l, r);
              const double cap = 0.99 / kappa_s(s);
              if (r > cap) v *= cap / r;
              a.add(wiener_norm(spectral::compose_F(v, 1.0), s, l), wiener_norm(v, s, l), 1.0, in(v, s, l));
          });
    c.row("compose_G_literal", "|G(v)|_{s,l} <= |v|_{s,l}/(1 - K_s|v|_{0,l}) for |v|_{0,l} < min{1, 1/K_s}",
          [&](CounterRng& rng, Acc& a) {
              double s, l, r;
              Spectrum v = draw(rng, 2.0, 0.99, s, l, r);
              const double cap = 0.99 / kappa_s(s);
              if (r > cap) v *= cap / r;
              const double r0 = wiener_norm(v, 0, l);
              a.add(wiener_norm(spectral::compose_G(v), s, l), wiener_norm(v, s, l) / (1 - kappa_s(s) * r0), 1.0,
                    in(v, s, l));
          });
    c.row("compose_F_majorant", "|F(v)|_{s,l} <= 3r(1-r^2)^{-5/2}|v|_{s,l}, r = |v|_{0,l} < 1, s in [0,1]",
          [&](CounterRng& rng, Acc& a) {
              double s, l, r;
              const Spectrum v = draw(rng, 1.0, 0.99, s, l, r);
              const double r0 = wiener_norm(v, 0, l);
              a.add(wiener_norm(spectral::compose_F(v, 1.0), s, l),
                    3 * r0 * std::pow(1 - r0 * r0, -2.5) * wiener_norm(v, s, l), 1.0, in(v, s, l));
          });
    c.row("compose_G_majorant", "|G(v)|_{s,l} <= |v|_{s,l}/(1-r)^2, r = |v|_{0,l} < 1, s in [0,1]",
          [&](CounterRng& rng, Acc& a) {
              double s, l, r;
              const Spectrum v = draw(rng, 1.0, 0.99, s, l, r);
              const double r0 = wiener_norm(v, 0, l);
              a.add(wiener_norm(spectral::compose_G(v), s, l), wiener_norm(v, s, l) / ((1 - r0) * (1 - r0)), 1.0,
                    in(v, s, l));
          });
    c.row("compose_G_dn", "|G(eps Lambda/tanh(Lambda) h)|_{s0} <= eps |h|_{s0+1}/(1 - eps|h|_1), s0 in {0,1}",
          [&](CounterRng& rng, Acc& a) {
              const int s0 = static_cast<int>(rng.uniform(0, 2));
              const double e = rng.uniform(0.01, 1);
              Spectrum h = c.z() * random_interface(rng, N, 1.0);
              scale_to(h, c.z() * rng.uniform(0.01, 0.95) / e, 1);
              const double h1 = wiener_norm(h, 1);
              a.add(wiener_norm(spectral::compose_G(e * spectral::dn_symbol(h)), s0),
                    e * wiener_norm(h, s0 + 1) / (1 - e * h1), 1.0,
                    [&] { return json{{"s0", s0}, {"eps", e}, {"h", spec_json(h)}}; });
          });
}

//==============================================================================
// Strip spaces
//==============================================================================

void strip_rows(Ctx& c) {
    const int N = 12, M = 64;
    auto field = [&](CounterRng& rng) { return c.z() * random_strip_forcing(rng, N, M, rng.uniform(0, 1)); };
    c.row("trace", "|v(., 0)|_{s,l} <= ||v||_{A^{s,1}_l}", [&](CounterRng& rng, Acc& a) {
        const double s = rng.uniform(0, 3), l = rng.uniform(0, 0.5);
        const StripField v = field(rng);
        a.add(wiener_norm(v.trace_top(), s, l), v.norm(s, 1, l), 1.0,
              [&] { return json{{"s", s}, {"lambda", l}, {"v", strip_to_json(v)}}; });
    });
    c.row("embedding", "sup_x2 |v(., x2)|_{s,l} <= ||v||_{A^{s,1}_l}", [&](CounterRng& rng, Acc& a) {
        const double s = rng.uniform(0, 3), l = rng.uniform(0, 0.5);
        const StripField v = field(rng);
        a.add(v.sup_slice_norm(s, l), v.norm(s, 1, l), 1.0,
              [&] { return json{{"s", s}, {"lambda", l}, {"v", strip_to_json(v)}}; });
    });
    c.row("strip_product", "||fg||_{A^{s,1}} <= 2K_s(||f||_{A^{s,1}}||g||_{A^{0,1}} + ||f||_{A^{0,1}}||g||_{A^{s,1}})",
          [&](CounterRng& rng, Acc& a) {
              const double s = rng.uniform(0, 3), l = rng.uniform(0, 0.5);
              const StripField f = field(rng), g = field(rng);
              const double base = f.norm(s, 1, l) * g.norm(0, 1, l) + f.norm(0, 1, l) * g.norm(s, 1, l);
              const double k = 2 * kappa_s(s);
              a.add(geometry::product(f, g).norm(s, 1, l), k * base, k, [&] {
                  return json{{"s", s}, {"lambda", l}, {"f", strip_to_json(f)}, {"g", strip_to_json(g)}};
              });
          });
    c.row("strip_product_s0", "||fg||_{A^{0,1}} <= 2 ||f||_{A^{0,1}} ||g||_{A^{0,1}}", [&](CounterRng& rng, Acc& a) {
        const double l = rng.uniform(0, 0.5);
        const StripField f = field(rng), g = field(rng);
        a.add(geometry::product(f, g).norm(0, 1, l), 2 * f.norm(0, 1, l) * g.norm(0, 1, l), 2.0, [&] {
            return json{{"lambda", l}, {"f", strip_to_json(f)}, {"g", strip_to_json(g)}};
        });
    });
}

//==============================================================================
// Elliptic estimates and kernel integrals
//==============================================================================

// per-mode int |profile| dx2 with the strip quadrature
double mode_integral(const StripField& f, int n, bool dz, const std::vector<double>& w) {
    double s = 0.0;
    for (int j = 0; j < f.nodes(); ++j) s += w[j] * std::abs(dz ? f.dz(j, n) : f.val(j, n));
    return s;
}

void elliptic_rows(Ctx& c) {
    const int N = 16, M = 32;
    const auto w = geometry::quadrature_weights(M);
    auto in = [](const StripField& g1, const StripField& g2, double d) {
        return [&g1, &g2, d] { return json{{"delta", d}, {"g1", strip_to_json(g1)}, {"g2", strip_to_json(g2)}}; };
    };
    c.row("elliptic_13", "||grad_delta phi||_{A^{s,1}} <= 13 ||g||_{A^{s,1}}, s in {0,1}", [&](CounterRng& rng, Acc& a) {
        const double s = static_cast<int>(rng.uniform(0, 2)), d = rng.uniform(0.01, 1.0);
        const StripField g1 = c.z() * random_strip_forcing(rng, N, M, rng.uniform(0, 1));
        const StripField g2 = c.z() * random_strip_forcing(rng, N, M, rng.uniform(0, 1));
        const auto sol = potentials::solve_poisson_green(g1, g2, d);
        a.add(sol.norm(s), 13.0 * (g1.norm(s, 1) + g2.norm(s, 1)), 13.0, in(g1, g2, d));
    });
    // per-mode intermediate constants for the two halves of the forcing, k >= 1
    struct Part {
        const char* id;
        const char* formula;
        bool first;    // forcing in g1 (else g2)
        bool mixed;    // sqrt(delta) d1 d2 phi (else d2^2 phi)
        double c;
    };
    const Part parts[] = {
        {"elliptic_d22_g1", "int |d2^2 phi(k)| <= 11/2 int |d2 g1(k)| (g2 = 0)", true, false, 5.5},
        {"elliptic_d22_g2", "int |d2^2 phi(k)| <= 11/2 int |d2 g2(k)| (g1 = 0)", false, false, 5.5},
        {"elliptic_d12_g1", "sqrt(delta) int |d1 d2 phi(k)| <= 15/2 int |d2 g1(k)| (g2 = 0)", true, true, 7.5},
        {"elliptic_d12_g2", "sqrt(delta) int |d1 d2 phi(k)| <= 9/2 int |d2 g2(k)| (g1 = 0)", false, true, 4.5},
    };
    for (const auto& pt : parts) {
        c.row(pt.id, pt.formula, [&](CounterRng& rng, Acc& a) {
            const double d = rng.uniform(0.01, 1.0);
            const StripField g = c.z() * random_strip_forcing(rng, N, M, rng.uniform(0, 1));
            const StripField zero(N, M);
            const auto sol = pt.first ? potentials::solve_poisson_green(g, zero, d)
                                      : potentials::solve_poisson_green(zero, g, d);
            const StripField& out = pt.mixed ? sol.grad1 : sol.grad2;
            double lhs = 0.0, rhs = 0.0, best = -1.0;
            for (int k = 1; k <= N; ++k) {
                const double l = mode_integral(out, k, true, w), r = pt.c * mode_integral(g, k, true, w);
                const double ratio = r > 0.0 ? l / r : (l > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
                if (ratio > best) {
                    best = ratio;
                    lhs = l;
                    rhs = r;
                }
            }
            a.add(lhs, rhs, pt.c, [&] { return json{{"delta", d}, {"g", strip_to_json(g)}}; });
        });
    }
}

void kernel_rows(Ctx& c) {
    // both rows share one kappa sequence and one quadrature per kappa
    const double pinned[] = {0.1, 1.0, 10.0, 100.0};
    CounterRng krng(row_seed(c.opt.seed, 1000));
    std::vector<double> kappas;
    std::vector<std::vector<potentials::KernelBoundRow>> cache;
    for (int which : {1, 2}) {
        const std::string id = which == 1 ? "kernel_pi1" : "kernel_pi2";
        const std::string formula = which == 1 ? "max_y int |dx^j dy^l Pi_1| dx2 <= 2 kappa^{j+l-1}, j,l <= 2, j+l <= 3"
                                               : "max_y int |dx^j dy^l Pi_2| dx2 <= 5/2 kappa^{j+l-1}, j,l <= 2, j+l <= 3";
        const double cst = which == 1 ? 2.0 : 2.5;
        size_t t = 0;
        c.row(id, formula, [&](CounterRng&, Acc& a) {
            if (t == cache.size()) {
                kappas.push_back(t < 4 ? pinned[t] : std::pow(10.0, krng.uniform(-1, 2)));
                cache.push_back(potentials::kernel_integral_bounds(kappas.back(), false));
            }
            const double kappa = kappas[t];
            for (const auto& r : cache[t]) {
                const double lhs = which == 1 ? r.pi1 : r.pi2;
                const double rhs = which == 1 ? r.bound1 : r.bound2;
                a.add(lhs, rhs, cst, [&] { return json{{"kappa", kappa}, {"j", r.j}, {"l", r.l}}; });
            }
            ++t;
        });
    }
}

//==============================================================================
// Potentials, ALE coefficients and nonlinear terms
//==============================================================================

DimensionlessParams lab_params(CounterRng& rng, int N, int M) {
    // stable regime nu sqrt(delta) > 1, sqrt(delta) < 1
    const double delta = rng.uniform(0.05, 0.9);
    const double sd = std::sqrt(delta);
    const double nu = rng.uniform(1.05, 10.0) / sd;
    auto p = DimensionlessParams::from_eps_delta_nu(rng.uniform(0.02, 0.5), delta, nu);
    p.N = N;
    p.M = M;
    return p;
}

json params_json(const DimensionlessParams& p) {
    return {{"eps", p.eps}, {"delta", p.delta}, {"nu", p.nu}, {"N", p.N}, {"M", p.M}};
}

void potential_rows(Ctx& c) {
    const int N = 16, M = 32;
    auto in = [](const DimensionlessParams& p, const Spectrum& h, json extra) {
        extra["params"] = params_json(p);
        extra["h"] = spec_json(h);
        return extra;
    };
    c.row("phi1_est", "||phi1||_{A^{s0,j}} <= 2 delta^{(j-1)/2} K_{s0+j-1}[nu alpha(1+2alpha|h|_1)|h|_{s0+j+1} + eps|h|_{s0+j-1}]",
          [&](CounterRng& rng, Acc& a) {
              const auto p = lab_params(rng, N, M);
              const int j = 1 + static_cast<int>(rng.uniform(0, 2));
              const double s0 = rng.uniform(0, 2);
              Spectrum h = c.z() * random_interface(rng, N, 1.0);
              scale_to(h, c.z() * rng.uniform(1e-4, 1.0), 1);
              const double lhs = potentials::phi1_field(h, p, j).norm(s0, 0);
              const double k = 2 * std::pow(p.delta, 0.5 * (j - 1)) * kappa_s(s0 + j - 1);
              a.add(lhs, k * pressure_bound(h, p, s0 + j + 1, s0 + j - 1), k,
                    [&] { return in(p, h, {{"j", j}, {"s0", s0}}); });
          });
    c.row("phi1_trace", "|d1 phi1|_s, |d2 phi1|_s/sqrt(delta) <= 2K_{s+1}[nu alpha(1+2alpha|h|_1)|h|_{s+3} + eps|h|_{s+1}]",
          [&](CounterRng& rng, Acc& a) {
              const auto p = lab_params(rng, N, M);
              const double s = rng.uniform(0, 2);
              Spectrum h = c.z() * random_interface(rng, N, 1.0);
              scale_to(h, c.z() * rng.uniform(1e-4, 1.0), 1);
              const auto tr = potentials::phi1_traces(h, p);
              const double k = 2 * kappa_s(s + 1), b = pressure_bound(h, p, s + 3, s + 1);
              auto inp = [&] { return in(p, h, {{"s", s}}); };
              a.add(wiener_norm(tr[0], s), k * b, k, inp);
              a.add(wiener_norm(tr[1], s), k * p.sqrt_delta() * b, k, inp);
          });
    c.row("Q_bound", "||Q(grad sigma)||_{A^{s,1}} <= 10 |h|_{s+1}, s in [0,1], |h|_1 < 1/(4 K_s eps)",
          [&](CounterRng& rng, Acc& a) {
              const auto p = lab_params(rng, N, M);
              const double s = rng.uniform(0, 1);
              Spectrum h = c.z() * random_interface(rng, N, 1.0);
              scale_to(h, c.z() * rng.uniform(0.01, 0.99) / (4 * kappa_s(s) * p.eps), 1);
              const auto A = geometry::ale_matrices(h, p.eps, p.delta, M);
              const double q = A.Q11.norm(s, 1) + 2 * A.Q12.norm(s, 1) + A.Q22.norm(s, 1);
              a.add(q, 10 * wiener_norm(h, s + 1), 10.0, [&] { return in(p, h, {{"s", s}}); });
          });
    // phi2: c0 = 260 eps |h|_1/sqrt(delta) is the smallest admissible c0; c0 < 1/(2 K_s sqrt(delta))
    c.row("phi2_est", "||grad_delta phi2||_{A^{s,1}}, |d2 phi2|_s <= 8 c0 delta (K_{s+1}+2)[nu alpha(1+2alpha|h|_1)|h|_{s+3} + eps|h|_{s+1}]",
          [&](CounterRng& rng, Acc& a) {
              const auto p = lab_params(rng, N, M);
              const double s = rng.uniform(0, 1);
              Spectrum h = c.z() * random_interface(rng, N, 1.0);
              scale_to(h, c.z() * rng.uniform(0.01, 0.99) / (520 * kappa_s(s) * p.eps), 1);
              const double c0 = 260 * p.eps * wiener_norm(h, 1) / p.sqrt_delta();
              const auto sol = potentials::solve_phi2(h, p);
              const double k = 8 * c0 * p.delta * (kappa_s(s + 1) + 2);
              const double b = pressure_bound(h, p, s + 3, s + 1);
              auto inp = [&] { return in(p, h, {{"s", s}, {"c0", c0}}); };
              a.add(sol.norm(s), k * b, 8.0, inp);
              a.add(wiener_norm(sol.trace_d2, s), k * b, 8.0, inp);
          });
    c.row("pullback", "|A_1^k d_k w|_s and |A_2^2 d2 w|_s bounded by the transport pullback estimates",
          [&](CounterRng& rng, Acc& a) {
              const double e = rng.uniform(0.02, 0.5);
              const double s = rng.uniform(0, 2), ks = kappa_s(s);
              Spectrum h = c.z() * random_interface(rng, N, 1.0);
              scale_to(h, c.z() * rng.uniform(0.01, 0.45) / (ks * e), 1);
              Spectrum w1 = c.z() * random_spectrum(rng, N, rng.uniform(0, 1));
              w1[0] = 0.0;
              const Spectrum w2 = c.z() * random_spectrum(rng, N, rng.uniform(0, 1));
              const auto T = geometry::trace_a_direct(h, e);
              const double h1 = wiener_norm(h, 1), hs1 = wiener_norm(h, s + 1);
              const double w2s = wiener_norm(w2, s), w20 = wiener_norm(w2, 0);
              const double B = 1 + 2 * e * h1 / (1 - e * h1);
              const double rhs1 = wiener_norm(w1, s) + (1 + e * B * h1) * w2s +
                                  ks * e * (1 + e * h1 * (1 / (1 - e * h1) + 1 / (1 - ks * e * h1))) * hs1 * w20;
              const double rhs2 = (1 + e / (1 - e * h1) * h1) * w2s + e / (1 - ks * e * h1) * hs1 * w20;
              auto inp = [&] {
                  return json{{"eps", e}, {"s", s}, {"h", spec_json(h)}, {"d1w", spec_json(w1)}, {"d2w", spec_json(w2)}};
              };
              a.add(wiener_norm(w1 + spectral::product(T.A12, w2), s), rhs1, 1.0, inp);
              a.add(wiener_norm(spectral::product(T.A22, w2), s), rhs2, 1.0, inp);
          });
}

void nonlinear_rows(Ctx& c) {
    const int N = 16, M = 32;
    // one draw feeds all three rows so the trial cost is a single nonlinear evaluation
    struct Draw {
        DimensionlessParams p;
        Spectrum h;
        evolution::RhsTerms t;
    };
    auto draw = [&](CounterRng& rng) {
        Draw d;
        d.p = lab_params(rng, N, M);
        d.h = c.z() * random_interface(rng, N, 1.0);
        scale_to(d.h, c.z() * rng.uniform(0.01, 0.99) * theorem_threshold(d.p), 1);
        d.t = evolution::nonlinear_terms(d.h, d.p);
        return d;
    };
    auto in = [](const Draw& d) { return json{{"params", params_json(d.p)}, {"h", spec_json(d.h)}}; };
    c.row("N_h", "|N_h|_1 <= 2 sqrt(delta) nu alpha |h|_1((1+alpha)eps/(1-eps|h|_1) + alpha)|h|_4 (sqrt(delta) prefactor)",
          [&](CounterRng& rng, Acc& a) {
              const Draw d = draw(rng);
              const auto& p = d.p;
              const double h1 = wiener_norm(d.h, 1);
              const Spectrum nh = (p.sqrt_delta() * p.eps) * d.t.n_h;
              const double rhs = 2 * p.sqrt_delta() * p.nu * p.alpha * h1 *
                                 ((1 + p.alpha) * p.eps / (1 - p.eps * h1) + p.alpha) * wiener_norm(d.h, 4);
              a.add(wiener_norm(nh, 1), rhs, 2.0, [&] { return in(d); });
          });
    c.row("N_phi1", "|N_phi1|_1 <= 2 sqrt(delta)[2 + sqrt(delta)(5 + 7 eps B |h|_1)]|h|_1 [nu alpha(1+2alpha|h|_1)|h|_4 + eps|h|_2]",
          [&](CounterRng& rng, Acc& a) {
              const Draw d = draw(rng);
              const auto& p = d.p;
              const double h1 = wiener_norm(d.h, 1), sd = p.sqrt_delta();
              const double B = 1 + 2 * p.eps * h1 / (1 - p.eps * h1);
              const double rhs = 2 * sd * (2 + sd * (5 + 7 * p.eps * B * h1)) * h1 * pressure_bound(d.h, p, 4, 2);
              a.add(wiener_norm(d.t.n_phi1, 1), rhs, 2.0, [&] { return in(d); });
          });
    c.row("N_phi2", "|N_phi2|_1 <= 48 c0 sqrt(delta){(1/eps)(1 + 2eps|h|_1/(1-eps|h|_1)) + 2 delta|h|_1(1 + 2 eps|h|_1 B)}[...]_4,2",
          [&](CounterRng& rng, Acc& a) {
              const Draw d = draw(rng);
              const auto& p = d.p;
              const double h1 = wiener_norm(d.h, 1), sd = p.sqrt_delta();
              const double c0 = 260 * p.eps * h1 / sd;
              const double B = 1 + 2 * p.eps * h1 / (1 - p.eps * h1);
              const double brace = (1 / p.eps) * B + 2 * p.delta * h1 * (1 + 2 * p.eps * h1 * B);
              const double rhs = 48 * c0 * sd * brace * pressure_bound(d.h, p, 4, 2);
              a.add(wiener_norm(d.t.n_phi2, 1), rhs, 48.0, [&] { return json{{"c0", c0}, {"input", in(d)}}; });
          });
}

}  // namespace

LabReport constants_lab(const LabOptions& opt) {
    if (opt.trials < 1) throw std::invalid_argument("constants_lab: trials must be at least 1");
    LabReport rep;
    rep.seed = opt.seed;
    Ctx c{opt, rep};
    spectral_rows(c);
    composition_rows(c);
    strip_rows(c);
    elliptic_rows(c);
    kernel_rows(c);
    potential_rows(c);
    nonlinear_rows(c);
    return rep;
}

void write_lab_csv(std::ostream& os, const LabReport& r) {
    os << "# seed=" << r.seed << "\n";
    os << "inequality_id,paper_ref,trials,max_ratio,empirical_constant\n";
    os.precision(17);
    for (const auto& row : r.rows) {
        std::string f = row.formula;
        std::replace(f.begin(), f.end(), '"', '\'');
        os << row.id << ",\"" << f << "\"," << row.trials << "," << row.max_ratio << "," << row.empirical_constant
           << "\n";
    }
}

json counterexample_bundle(const LabReport& r) {
    json out = {{"seed", r.seed}, {"violations", json::array()}};
    for (const auto& v : r.violations) {
        std::string formula;
        long count = 0;
        for (const auto& row : r.rows)
            if (row.id == v.id) {
                formula = row.formula;
                count = row.violations;
            }
        out["violations"].push_back({{"inequality_id", v.id},
                                     {"inequality", formula},
                                     {"violating_trials", count},
                                     {"trial", v.trial},
                                     {"row_seed", v.row_seed},
                                     {"lhs", v.lhs},
                                     {"rhs", v.rhs},
                                     {"ratio", v.ratio},
                                     {"inputs", v.inputs}});
    }
    return out;
}

void enforce(const LabReport& r, const std::string& bundle_path) {
    if (r.ok()) return;
    std::ofstream f(bundle_path);
    f << counterexample_bundle(r).dump(1) << "\n";
    std::string ids;
    for (const auto& v : r.violations) ids += (ids.empty() ? "" : ", ") + v.id;
    throw InequalityViolation("inequality violated: " + ids, bundle_path);
}

}  // namespace muskat::analysis
