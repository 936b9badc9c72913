/**
 * @file params.cpp
 * @brief Validation and JSON mapping of the dimensionless parameters.
 */
#include "muskat/params.hpp"

#include <cmath>
#include <set>

#include "muskat/errors.hpp"

namespace muskat::evolution {

DimensionlessParams DimensionlessParams::reference() { return DimensionlessParams{}; }

DimensionlessParams DimensionlessParams::from_eps_delta_nu(double eps, double delta, double nu) {
    DimensionlessParams p;
    p.eps = eps;
    p.delta = delta;
    p.nu = nu;
    p.alpha = eps * std::sqrt(delta);
    return p;
}

double DimensionlessParams::sqrt_delta() const { return std::sqrt(delta); }

double DimensionlessParams::decay_rate() const { return sqrt_delta() / 16.0 * (nu * sqrt_delta() - 1.0); }

double DimensionlessParams::mu_limit() const {
    const double c = mu_wide_range ? 4.0 : 16.0;
    return sqrt_delta() / c * (nu * sqrt_delta() - 1.0);
}

bool DimensionlessParams::stable_regime() const { return nu * sqrt_delta() > 1.0 && sqrt_delta() < 1.0; }

bool DimensionlessParams::mu_in_range() const { return mu == 0.0 || mu < mu_limit(); }

void DimensionlessParams::validate() const {
    auto fail = [](const std::string& m) { throw ConfigError(m); };
    if (!(eps > 0.0 && eps <= 1.0)) fail("eps must lie in (0, 1]");
    if (!(delta > 0.0 && delta <= 1.0)) fail("delta must lie in (0, 1]");
    if (!(nu > 0.0)) fail("nu must be positive");
    if (std::abs(alpha - eps * std::sqrt(delta)) > 1e-12 * std::max(1.0, alpha))
        fail("alpha must equal eps*sqrt(delta)");
    if (!(mu >= 0.0)) fail("mu must be nonnegative");
    if (N < 1) fail("N must be at least 1");
    if (M < 2) fail("M must be at least 2");
    if (!(dt > 0.0)) fail("dt must be positive");
    if (!(T_final >= 0.0)) fail("T_final must be nonnegative");
    if (!(phi2_tol > 0.0) || phi2_max_iter < 1) fail("phi2 tolerance and iteration cap must be positive");
}

std::vector<std::string> DimensionlessParams::hypothesis_flags() const {
    std::vector<std::string> f;
    if (!(nu > 1.0)) f.push_back("nu<=1");
    if (!stable_regime()) f.push_back("sqrt(delta) outside (1/nu, 1)");
    if (!mu_in_range()) f.push_back("mu outside theorem range");
    return f;
}

nlohmann::json to_json(const DimensionlessParams& p) {
    return {{"eps", p.eps},
            {"delta", p.delta},
            {"nu", p.nu},
            {"alpha", p.alpha},
            {"mu", p.mu},
            {"N", p.N},
            {"M", p.M},
            {"dt", p.dt},
            {"T_final", p.T_final},
            {"phi2_tol", p.phi2_tol},
            {"phi2_max_iter", p.phi2_max_iter},
            {"linear_only", p.linear_only},
            {"override_smallness", p.override_smallness},
            {"mu_wide_range", p.mu_wide_range}};
}

DimensionlessParams params_from_json(const nlohmann::json& j) {
    static const std::set<std::string> keys = {"eps", "delta", "nu", "alpha", "mu", "N", "M",
                                               "dt", "T_final", "phi2_tol", "phi2_max_iter",
                                               "linear_only", "override_smallness", "mu_wide_range"};
    if (!j.is_object()) throw ConfigError("params must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!keys.count(it.key())) throw ConfigError("unknown params key: " + it.key());
    DimensionlessParams p;
    try {
        p.eps = j.value("eps", p.eps);
        p.delta = j.value("delta", p.delta);
        p.nu = j.value("nu", p.nu);
        p.alpha = j.contains("alpha") ? j.at("alpha").get<double>() : p.eps * std::sqrt(p.delta);
        p.mu = j.value("mu", p.mu);
        p.N = j.value("N", p.N);
        p.M = j.value("M", p.M);
        p.dt = j.value("dt", p.dt);
        p.T_final = j.value("T_final", p.T_final);
        p.phi2_tol = j.value("phi2_tol", p.phi2_tol);
        p.phi2_max_iter = j.value("phi2_max_iter", p.phi2_max_iter);
        p.linear_only = j.value("linear_only", p.linear_only);
        p.override_smallness = j.value("override_smallness", p.override_smallness);
        p.mu_wide_range = j.value("mu_wide_range", p.mu_wide_range);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad params value: ") + e.what());
    }
    p.validate();
    return p;
}

}  // namespace muskat::evolution
