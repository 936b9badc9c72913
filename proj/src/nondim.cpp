/**
 * @file nondim.cpp
 * @brief Dimensionless groups and the dimensional theorem check.
 */
#include "muskat/nondim.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "muskat/analysis.hpp"
#include "muskat/errors.hpp"

namespace muskat::nondim {

void PhysicalParams::validate() const {
    for (double v : {H, L, a, gamma, rho, G, mu_visc, kappa})
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("physical parameters must be positive and finite");
    if (a > H) throw ConfigError("amplitude a exceeds depth H");
    if (H > L) throw ConfigError("depth H exceeds cell length L");
}

Dimensionless to_dimensionless(const PhysicalParams& p) {
    p.validate();
    Dimensionless d;
    d.params.eps = p.a / p.H;
    d.params.delta = (p.H * p.H) / (p.L * p.L);
    d.params.nu = p.gamma / (p.H * p.L * p.rho * p.G);
    d.params.alpha = p.a / p.L;
    d.scales.length = p.L;
    d.scales.height = p.a;
    d.scales.time = p.mu_visc * p.L / (p.rho * p.kappa * p.G);
    d.scales.potential = p.H * p.kappa * p.rho * p.G / p.mu_visc;
    return d;
}

PhysicalParams from_dimensionless(const evolution::DimensionlessParams& d, double H, double rho, double G,
                                  double mu_visc, double kappa) {
    PhysicalParams p;
    p.H = H;
    p.L = H / std::sqrt(d.delta);
    p.a = d.eps * H;
    p.rho = rho;
    p.G = G;
    p.gamma = d.nu * H * p.L * rho * G;
    p.mu_visc = mu_visc;
    p.kappa = kappa;
    p.validate();
    return p;
}

bool DimensionalReport::all_pass() const {
    return std::all_of(conditions.begin(), conditions.end(), [](const DimCondition& c) { return c.pass; });
}

const DimCondition& DimensionalReport::get(const std::string& name) const {
    for (const auto& c : conditions)
        if (c.name == name) return c;
    throw std::out_of_range("no condition named " + name);
}

DimensionalReport check_dimensional_theorem(const PhysicalParams& p, double h0_norm) {
    p.validate();
    DimensionalReport r;
    auto add = [&](const std::string& name, double actual, double threshold) {
        r.conditions.push_back({name, actual, threshold, threshold - actual, actual < threshold});
    };
    add("capillary", p.L * p.L, p.gamma / (p.rho * p.G));
    add("shallow", p.H, p.L);
    const double first = (p.H * p.H) / (p.L * p.L) * (p.gamma - p.L * p.L * p.rho * p.G) / (analysis::kC0 * p.gamma);
    r.amplitude_bound = std::min(first, p.H);
    add("amplitude", h0_norm, r.amplitude_bound);
    return r;
}

double dimensionless_bound_in_physical_units(const PhysicalParams& p) {
    const auto d = to_dimensionless(p).params;
    return p.a / p.L * analysis::theorem_threshold(d);
}

nlohmann::json to_json(const PhysicalParams& p) {
    return {{"H", p.H},         {"L", p.L},     {"a", p.a},
            {"gamma", p.gamma}, {"rho", p.rho}, {"G", p.G},
            {"mu_visc", p.mu_visc}, {"kappa", p.kappa}};
}

PhysicalParams physical_from_json(const nlohmann::json& j) {
    static const std::set<std::string> keys = {"H", "L", "a", "gamma", "rho", "G", "mu_visc", "kappa"};
    if (!j.is_object()) throw ConfigError("physical params must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!keys.count(it.key())) throw ConfigError("unknown physical key: " + it.key());
    PhysicalParams p;
    try {
        p.H = j.value("H", p.H);
        p.L = j.value("L", p.L);
        p.a = j.value("a", p.a);
        p.gamma = j.value("gamma", p.gamma);
        p.rho = j.value("rho", p.rho);
        p.G = j.value("G", p.G);
        p.mu_visc = j.value("mu_visc", p.mu_visc);
        p.kappa = j.value("kappa", p.kappa);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad physical value: ") + e.what());
    }
    p.validate();
    return p;
}

}  // namespace muskat::nondim
