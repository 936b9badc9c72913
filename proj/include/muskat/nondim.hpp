/**
 * @file nondim.hpp
 * @brief Physical parameters, their dimensionless groups and the dimensional
 *        admissibility check.
 *
 * Units are documented, not enforced: lengths H, L, a; surface tension gamma
 * (force/length); density rho; gravity G; viscosity mu_visc; permeability kappa.
 * In a Hele-Shaw cell of gap d, mu_visc/kappa is replaced by 12 mu_visc/d^2.
 */
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "muskat/params.hpp"

namespace muskat::nondim {

struct PhysicalParams {
    double H = 0.5;
    double L = 1.0;
    double a = 0.05;
    double gamma = 10.0;
    double rho = 1.0;
    double G = 1.0;
    double mu_visc = 1.0;
    double kappa = 1.0;

    // Positivity and a <= H <= L; throws ConfigError.
    void validate() const;
};

struct Scales {
    double length = 0.0;     // L
    double height = 0.0;     // a
    double time = 0.0;       // mu_visc L/(rho kappa G)
    double potential = 0.0;  // H kappa rho G/mu_visc
};

struct Dimensionless {
    evolution::DimensionlessParams params;  // only eps, delta, nu, alpha are set
    Scales scales;
};

// eps = a/H, delta = H^2/L^2, nu = gamma/(H L rho G), alpha = a/L
Dimensionless to_dimensionless(const PhysicalParams& p);

// Inverse for given H, rho, G, mu_visc, kappa: L = H/sqrt(delta), a = eps H, gamma = nu H L rho G.
PhysicalParams from_dimensionless(const evolution::DimensionlessParams& d, double H, double rho = 1.0,
                                  double G = 1.0, double mu_visc = 1.0, double kappa = 1.0);

struct DimCondition {
    std::string name;
    double actual = 0.0;
    double threshold = 0.0;
    double margin = 0.0;  // threshold - actual
    bool pass = false;
};

struct DimensionalReport {
    std::vector<DimCondition> conditions;  // "capillary" (L^2 < gamma/(rho G)), "shallow" (H < L), "amplitude"
    double amplitude_bound = 0.0;          // min{(H^2/L^2)(gamma - L^2 rho G)/(C0 gamma), H}
    bool all_pass() const;
    const DimCondition& get(const std::string& name) const;
};

// h0_norm is the dimensional |h0| in A^1(L T), equal to (a/L) times the dimensionless norm.
DimensionalReport check_dimensional_theorem(const PhysicalParams& p, double h0_norm);

// (a/L) min{1/(C0 eps), 1}(nu sqrt(delta) - 1)/nu: the dimensionless threshold mapped back.
double dimensionless_bound_in_physical_units(const PhysicalParams& p);

nlohmann::json to_json(const PhysicalParams& p);
// Strict: unknown keys are rejected; validates.
PhysicalParams physical_from_json(const nlohmann::json& j);

}  // namespace muskat::nondim
