/**
 * @file params.hpp
 * @brief Dimensionless run configuration shared by the potentials, evolution and analysis code.
 */
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace muskat::evolution {

struct DimensionlessParams {
    double eps = 0.1;    // nonlinearity a/H
    double delta = 0.25; // shallowness H^2/L^2
    double nu = 4.0;     // Bond number
    double alpha = 0.05; // steepness a/L, always eps*sqrt(delta)
    double mu = 0.0;     // growth rate of the analyticity weight
    int N = 64;          // Fourier cutoff
    int M = 64;          // vertical intervals
    double dt = 1e-3;
    double T_final = 1.0;

    double phi2_tol = 1e-10;
    int phi2_max_iter = 200;

    bool linear_only = false;
    bool override_smallness = false;
    bool mu_wide_range = false;  // accept mu < (sqrt(delta)/4)(nu sqrt(delta) - 1)

    static DimensionlessParams reference();
    static DimensionlessParams from_eps_delta_nu(double eps, double delta, double nu);

    double sqrt_delta() const;
    // (sqrt(delta)/16)(nu sqrt(delta) - 1)
    double decay_rate() const;
    double mu_limit() const;
    bool stable_regime() const;
    bool mu_in_range() const;

    // Throws ConfigError on violated hard constraints.
    void validate() const;
    // Names of violated theorem hypotheses (empty when all hold).
    std::vector<std::string> hypothesis_flags() const;
};

nlohmann::json to_json(const DimensionlessParams& p);
// Strict: unknown keys are rejected. alpha, when present, must equal eps*sqrt(delta).
DimensionlessParams params_from_json(const nlohmann::json& j);

}  // namespace muskat::evolution
