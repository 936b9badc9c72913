//==============================================================================
// lab.hpp
//
// Constants lab: random-trial verification of the norm inequalities used by
// the decay argument. Each row draws admissible inputs, evaluates both sides
// and records the largest observed ratio lhs/rhs (must stay <= 1 up to a
// 1e-12 relative slack) and the sharpest constant seen.
//==============================================================================
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "muskat/analysis.hpp"
#include "muskat/geometry.hpp"

namespace muskat::analysis {

struct LabRow {
    std::string id;
    std::string formula;
    long trials = 0;
    double max_ratio = 0.0;
    double empirical_constant = 0.0;  // max lhs / (rhs / stated constant)
    long violations = 0;
};

struct LabViolation {
    std::string id;
    long trial = 0;
    uint64_t row_seed = 0;
    double lhs = 0.0, rhs = 0.0, ratio = 0.0;
    nlohmann::json inputs;
};

struct LabOptions {
    uint64_t seed = 1;
    long trials = 1000;
    bool zero_inputs = false;  // every function input is 0 (kernel rows are unaffected)
    std::vector<std::string> only;  // restrict to these row ids when nonempty
};

struct LabReport {
    uint64_t seed = 0;
    std::vector<LabRow> rows;
    std::vector<LabViolation> violations;  // worst trial of each violating row
    bool ok() const { return violations.empty(); }
    const LabRow& get(const std::string& id) const;
};

constexpr double kLabSlack = 1e-12;

// Throws std::invalid_argument when trials < 1.
LabReport constants_lab(const LabOptions& opt);

// inequality_id,paper_ref,trials,max_ratio,empirical_constant (seed in a leading comment line)
void write_lab_csv(std::ostream& os, const LabReport& r);
nlohmann::json counterexample_bundle(const LabReport& r);
// Writes the bundle to path and throws InequalityViolation when the report has violations.
void enforce(const LabReport& r, const std::string& bundle_path);

// Profiles c1 y + c2 y^2 + c3 y^3, y = 1 + x2, with |c| <= e^{-decay n}: vanish at the bottom.
geometry::StripField random_strip_forcing(CounterRng& rng, int N, int M, double decay);
// Random real spectrum with a mean: v(n) uniform in the unit box times e^{-decay n}.
Spectrum random_spectrum(CounterRng& rng, int N, double decay);

nlohmann::json strip_to_json(const geometry::StripField& f);

}  // namespace muskat::analysis
