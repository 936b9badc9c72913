//==============================================================================
// test_lab.cpp
//
// Constants lab: determinism, trivial inputs, bundles and the row verdicts.
//==============================================================================
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "muskat/errors.hpp"
#include "muskat/lab.hpp"

using namespace muskat;
using analysis::LabOptions;
using spectral::Spectrum;

TEST_CASE("lab rejects zero trials") {
    LabOptions o;
    o.trials = 0;
    CHECK_THROWS_AS(analysis::constants_lab(o), std::invalid_argument);
}

TEST_CASE("zero inputs give zero ratios") {
    LabOptions o;
    o.trials = 1;
    o.zero_inputs = true;
    const auto r = analysis::constants_lab(o);
    CHECK(r.ok());
    for (const auto& row : r.rows) {
        if (row.id.rfind("kernel", 0) == 0) continue;
        INFO(row.id);
        CHECK(row.max_ratio == 0.0);
    }
}

TEST_CASE("lab is deterministic for a fixed seed") {
    LabOptions o;
    o.trials = 5;
    o.seed = 99;
    o.only = {"product_rule", "pullback", "N_phi1", "elliptic_13"};
    std::ostringstream a, b;
    analysis::write_lab_csv(a, analysis::constants_lab(o));
    analysis::write_lab_csv(b, analysis::constants_lab(o));
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("# seed=99\ninequality_id,paper_ref,trials,max_ratio,empirical_constant\n", 0) == 0);
    o.seed = 100;
    std::ostringstream c;
    analysis::write_lab_csv(c, analysis::constants_lab(o));
    CHECK(a.str() != c.str());
}

TEST_CASE("proven rows hold on a short battery") {
    LabOptions o;
    o.trials = 30;
    o.seed = 5;
    const auto r = analysis::constants_lab(o);
    for (const auto& row : r.rows) {
        if (row.id == "compose_F_literal" || row.id == "compose_G_literal") continue;
        INFO(row.id << " max ratio " << row.max_ratio);
        CHECK(row.violations == 0);
        CHECK(row.max_ratio <= 1.0 + analysis::kLabSlack);
        CHECK(row.trials >= 30);
    }
    CHECK(r.get("elliptic_13").empirical_constant < 13.0);
}

TEST_CASE("literal G composition bound is violated and bundled") {
    LabOptions o;
    o.trials = 300;
    o.seed = 1;
    o.only = {"compose_G_literal"};
    const auto r = analysis::constants_lab(o);
    REQUIRE_FALSE(r.ok());
    const auto& v = r.violations.front();
    CHECK(v.ratio > 1.0);
    CHECK(v.inputs.contains("v"));

    // the bundled input reproduces the violation
    const Spectrum w = spectral::spectrum_from_json(v.inputs["v"]);
    const double s = v.inputs["s"], l = v.inputs["lambda"];
    const double r0 = spectral::wiener_norm(w, 0, l);
    const double lhs = spectral::wiener_norm(spectral::compose_G(w), s, l);
    CHECK(lhs == doctest::Approx(v.lhs).epsilon(1e-12));
    CHECK(lhs > spectral::wiener_norm(w, s, l) / (1 - spectral::kappa_s(s) * r0));

    const auto path = std::filesystem::temp_directory_path() / "lab_bundle_test.json";
    try {
        analysis::enforce(r, path.string());
        FAIL("enforce did not throw");
    } catch (const InequalityViolation& e) {
        CHECK(e.bundle_path == path.string());
    }
    std::ifstream f(path);
    const auto j = nlohmann::json::parse(f);
    CHECK(j["seed"] == 1);
    CHECK(j["violations"][0]["inequality_id"] == "compose_G_literal");
    std::filesystem::remove(path);
}
