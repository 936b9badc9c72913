//==============================================================================
// test_cli.cpp
//
// Config parsing, checkpoints and the run/sweep/verify/convert/radius drivers.
//==============================================================================
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "muskat/commands.hpp"
#include "muskat/errors.hpp"

using namespace muskat;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("muskat_cli_" + std::to_string(::getpid())) / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

json small_config(const fs::path& out) {
    return {{"params", {{"N", 16}, {"M", 32}, {"dt", 0.01}, {"T_final", 1.0}}},
            {"initial", {{"modes", {{1, 2e-4, 0.0}, {2, 0.0, 1e-4}}}}},
            {"output_dir", out.string()},
            {"output_every", 5}};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

std::vector<std::vector<double>> ledger_rows(const fs::path& p) {
    std::ifstream f(p);
    std::string line;
    std::vector<std::vector<double>> rows;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 't') continue;
        std::vector<double> r;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) r.push_back(std::stod(cell));
        rows.push_back(r);
    }
    return rows;
}

}  // namespace

TEST_CASE("run config is strict") {
    const json good = small_config("x");
    CHECK_NOTHROW(cli::run_config_from_json(good));

    json j = good;
    j["colour"] = 1;
    CHECK_THROWS_AS(cli::run_config_from_json(j), ConfigError);
    j = good;
    j["params"]["nuu"] = 4;
    CHECK_THROWS_AS(cli::run_config_from_json(j), ConfigError);
    j = good;
    j["initial"]["rough"] = {{"norm1", 1e-4}};
    CHECK_THROWS_AS(cli::run_config_from_json(j), ConfigError);
    j = good;
    j["initial"] = json::object();
    CHECK_THROWS_AS(cli::run_config_from_json(j), ConfigError);
    j = good;
    j.erase("initial");
    CHECK_THROWS_AS(cli::run_config_from_json(j), ConfigError);
    j = good;
    j["output_every"] = 0;
    CHECK_THROWS_AS(cli::run_config_from_json(j), ConfigError);
    j = good;
    j["initial"] = {{"modes", {{17, 1e-4, 0.0}}}};
    CHECK_THROWS_AS(cli::run_config_from_json(j), ConfigError);
    j = good;
    j["initial"] = {{"rough", {{"norm1", 1e-4}, {"sed", 3}}}};
    CHECK_THROWS_AS(cli::run_config_from_json(j), ConfigError);

    // physical parameters supply eps, delta, nu
    j = good;
    j["physical"] = {{"H", 0.5}, {"L", 1.0}, {"a", 0.05}, {"gamma", 2.0}};
    const auto c = cli::run_config_from_json(j);
    CHECK(c.params.eps == doctest::Approx(0.1));
    CHECK(c.params.delta == doctest::Approx(0.25));
    CHECK(c.params.nu == doctest::Approx(4.0));
    CHECK(c.params.alpha == doctest::Approx(0.05));
    j["params"]["eps"] = 0.2;
    CHECK_THROWS_AS(cli::run_config_from_json(j), ConfigError);

    // round trip
    const auto c2 = cli::run_config_from_json(cli::to_json(c));
    CHECK(c2.params.nu == c.params.nu);
    CHECK(c2.initial.modes == c.initial.modes);
}

TEST_CASE("checkpoint round trip") {
    const auto dir = scratch("ck");
    cli::Checkpoint ck;
    ck.params = evolution::DimensionlessParams::reference();
    ck.seed = 99;
    ck.integral4 = 0.125;
    ck.state.t = 0.3;
    ck.state.step = 300;
    ck.state.h = spectral::Spectrum::cosine(8, 2, 1e-3) + spectral::Spectrum::sine(8, 3, 2e-4);
    const auto path = (dir / "a.bin").string();
    cli::write_checkpoint(path, ck);
    const auto back = cli::read_checkpoint(path);
    CHECK(back.seed == 99);
    CHECK(back.integral4 == 0.125);
    CHECK(back.state.step == 300);
    CHECK_FALSE(back.state.warm.has_value());
    for (int n = 0; n <= 8; ++n) CHECK(back.state.h[n] == ck.state.h[n]);

    std::ofstream(dir / "bad.bin") << "not a checkpoint";
    CHECK_THROWS_AS(cli::read_checkpoint((dir / "bad.bin").string()), ConfigError);
    CHECK_THROWS_AS(cli::read_checkpoint((dir / "missing.bin").string()), ConfigError);
    // truncated payload
    const std::string full = slurp(path);
    std::ofstream(dir / "cut.bin", std::ios::binary) << full.substr(0, full.size() - 5);
    CHECK_THROWS_AS(cli::read_checkpoint((dir / "cut.bin").string()), ConfigError);
}

TEST_CASE("run: rest state, decay and exit codes") {
    std::ostringstream out, err;
    {
        json j = small_config(scratch("rest"));
        j["initial"] = {{"modes", json::array()}};
        const auto o = cli::execute_run(cli::run_config_from_json(j), err);
        CHECK(o.exit_code == 0);
        CHECK(o.summary["final"]["norm1"] == 0.0);
        CHECK(o.summary["final"]["energy"] == 0.0);
        CHECK(o.summary["verdict"] == "rest state");
    }
    {
        const auto dir = scratch("decay");
        const auto o = cli::execute_run(cli::run_config_from_json(small_config(dir)), err);
        CHECK(o.exit_code == 0);
        CHECK(o.summary["decay_rate_fit"].get<double>() >= 0.03125);
        CHECK(o.summary["energy_monotone"] == true);
        CHECK(o.summary["verdict"] == "decay theorem verified");
        CHECK(fs::exists(dir / "ledger.csv"));
        CHECK(fs::exists(dir / "summary.json"));
        CHECK(fs::exists(dir / "checkpoints" / "final.bin"));
        CHECK(slurp(dir / "ledger.csv").rfind("# seed=1 ", 0) == 0);
    }
    {
        // nu sqrt(delta) = 0.75 < 1, linear-only: growth at |L(1)|, still exit 0
        json j = small_config(scratch("unstable"));
        j["params"]["nu"] = 1.5;
        j["params"]["linear_only"] = true;
        j["params"]["T_final"] = 2.0;
        j["initial"] = {{"modes", {{1, 1e-6, 0.0}}}};
        const auto o = cli::execute_run(cli::run_config_from_json(j), err);
        CHECK(o.exit_code == 0);
        CHECK(o.summary["growth"] == true);
        CHECK(o.summary["verdict"] == "RT-unstable regime");
        CHECK(o.summary["decay_rate_fit"].get<double>() == doctest::Approx(-0.115529289315).epsilon(1e-6));
    }
    {
        // above the smallness threshold: config error unless overridden
        json j = small_config(scratch("big"));
        j["initial"] = {{"modes", {{1, 1e-2, 0.0}}}};
        CHECK(cli::cmd_run(cli::run_config_from_json(j), out, err) == cli::kExitConfig);
    }
    {
        // override with eps|h|_1 = 0.6: pinch-off, exit 3, partial outputs written
        const auto dir = scratch("pinch");
        json j = small_config(dir);
        j["params"]["override_smallness"] = true;
        j["initial"] = {{"modes", {{1, 3.0, 0.0}}}};
        CHECK(cli::cmd_run(cli::run_config_from_json(j), out, err) == cli::kExitRunFailure);
        const json s = json::parse(slurp(dir / "summary.json"));
        CHECK(s["status"] == "pinch-off");
        CHECK(fs::exists(dir / "ledger.csv"));
    }
}

TEST_CASE("identical config and seed give a bit-identical ledger") {
    json a = small_config(scratch("det_a"));
    json b = small_config(scratch("det_b"));
    a["initial"] = b["initial"] = {{"rough", {{"norm1", 3e-4}}}};
    a["seed"] = b["seed"] = 1234;
    std::ostringstream log;
    cli::execute_run(cli::run_config_from_json(a), log);
    cli::execute_run(cli::run_config_from_json(b), log);
    const std::string la = slurp(fs::path(a["output_dir"].get<std::string>()) / "ledger.csv");
    CHECK(la.size() > 100);
    CHECK(la == slurp(fs::path(b["output_dir"].get<std::string>()) / "ledger.csv"));
    CHECK(la.rfind("# seed=1234 ", 0) == 0);
}

TEST_CASE("resume from a checkpoint matches the uninterrupted run") {
    const auto full_dir = scratch("full");
    json j = small_config(full_dir);
    j["checkpoint_every"] = 50;
    std::ostringstream log;
    cli::execute_run(cli::run_config_from_json(j), log);
    const auto ck = full_dir / "checkpoints" / "ck_000000050.bin";
    REQUIRE(fs::exists(ck));
    CHECK(cli::read_checkpoint(ck.string()).state.warm.has_value());

    const auto res_dir = scratch("resumed");
    json r = small_config(res_dir);
    r["initial"] = {{"checkpoint", ck.string()}};
    const auto o = cli::execute_run(cli::run_config_from_json(r), log);
    CHECK(o.exit_code == 0);

    const auto full = ledger_rows(full_dir / "ledger.csv");
    const auto resumed = ledger_rows(res_dir / "ledger.csv");
    REQUIRE(resumed.size() == 11);
    REQUIRE(full.size() == 21);
    // columns t..radius compared; phi2 iterations of the first resumed row are not recomputed
    for (size_t i = 0; i < resumed.size(); ++i)
        for (size_t c = 0; c <= 8; ++c) {
            const double x = full[10 + i][c], y = resumed[i][c];
            CHECK(std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(x)));
        }

    // a mismatched configuration is rejected
    r["params"]["dt"] = 0.02;
    CHECK_THROWS_AS(cli::execute_run(cli::run_config_from_json(r), log), ConfigError);
}

TEST_CASE("sweep across the stability threshold") {
    const auto dir = scratch("sweep");
    json base = small_config(dir / "unused");
    base["params"]["linear_only"] = true;
    base["params"]["T_final"] = 0.5;
    base["initial"] = {{"modes", {{1, 1e-6, 0.0}}}};
    // nu = 4: sqrt(delta) = 0.2 is below 1/nu, 0.3 and 0.5 above
    const json sj = {{"base", base}, {"grid", {{"delta", {0.04, 0.09, 0.25}}, {"amplitude", {1e-6, 2e-6}}}},
                     {"output_dir", dir.string()}};
    const auto s = cli::sweep_config_from_json(sj);
    CHECK(cli::sweep_points(s).size() == 6);
    std::ostringstream out, err;
    CHECK(cli::cmd_sweep(s, out, err, 2) == 0);
    std::ifstream f(dir / "sweep.csv");
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(f, line))
        if (!line.empty() && line[0] != '#') lines.push_back(line);
    REQUIRE(lines.size() == 7);  // header + grid
    CHECK(lines[1].find("RT-unstable regime") != std::string::npos);
    CHECK(lines[2].find("RT-unstable regime") != std::string::npos);
    for (int i = 3; i <= 6; ++i) CHECK(lines[i].find("RT-unstable") == std::string::npos);
    CHECK(fs::exists(dir / "point_0005" / "summary.json"));

    // a one-point grid reproduces cmd_run
    json one = {{"base", small_config(dir / "unused")}, {"output_dir", (dir / "one").string()}};
    CHECK(cli::cmd_sweep(cli::sweep_config_from_json(one), out, err, 1) == 0);
    json single = small_config(dir / "single");
    cli::execute_run(cli::run_config_from_json(single), err);
    CHECK(slurp(dir / "one" / "point_0000" / "ledger.csv") == slurp(dir / "single" / "ledger.csv"));

    // failing points are recorded and the sweep continues
    json bad = sj;
    bad["grid"] = {{"amplitude", {1e-6, 1.0}}};
    bad["base"]["params"]["linear_only"] = false;
    bad["output_dir"] = (dir / "bad").string();
    CHECK(cli::cmd_sweep(cli::sweep_config_from_json(bad), out, err, 1) == cli::kExitRunFailure);
    CHECK(slurp(dir / "bad" / "sweep.csv").find("config-error") != std::string::npos);

    bad = sj;
    bad["grid"] = {{"nu", json::array()}};
    CHECK_THROWS_AS(cli::sweep_config_from_json(bad), ConfigError);
}

TEST_CASE("verify smoke run and convert/radius reports") {
    const auto dir = scratch("verify");
    cli::VerifyOptions o;
    o.trials = 1;
    o.seed = 5;
    o.output_dir = dir.string();
    std::ostringstream out, err;
    const int rc = cli::cmd_verify(o, out, err);
    CHECK((rc == 0 || rc == cli::kExitViolation));
    CHECK(fs::exists(dir / "constants.csv"));
    CHECK(fs::exists(dir / "kernel_bounds.csv"));
    CHECK(slurp(dir / "constants.csv").rfind("# seed=5", 0) == 0);
    CHECK((rc == cli::kExitViolation) == fs::exists(dir / "counterexamples.json"));
    o.trials = 0;
    CHECK(cli::cmd_verify(o, out, err) == cli::kExitConfig);

    const json rep = cli::convert_report(nondim::PhysicalParams{}, 1e-6);
    CHECK(rep["dimensionless"]["eps"].get<double>() == doctest::Approx(0.1));
    CHECK(rep["dimensionless"]["regime"] == "stable");
    CHECK(rep["dimensional_theorem"]["all_pass"] == true);
    CHECK(cli::cmd_convert({{"H", -1.0}}, 0.0, out, err) == cli::kExitConfig);
    CHECK(cli::cmd_convert({{"H", 0.5}, {"colour", 1}}, 0.0, out, err) == cli::kExitConfig);

    cli::Checkpoint ck;
    ck.params = evolution::DimensionlessParams::reference();
    ck.params.mu = 0.01;
    ck.state.t = 2.0;
    ck.state.h = spectral::Spectrum(32);
    for (int n = 1; n <= 32; ++n) ck.state.h[n] = std::exp(-0.4 * n);
    const json rr = cli::radius_report(ck);
    CHECK(rr["radius"].get<double>() == doctest::Approx(0.4).epsilon(1e-6));
    CHECK(rr["mu_t"].get<double>() == doctest::Approx(0.02));
    CHECK(rr["radius_at_least_mu_t"] == true);
    CHECK(cli::cmd_radius((dir / "none.bin").string(), out, err) == cli::kExitConfig);
}
