/**
 * @file muskat_cli.cpp
 * @brief Command-line front end: run, verify, sweep, convert, radius.
 *
 * Flags override the matching fields of the JSON configuration; the merged
 * document is validated by the same strict parser as a config file.
 */
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "muskat/commands.hpp"
#include "muskat/errors.hpp"

using nlohmann::json;
namespace cli = muskat::cli;

namespace {

json load_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw muskat::ConfigError("cannot open " + path);
    try {
        return json::parse(f);
    } catch (const json::parse_error& e) {
        throw muskat::ConfigError(path + ": " + e.what());
    }
}

struct RunFlags {
    std::string config;
    std::string output_dir;
    long output_every = 0;
    long checkpoint_every = -1;
    uint64_t seed = 0;
    bool have_seed = false;
    std::vector<std::string> modes;
    double rough = -1.0, random = -1.0;
    std::string resume;
    int N = 0, M = 0;
    double dt = 0.0, T_final = -1.0, mu = -1.0;
    double eps = 0.0, delta = 0.0, nu = 0.0;
    bool linear_only = false, override_smallness = false, mu_wide_range = false;
};

void add_run_flags(CLI::App* app, RunFlags& f) {
    app->add_option("-c,--config", f.config, "JSON run configuration");
    app->add_option("-o,--output-dir", f.output_dir, "output directory");
    app->add_option("--output-every", f.output_every, "ledger cadence in steps");
    app->add_option("--checkpoint-every", f.checkpoint_every, "steps between checkpoints (0: final only)");
    app->add_option("--seed", f.seed, "64-bit seed")->each([&](const std::string&) { f.have_seed = true; });
    app->add_option("--mode", f.modes, "initial mode n,cos_amp,sin_amp (repeatable)");
    app->add_option("--rough", f.rough, "rough initial data with this |h0|_1");
    app->add_option("--random", f.random, "analytic random initial data with this |h0|_1");
    app->add_option("--resume", f.resume, "continue from a checkpoint");
    app->add_option("--N", f.N, "Fourier cutoff");
    app->add_option("--M", f.M, "vertical intervals");
    app->add_option("--dt", f.dt, "time step");
    app->add_option("--T-final", f.T_final, "final time");
    app->add_option("--mu", f.mu, "analyticity growth rate");
    app->add_option("--eps", f.eps, "nonlinearity parameter");
    app->add_option("--delta", f.delta, "shallowness parameter");
    app->add_option("--nu", f.nu, "Bond number");
    app->add_flag("--linear-only", f.linear_only, "drop the nonlinear terms");
    app->add_flag("--override-smallness", f.override_smallness, "run data above the smallness threshold");
    app->add_flag("--mu-wide-range", f.mu_wide_range, "accept the wider mu range");
}

json merge_run_flags(const RunFlags& f) {
    json j = f.config.empty() ? json::object() : load_json(f.config);
    if (!j.is_object()) throw muskat::ConfigError("config must be a JSON object");
    json& p = j["params"];
    if (p.is_null()) p = json::object();
    if (f.N > 0) p["N"] = f.N;
    if (f.M > 0) p["M"] = f.M;
    if (f.dt > 0) p["dt"] = f.dt;
    if (f.T_final >= 0) p["T_final"] = f.T_final;
    if (f.mu >= 0) p["mu"] = f.mu;
    for (auto [k, v] : {std::pair{"eps", f.eps}, {"delta", f.delta}, {"nu", f.nu}})
        if (v > 0) {
            p[k] = v;
            p.erase("alpha");
        }
    if (f.linear_only) p["linear_only"] = true;
    if (f.override_smallness) p["override_smallness"] = true;
    if (f.mu_wide_range) p["mu_wide_range"] = true;
    if (!f.output_dir.empty()) j["output_dir"] = f.output_dir;
    if (f.output_every != 0) j["output_every"] = f.output_every;
    if (f.checkpoint_every >= 0) j["checkpoint_every"] = f.checkpoint_every;
    if (f.have_seed) j["seed"] = f.seed;

    json init = json::object();
    if (!f.modes.empty()) {
        json m = json::array();
        for (const auto& s : f.modes) {
            std::istringstream is(s);
            double n, a, b;
            char c1, c2;
            if (!(is >> n >> c1 >> a >> c2 >> b) || c1 != ',' || c2 != ',')
                throw muskat::ConfigError("--mode expects n,cos_amp,sin_amp");
            m.push_back({n, a, b});
        }
        init["modes"] = m;
    }
    if (f.rough >= 0) init["rough"] = {{"norm1", f.rough}};
    if (f.random >= 0) init["random"] = {{"norm1", f.random}};
    if (!f.resume.empty()) init["checkpoint"] = f.resume;
    if (!init.empty()) j["initial"] = init;  // flags replace the configured source
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pseudo-spectral one-phase Muskat simulator and inequality lab"};
    app.require_subcommand(1);

    RunFlags rf;
    auto* run = app.add_subcommand("run", "integrate one configuration");
    add_run_flags(run, rf);

    cli::VerifyOptions vo;
    auto* verify = app.add_subcommand("verify", "run the constants lab and kernel bounds");
    verify->add_option("--trials", vo.trials, "trials per inequality")->capture_default_str();
    verify->add_option("--seed", vo.seed, "64-bit seed")->capture_default_str();
    verify->add_option("-o,--output-dir", vo.output_dir, "output directory")->capture_default_str();
    verify->add_flag("--sup-first", vo.sup_first, "also tabulate int sup_y |d Pi| dx2");

    std::string sweep_path, sweep_out;
    int threads = 0;
    auto* sweep = app.add_subcommand("sweep", "run a parameter grid");
    sweep->add_option("-c,--config", sweep_path, "JSON sweep configuration")->required();
    sweep->add_option("-o,--output-dir", sweep_out, "output directory");
    sweep->add_option("--threads", threads, "worker threads (default: MUSKAT_THREADS or all cores)");

    std::string phys_path;
    double h0_norm = 0.0;
    auto* convert = app.add_subcommand("convert", "physical parameters to dimensionless form");
    convert->add_option("-c,--config", phys_path, "JSON physical parameters")->required();
    convert->add_option("--h0-norm", h0_norm, "dimensional |h0| in A^1 for the amplitude condition");

    std::string ck_path;
    auto* radius = app.add_subcommand("radius", "analyticity radius of a checkpoint");
    radius->add_option("checkpoint", ck_path, "checkpoint file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : cli::kExitConfig;
    }

    try {
        if (*run) return cli::cmd_run(cli::run_config_from_json(merge_run_flags(rf)), std::cout, std::cerr);
        if (*verify) return cli::cmd_verify(vo, std::cout, std::cerr);
        if (*sweep) {
            auto s = cli::sweep_config_from_json(load_json(sweep_path));
            if (!sweep_out.empty()) s.output_dir = sweep_out;
            return cli::cmd_sweep(s, std::cout, std::cerr, threads);
        }
        if (*convert) return cli::cmd_convert(load_json(phys_path), h0_norm, std::cout, std::cerr);
        if (*radius) return cli::cmd_radius(ck_path, std::cout, std::cerr);
    } catch (const muskat::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return cli::kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
