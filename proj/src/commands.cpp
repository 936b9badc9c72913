/**
 * @file commands.cpp
 * @brief Subcommand drivers: configuration parsing, checkpoints, run/verify/sweep/convert/radius.
 */
#include "muskat/commands.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

#include "muskat/errors.hpp"
#include "muskat/lab.hpp"
#include "muskat/potentials.hpp"

namespace muskat::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using spectral::cplx;

static_assert(std::endian::native == std::endian::little, "checkpoint IO assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'M', 'U', 'S', 'K', 'A', 'T', 'C', 'K'};
constexpr int kCheckpointFormat = 1;

void reject_unknown(const json& j, const std::set<std::string>& keys, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!keys.count(it.key())) throw ConfigError("unknown " + where + " key: " + it.key());
}

template <class T>
T get_as(const json& j, const std::string& key, const std::string& where) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("bad " + where + "." + key + ": " + e.what());
    }
}

InitialData initial_from_json(const json& j) {
    reject_unknown(j, {"modes", "checkpoint", "rough", "random"}, "initial");
    if (j.size() != 1) throw ConfigError("initial must name exactly one source (modes, checkpoint, rough, random)");
    InitialData d;
    const std::string key = j.begin().key();
    if (key == "modes") {
        d.kind = InitialData::Kind::modes;
        const json& m = j.at("modes");
        if (!m.is_array()) throw ConfigError("initial.modes must be an array");
        for (const auto& e : m) {
            if (!e.is_array() || e.size() != 3) throw ConfigError("initial.modes entries are [n, cos_amp, sin_amp]");
            std::array<double, 3> v{};
            for (int i = 0; i < 3; ++i) {
                if (!e[i].is_number()) throw ConfigError("initial.modes entries must be numeric");
                v[i] = e[i].get<double>();
            }
            if (v[0] != std::floor(v[0]) || v[0] < 1) throw ConfigError("initial.modes: n must be an integer >= 1");
            d.modes.push_back(v);
        }
    } else if (key == "checkpoint") {
        d.kind = InitialData::Kind::checkpoint;
        d.checkpoint = get_as<std::string>(j, "checkpoint", "initial");
    } else {
        d.kind = key == "rough" ? InitialData::Kind::rough : InitialData::Kind::random;
        const json& r = j.at(key);
        reject_unknown(r, {"norm1", "seed"}, "initial." + key);
        if (!r.contains("norm1")) throw ConfigError("initial." + key + ".norm1 is required");
        d.norm1 = get_as<double>(r, "norm1", "initial." + key);
        if (!(d.norm1 >= 0.0)) throw ConfigError("initial." + key + ".norm1 must be nonnegative");
        if (r.contains("seed")) d.seed = get_as<uint64_t>(r, "seed", "initial." + key);
    }
    return d;
}

json initial_to_json(const InitialData& d) {
    switch (d.kind) {
        case InitialData::Kind::modes: {
            json m = json::array();
            for (const auto& v : d.modes) m.push_back({static_cast<long>(v[0]), v[1], v[2]});
            return {{"modes", m}};
        }
        case InitialData::Kind::checkpoint:
            return {{"checkpoint", d.checkpoint}};
        default: {
            json r = {{"norm1", d.norm1}};
            if (d.seed) r["seed"] = *d.seed;
            return {{d.kind == InitialData::Kind::rough ? "rough" : "random", r}};
        }
    }
}

void put_u64(std::ostream& os, uint64_t v) {
    char b[8];
    std::memcpy(b, &v, 8);
    os.write(b, 8);
}

uint64_t get_u64(std::istream& is) {
    char b[8];
    if (!is.read(b, 8)) throw ConfigError("checkpoint truncated");
    uint64_t v;
    std::memcpy(&v, b, 8);
    return v;
}

void put_cplx(std::ostream& os, const cplx* v, size_t n) {
    os.write(reinterpret_cast<const char*>(v), static_cast<std::streamsize>(n * sizeof(cplx)));
}

void get_cplx(std::istream& is, cplx* v, size_t n) {
    if (!is.read(reinterpret_cast<char*>(v), static_cast<std::streamsize>(n * sizeof(cplx))))
        throw ConfigError("checkpoint truncated");
}

void put_field(std::ostream& os, const geometry::StripField& f) {
    const size_t row = static_cast<size_t>(f.cutoff()) + 1;
    for (int j = 0; j < f.nodes(); ++j) put_cplx(os, f.val_row(j), row);
    for (int j = 0; j < f.nodes(); ++j) put_cplx(os, f.dz_row(j), row);
}

geometry::StripField get_field(std::istream& is, int N, int M) {
    geometry::StripField f(N, M);
    const size_t row = static_cast<size_t>(N) + 1;
    for (int j = 0; j < f.nodes(); ++j) get_cplx(is, f.val_row(j), row);
    for (int j = 0; j < f.nodes(); ++j) get_cplx(is, f.dz_row(j), row);
    return f;
}

// Shortest round-trip text for doubles in CSV output.
std::string num(double x) {
    char b[32];
    std::snprintf(b, sizeof b, "%.17g", x);
    return b;
}

std::string regime_name(const DimensionlessParams& p) { return p.stable_regime() ? "stable" : "RT-unstable"; }

json smallness_json(const analysis::SmallnessReport& r) {
    json j = json::object();
    for (const auto& c : r.conditions) j[c.name] = {{"actual", c.actual}, {"threshold", c.threshold}, {"pass", c.pass}};
    return j;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

void write_text(const fs::path& path, const std::string& s) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << s;
}

std::string padded(long v, int width) {
    std::ostringstream os;
    os << std::setw(width) << std::setfill('0') << v;
    return os.str();
}

}  // namespace

//==============================================================================
// Configuration
//==============================================================================

RunConfig run_config_from_json(const json& j) {
    reject_unknown(j, {"params", "physical", "initial", "output_dir", "output_every", "checkpoint_every", "seed"},
                   "config");
    RunConfig c;
    json pj = j.contains("params") ? j.at("params") : json::object();
    if (!pj.is_object()) throw ConfigError("params must be a JSON object");
    if (j.contains("physical")) {
        for (const char* k : {"eps", "delta", "nu", "alpha"})
            if (pj.contains(k)) throw ConfigError(std::string("params.") + k + " conflicts with physical");
        c.physical = nondim::physical_from_json(j.at("physical"));
        const auto d = nondim::to_dimensionless(*c.physical);
        pj["eps"] = d.params.eps;
        pj["delta"] = d.params.delta;
        pj["nu"] = d.params.nu;
    }
    c.params = evolution::params_from_json(pj);
    if (!j.contains("initial")) throw ConfigError("initial is required");
    c.initial = initial_from_json(j.at("initial"));
    if (j.contains("output_dir")) c.output_dir = get_as<std::string>(j, "output_dir", "config");
    if (j.contains("output_every")) c.output_every = get_as<long>(j, "output_every", "config");
    if (j.contains("checkpoint_every")) c.checkpoint_every = get_as<long>(j, "checkpoint_every", "config");
    if (j.contains("seed")) c.seed = get_as<uint64_t>(j, "seed", "config");
    if (c.output_every <= 0) throw ConfigError("output_every must be positive");
    if (c.checkpoint_every < 0) throw ConfigError("checkpoint_every must be nonnegative");
    if (c.output_dir.empty()) throw ConfigError("output_dir must be nonempty");
    for (const auto& m : c.initial.modes)
        if (m[0] > c.params.N) throw ConfigError("initial.modes: n exceeds the cutoff N");
    return c;
}

json to_json(const RunConfig& c) {
    json p = evolution::to_json(c.params);
    json j = {{"initial", initial_to_json(c.initial)},
              {"output_dir", c.output_dir},
              {"output_every", c.output_every},
              {"checkpoint_every", c.checkpoint_every},
              {"seed", c.seed}};
    if (c.physical) {
        for (const char* k : {"eps", "delta", "nu", "alpha"}) p.erase(k);
        j["physical"] = nondim::to_json(*c.physical);
    }
    j["params"] = p;
    return j;
}

//==============================================================================
// Checkpoints
//==============================================================================

void write_checkpoint(const std::string& path, const Checkpoint& ck) {
    const auto& s = ck.state;
    const bool warm = s.warm && s.warm->grad1.cutoff() == s.h.cutoff();
    json hdr = {{"format", kCheckpointFormat},
                {"seed", ck.seed},
                {"t", s.t},
                {"step", s.step},
                {"integral4", ck.integral4},
                {"cutoff", s.h.cutoff()},
                {"warm_intervals", warm ? s.warm->grad1.intervals() : 0},
                {"params", evolution::to_json(ck.params)}};
    const std::string text = hdr.dump();
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write checkpoint " + path);
        f.write(kMagic, 8);
        put_u64(f, text.size());
        f.write(text.data(), static_cast<std::streamsize>(text.size()));
        spectral::write_binary(f, s.h);
        if (warm) {
            put_field(f, s.warm->grad1);
            put_field(f, s.warm->grad2);
        }
        if (!f) throw std::runtime_error("checkpoint write failed: " + path);
    }
    fs::rename(tmp, path);
}

Checkpoint read_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open checkpoint " + path);
    char magic[8];
    if (!f.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) throw ConfigError("not a checkpoint file: " + path);
    const uint64_t len = get_u64(f);
    if (len > (1u << 24)) throw ConfigError("checkpoint header too large");
    std::string text(len, '\0');
    if (!f.read(text.data(), static_cast<std::streamsize>(len))) throw ConfigError("checkpoint truncated");
    Checkpoint ck;
    try {
        const json hdr = json::parse(text);
        if (hdr.at("format").get<int>() != kCheckpointFormat) throw ConfigError("unsupported checkpoint format");
        ck.seed = hdr.at("seed").get<uint64_t>();
        ck.integral4 = hdr.at("integral4").get<double>();
        ck.params = evolution::params_from_json(hdr.at("params"));
        ck.state.t = hdr.at("t").get<double>();
        ck.state.step = hdr.at("step").get<long>();
        const int N = hdr.at("cutoff").get<int>();
        const int Mw = hdr.at("warm_intervals").get<int>();
        if (N < 1 || N > (1 << 20) || Mw < 0 || Mw > (1 << 16)) throw ConfigError("checkpoint dimensions out of range");
        try {
            ck.state.h = spectral::read_binary(f, N);
        } catch (const std::runtime_error& e) {
            throw ConfigError(std::string("checkpoint payload: ") + e.what());
        }
        if (!f) throw ConfigError("checkpoint truncated");
        if (Mw > 0) {
            potentials::PoissonSolution w;
            w.grad1 = get_field(f, N, Mw);
            w.grad2 = get_field(f, N, Mw);
            w.trace_d2 = w.grad2.trace_top();
            ck.state.warm = std::move(w);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad checkpoint header: ") + e.what());
    }
    return ck;
}

//==============================================================================
// Run
//==============================================================================

Spectrum initial_spectrum(const RunConfig& c) {
    const int N = c.params.N;
    const auto& d = c.initial;
    switch (d.kind) {
        case InitialData::Kind::modes: {
            Spectrum h(N);
            for (const auto& m : d.modes) {
                const int n = static_cast<int>(m[0]);
                h = h + Spectrum::cosine(N, n, m[1]) + Spectrum::sine(N, n, m[2]);
            }
            return h;
        }
        case InitialData::Kind::checkpoint:
            return read_checkpoint(d.checkpoint).state.h;
        case InitialData::Kind::rough: {
            analysis::CounterRng rng(d.seed.value_or(c.seed));
            return analysis::rough_interface(rng, N, d.norm1);
        }
        case InitialData::Kind::random: {
            analysis::CounterRng rng(d.seed.value_or(c.seed));
            return analysis::random_interface(rng, N, d.norm1);
        }
    }
    return Spectrum(N);
}

RunOutcome execute_run(const RunConfig& c, std::ostream& log) {
    const auto& p = c.params;
    p.validate();
    if (c.output_every <= 0) throw ConfigError("output_every must be positive");

    evolution::SimState start;
    double integral4 = 0.0;
    std::optional<std::string> resumed_from;
    if (c.initial.kind == InitialData::Kind::checkpoint) {
        Checkpoint ck = read_checkpoint(c.initial.checkpoint);
        const auto& q = ck.params;
        if (ck.state.h.cutoff() != p.N || q.eps != p.eps || q.delta != p.delta || q.nu != p.nu || q.mu != p.mu ||
            q.dt != p.dt)
            throw ConfigError("checkpoint parameters (N, eps, delta, nu, mu, dt) differ from the run configuration");
        start = std::move(ck.state);
        integral4 = ck.integral4;
        resumed_from = c.initial.checkpoint;
    } else {
        start.h = initial_spectrum(c);
        start.h[0] = 0.0;
    }
    if (!start.h.finite()) throw ConfigError("initial data is not finite");

    // Smallness is judged on the data the run starts from.
    const auto small = analysis::smallness_check(start.h, p);
    const bool theorem_ok = small.get("theorem").pass;
    if (!p.linear_only && p.stable_regime() && !theorem_ok) {
        if (!p.override_smallness)
            throw ConfigError("initial data fails the theorem smallness condition (|h0|_1 = " +
                              num(small.get("theorem").actual) + " >= " + num(small.get("theorem").threshold) +
                              "); set override_smallness to run anyway");
        log << "warning: smallness condition overridden\n";
    }
    const auto flags = p.hypothesis_flags();
    for (const auto& f : flags) log << "note: theorem hypothesis violated: " << f << "\n";

    const fs::path dir(c.output_dir);
    fs::create_directories(dir / "checkpoints");
    write_text(dir / "config.json", to_json(c).dump(2) + "\n");

    std::vector<std::string> checkpoints;
    auto save = [&](const evolution::SimState& s, double i4, const std::string& name) {
        const fs::path path = dir / "checkpoints" / name;
        write_checkpoint(path.string(), Checkpoint{s, i4, p, c.seed});
        checkpoints.push_back(path.string());
    };

    // Mirror of the run ledger so partial outputs survive an interrupted process.
    analysis::EnergyLedger mirror(p.mu, p.decay_rate());
    long next_ck = c.checkpoint_every > 0 ? (start.step / c.checkpoint_every + 1) * c.checkpoint_every : -1;
    evolution::RunControl ctl;
    ctl.output_every = c.output_every;
    evolution::SimState last = start;
    double last_i4 = integral4;
    ctl.on_row = [&](const evolution::SimState& s, const analysis::LedgerRow& r) {
        mirror.append(r);
        last = s;
        last_i4 = r.integral4;
        if (next_ck > 0 && s.step >= next_ck) {
            save(s, r.integral4, "ck_" + padded(s.step, 9) + ".bin");
            std::ofstream f(dir / "ledger.csv", std::ios::binary);
            mirror.write_csv(f, c.seed);
            while (next_ck <= s.step) next_ck += c.checkpoint_every;
        }
        return true;
    };

    const auto t0 = std::chrono::steady_clock::now();
    const evolution::RunResult res = evolution::run(start, p, ctl, integral4);
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    {
        std::ofstream f(dir / "ledger.csv", std::ios::binary);
        res.ledger.write_csv(f, c.seed);
    }
    const auto& rows = res.ledger.rows();
    // last recorded state: the end state of a completed run, the last ledger row after a failure
    save(last, last_i4, "final.bin");

    json summary;
    summary["status"] = res.status;
    summary["message"] = res.message;
    summary["seed"] = c.seed;
    summary["params"] = evolution::to_json(p);
    if (c.physical) summary["physical"] = nondim::to_json(*c.physical);
    summary["initial"] = initial_to_json(c.initial);
    if (resumed_from) summary["resumed_from"] = *resumed_from;
    summary["regime"] = regime_name(p);
    summary["hypothesis_flags"] = flags;
    summary["smallness"] = smallness_json(small);
    summary["smallness_overridden"] = !p.linear_only && p.stable_regime() && !theorem_ok;
    summary["theory_rate"] = p.decay_rate();
    summary["linear_rate_mode1"] = evolution::linear_symbol(1, p);

    const double h0_norm = spectral::wiener_norm(start.h, 1.0, p.mu * start.t);
    summary["h0_norm1"] = h0_norm;
    std::optional<double> fit;
    try {
        fit = analysis::decay_rate_fit(res.ledger);
    } catch (const std::invalid_argument&) {
    }
    summary["decay_rate_fit"] = optional_number(fit);
    summary["growth"] = fit && *fit < 0.0;

    analysis::EnergyReport er;
    if (!rows.empty()) er = analysis::verify_energy(res.ledger, h0_norm, p);
    summary["energy"] = {{"energy_bounded", er.energy_bounded},
                         {"envelope_ok", er.envelope_ok},
                         {"energy_monotone", er.energy_monotone},
                         {"no_pinch_off", er.no_pinch_off},
                         {"worst_energy_margin", er.worst_energy_margin},
                         {"worst_envelope_margin", er.worst_envelope_margin},
                         {"worst_monotone_increase", er.worst_monotone_increase},
                         {"max_eps_sup", er.max_eps_sup}};
    summary["energy_monotone"] = er.energy_monotone;

    long iters = 0, iter_max = 0, iter_rows = 0;
    for (size_t i = 1; i < rows.size(); ++i) {
        iters += rows[i].phi2_iterations;
        iter_max = std::max<long>(iter_max, rows[i].phi2_iterations);
        ++iter_rows;
    }
    summary["phi2_iterations"] = {{"mean", iter_rows ? static_cast<double>(iters) / iter_rows : 0.0},
                                  {"max", iter_max}};
    if (!rows.empty()) {
        const auto& r = rows.back();
        summary["final"] = {{"t", r.t},           {"step", r.step},         {"norm0_mu", r.norm0},
                            {"norm1", r.norm1},   {"norm1_mu", r.norm1_mu}, {"norm4_mu", r.norm4_mu},
                            {"integral4", r.integral4}, {"energy", r.energy}, {"radius", r.radius},
                            {"band_limited", r.band_limited}, {"sup_h", r.sup_h}};
    }
    summary["ledger_rows"] = rows.size();
    summary["checkpoints"] = checkpoints;
    summary["elapsed_s"] = elapsed;

    std::string verdict;
    int code = kExitOk;
    if (res.status != "ok") {
        verdict = res.status;
        code = kExitRunFailure;
    } else if (!p.stable_regime()) {
        verdict = "RT-unstable regime";
    } else if (h0_norm == 0.0) {
        verdict = "rest state";
    } else if (er.ok() && theorem_ok && p.mu_in_range()) {
        verdict = "decay theorem verified";
    } else if (er.ok()) {
        verdict = "decay observed outside theorem hypotheses";
    } else {
        verdict = "energy inequality violated";
    }
    summary["verdict"] = verdict;
    summary["exit_code"] = code;
    write_text(dir / "summary.json", summary.dump(2) + "\n");
    return {code, summary};
}

int cmd_run(const RunConfig& c, std::ostream& out, std::ostream& err) {
    try {
        const auto o = execute_run(c, err);
        out << "status: " << o.summary["status"].get<std::string>() << "\n"
            << "verdict: " << o.summary["verdict"].get<std::string>() << "\n"
            << "decay_rate_fit: " << o.summary["decay_rate_fit"].dump() << " (theory "
            << num(o.summary["theory_rate"].get<double>()) << ")\n"
            << "outputs: " << c.output_dir << "\n";
        if (o.exit_code != kExitOk) err << "run stopped: " << o.summary["message"].get<std::string>() << "\n";
        return o.exit_code;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
}

//==============================================================================
// Verify
//==============================================================================

int cmd_verify(const VerifyOptions& o, std::ostream& out, std::ostream& err) {
    if (o.trials < 1) {
        err << "config error: trials must be at least 1\n";
        return kExitConfig;
    }
    const fs::path dir(o.output_dir);
    fs::create_directories(dir);

    analysis::LabOptions lo;
    lo.seed = o.seed;
    lo.trials = o.trials;
    const auto t0 = std::chrono::steady_clock::now();
    const auto rep = analysis::constants_lab(lo);
    {
        std::ofstream f(dir / "constants.csv", std::ios::binary);
        analysis::write_lab_csv(f, rep);
    }
    {
        std::ofstream f(dir / "kernel_bounds.csv", std::ios::binary);
        f << "# seed=" << o.seed << "\n";
        f << "kappa,j,l,pi1,bound1,ratio1,pi2,bound2,ratio2";
        if (o.sup_first) f << ",sup_first1,sup_first2";
        f << "\n";
        for (double kappa : {0.1, 1.0, 10.0, 100.0})
            for (const auto& r : potentials::kernel_integral_bounds(kappa, o.sup_first)) {
                f << num(kappa) << ',' << r.j << ',' << r.l << ',' << num(r.pi1) << ',' << num(r.bound1) << ','
                  << num(r.ratio1) << ',' << num(r.pi2) << ',' << num(r.bound2) << ',' << num(r.ratio2);
                if (o.sup_first) f << ',' << num(r.sup_first1) << ',' << num(r.sup_first2);
                f << "\n";
            }
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    for (const auto& r : rep.rows)
        out << (r.violations ? "VIOLATED " : "ok       ") << std::left << std::setw(24) << r.id
            << " max_ratio=" << num(r.max_ratio) << " trials=" << r.trials << "\n";
    out << "rows: " << rep.rows.size() << ", violating rows: " << rep.violations.size() << ", seed: " << o.seed
        << ", elapsed: " << std::fixed << std::setprecision(1) << elapsed << " s\n";
    out.unsetf(std::ios::fixed);
    try {
        analysis::enforce(rep, (dir / "counterexamples.json").string());
    } catch (const InequalityViolation& e) {
        err << "inequality violation: " << e.what() << "\n";
        out << "counterexample bundle: " << e.bundle_path << "\n";
        return kExitViolation;
    }
    return kExitOk;
}

//==============================================================================
// Sweep
//==============================================================================

SweepConfig sweep_config_from_json(const json& j) {
    reject_unknown(j, {"base", "grid", "output_dir"}, "sweep");
    if (!j.contains("base")) throw ConfigError("sweep.base is required");
    SweepConfig s;
    s.base = run_config_from_json(j.at("base"));
    if (j.contains("output_dir")) s.output_dir = get_as<std::string>(j, "output_dir", "sweep");
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        reject_unknown(g, {"eps", "delta", "nu", "amplitude"}, "sweep.grid");
        auto axis = [&](const char* k, std::vector<double>& v) {
            if (!g.contains(k)) return;
            v = get_as<std::vector<double>>(g, k, "sweep.grid");
            if (v.empty()) throw ConfigError(std::string("sweep.grid.") + k + " must be nonempty");
        };
        axis("eps", s.eps);
        axis("delta", s.delta);
        axis("nu", s.nu);
        axis("amplitude", s.amplitude);
    }
    if (!s.amplitude.empty() && s.base.initial.kind == InitialData::Kind::checkpoint)
        throw ConfigError("sweep.grid.amplitude cannot rescale checkpoint initial data");
    return s;
}

std::vector<RunConfig> sweep_points(const SweepConfig& s) {
    const auto& b = s.base.params;
    const auto eps = s.eps.empty() ? std::vector<double>{b.eps} : s.eps;
    const auto delta = s.delta.empty() ? std::vector<double>{b.delta} : s.delta;
    const auto nu = s.nu.empty() ? std::vector<double>{b.nu} : s.nu;
    const auto amp = s.amplitude.empty() ? std::vector<double>{-1.0} : s.amplitude;
    std::vector<RunConfig> out;
    for (double e : eps)
        for (double d : delta)
            for (double n : nu)
                for (double a : amp) {
                    RunConfig c = s.base;
                    c.physical.reset();
                    c.params.eps = e;
                    c.params.delta = d;
                    c.params.nu = n;
                    c.params.alpha = e * std::sqrt(d);
                    if (a >= 0.0) {
                        if (c.initial.kind == InitialData::Kind::modes) {
                            RunConfig probe = c;
                            const double cur = spectral::wiener_norm(initial_spectrum(probe), 1.0);
                            if (cur <= 0.0) throw ConfigError("sweep amplitude needs nonzero base modes");
                            for (auto& m : c.initial.modes) {
                                m[1] *= a / cur;
                                m[2] *= a / cur;
                            }
                        } else {
                            c.initial.norm1 = a;
                        }
                    }
                    c.output_dir = (fs::path(s.output_dir) / ("point_" + padded(static_cast<long>(out.size()), 4))).string();
                    out.push_back(std::move(c));
                }
    return out;
}

int sweep_threads() {
    if (const char* e = std::getenv("MUSKAT_THREADS")) {
        const int n = std::atoi(e);
        if (n >= 1) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

int cmd_sweep(const SweepConfig& s, std::ostream& out, std::ostream& err, int threads) {
    std::vector<RunConfig> pts;
    try {
        pts = sweep_points(s);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    fs::create_directories(s.output_dir);

    struct PointResult {
        std::string status = "not-run", verdict, error;
        int exit_code = kExitOk;
        json summary;
    };
    std::vector<PointResult> results(pts.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t i; (i = next.fetch_add(1)) < pts.size();) {
            std::ostringstream log;
            auto& r = results[i];
            try {
                const auto o = execute_run(pts[i], log);
                r.summary = o.summary;
                r.status = o.summary["status"];
                r.verdict = o.summary["verdict"];
                r.exit_code = o.exit_code;
            } catch (const ConfigError& e) {
                r.status = "config-error";
                r.error = e.what();
                r.exit_code = kExitConfig;
            } catch (const std::exception& e) {
                r.status = "error";
                r.error = e.what();
                r.exit_code = kExitRunFailure;
            }
        }
    };
    const int nt = std::max(1, std::min<int>(threads > 0 ? threads : sweep_threads(), static_cast<int>(pts.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::ofstream f(fs::path(s.output_dir) / "sweep.csv", std::ios::binary);
    f << "# seed=" << s.base.seed << "\n";
    f << "index,eps,delta,nu,amplitude,status,verdict,regime,decay_rate_fit,theory_rate,linear_rate_mode1,"
         "phi2_iter_mean,phi2_iter_max,final_norm1,exit_code\n";
    int failed = 0;
    for (size_t i = 0; i < pts.size(); ++i) {
        const auto& p = pts[i].params;
        const auto& r = results[i];
        const double amp = pts[i].initial.kind == InitialData::Kind::checkpoint
                               ? std::nan("")
                               : spectral::wiener_norm(initial_spectrum(pts[i]), 1.0);
        auto field = [&](const char* k) -> std::string {
            if (!r.summary.contains(k) || r.summary[k].is_null()) return "";
            return num(r.summary[k].get<double>());
        };
        std::string fit = field("decay_rate_fit");
        std::string mean, mx, fin;
        if (r.summary.contains("phi2_iterations")) {
            mean = num(r.summary["phi2_iterations"]["mean"].get<double>());
            mx = std::to_string(r.summary["phi2_iterations"]["max"].get<long>());
        }
        if (r.summary.contains("final")) fin = num(r.summary["final"]["norm1"].get<double>());
        std::string verdict = r.verdict.empty() ? r.error : r.verdict;
        std::replace(verdict.begin(), verdict.end(), '"', '\'');
        f << i << ',' << num(p.eps) << ',' << num(p.delta) << ',' << num(p.nu) << ',' << num(amp) << ','
          << r.status << ",\"" << verdict << "\"," << regime_name(p) << ',' << fit << ','
          << num(p.decay_rate()) << ',' << num(evolution::linear_symbol(1, p)) << ',' << mean << ',' << mx << ','
          << fin << ',' << r.exit_code << "\n";
        if (r.exit_code != kExitOk) {
            ++failed;
            err << "point " << i << " failed: " << r.status << (r.error.empty() ? "" : ": " + r.error) << "\n";
        }
    }
    out << "points: " << pts.size() << ", failed: " << failed << ", threads: " << nt << ", csv: "
        << (fs::path(s.output_dir) / "sweep.csv").string() << "\n";
    return failed ? kExitRunFailure : kExitOk;
}

//==============================================================================
// Convert, radius
//==============================================================================

json convert_report(const nondim::PhysicalParams& p, double h0_norm) {
    const auto d = nondim::to_dimensionless(p);
    const auto& q = d.params;
    const auto rep = nondim::check_dimensional_theorem(p, h0_norm);
    json conds = json::object();
    for (const auto& c : rep.conditions)
        conds[c.name] = {{"actual", c.actual}, {"threshold", c.threshold}, {"margin", c.margin}, {"pass", c.pass}};
    return {{"physical", nondim::to_json(p)},
            {"dimensionless",
             {{"eps", q.eps},
              {"delta", q.delta},
              {"nu", q.nu},
              {"alpha", q.alpha},
              {"regime", regime_name(q)},
              {"decay_rate", q.decay_rate()},
              {"mu_limit", q.mu_limit()},
              {"theorem_threshold", analysis::theorem_threshold(q)}}},
            {"scales",
             {{"length", d.scales.length},
              {"height", d.scales.height},
              {"time", d.scales.time},
              {"potential", d.scales.potential}}},
            {"dimensional_theorem",
             {{"h0_norm", h0_norm},
              {"conditions", conds},
              {"amplitude_bound", rep.amplitude_bound},
              {"dimensionless_bound_physical", nondim::dimensionless_bound_in_physical_units(p)},
              {"all_pass", rep.all_pass()}}}};
}

int cmd_convert(const json& physical, double h0_norm, std::ostream& out, std::ostream& err) {
    try {
        if (!(h0_norm >= 0.0)) throw ConfigError("h0 norm must be nonnegative");
        out << convert_report(nondim::physical_from_json(physical), h0_norm).dump(2) << "\n";
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
}

json radius_report(const Checkpoint& ck) {
    const auto fit = analysis::analyticity_radius(ck.state.h);
    const double mu_t = ck.params.mu * ck.state.t;
    return {{"t", ck.state.t},
            {"step", ck.state.step},
            {"cutoff", ck.state.h.cutoff()},
            {"radius", fit.radius},
            {"band_limited", fit.band_limited},
            {"fit_modes", {fit.n_lo, fit.n_hi}},
            {"active_modes", fit.active},
            {"mu_t", mu_t},
            {"radius_at_least_mu_t", fit.radius >= mu_t}};
}

int cmd_radius(const std::string& path, std::ostream& out, std::ostream& err) {
    try {
        out << radius_report(read_checkpoint(path)).dump(2) << "\n";
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
}

}  // namespace muskat::cli
