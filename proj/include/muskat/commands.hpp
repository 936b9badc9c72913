//==============================================================================
// commands.hpp
//
// Subcommand drivers behind muskat_cli: run, verify, sweep, convert, radius.
// Each returns a process exit status (0 ok, 2 config error, 3 run failure,
// 4 inequality violation) and writes its artifacts under an output directory.
//==============================================================================
#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "muskat/evolution.hpp"
#include "muskat/nondim.hpp"

namespace muskat::cli {

using evolution::DimensionlessParams;
using spectral::Spectrum;

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitRunFailure = 3, kExitViolation = 4 };

struct InitialData {
    enum class Kind { modes, checkpoint, rough, random };
    Kind kind = Kind::modes;
    std::vector<std::array<double, 3>> modes;  // n, cosine amplitude, sine amplitude
    std::string checkpoint;
    double norm1 = 0.0;                        // rough/random target |h0|_1
    std::optional<uint64_t> seed;              // rough/random; defaults to the config seed
};

// JSON schema (unknown keys rejected at every level):
//   params            dimensionless parameters (see params_from_json)
//   physical          optional physical parameters; supplies eps, delta, nu, alpha,
//                     which params must then omit
//   initial           exactly one of
//                       {"modes": [[n, cos_amp, sin_amp], ...]}
//                       {"checkpoint": path}
//                       {"rough": {"norm1": x, "seed": s}}   |h(n)| ~ (1+n)^-4
//                       {"random": {"norm1": x, "seed": s}}  analytic random interface
//   output_dir        default "out"
//   output_every      ledger cadence in steps, > 0 (default 10)
//   checkpoint_every  steps between checkpoints, 0 = final only (default 0)
//   seed              default 1
struct RunConfig {
    DimensionlessParams params;
    std::optional<nondim::PhysicalParams> physical;
    InitialData initial;
    std::string output_dir = "out";
    long output_every = 10;
    long checkpoint_every = 0;
    uint64_t seed = 1;
};

RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& c);

// Binary checkpoint: "MUSKATCK", u64 header length, JSON header, then little-endian
// f64 (re, im) of h for n = 0..N, followed by the phi2 warm start when present
// (grad1 values, grad1 d/dx2, grad2 values, grad2 d/dx2, node-major).
struct Checkpoint {
    evolution::SimState state;
    double integral4 = 0.0;
    DimensionlessParams params;
    uint64_t seed = 0;
};
void write_checkpoint(const std::string& path, const Checkpoint& ck);
Checkpoint read_checkpoint(const std::string& path);  // throws ConfigError on malformed files

// Initial interface described by the config (checkpoint sources return the stored h).
Spectrum initial_spectrum(const RunConfig& c);

struct RunOutcome {
    int exit_code = kExitOk;
    nlohmann::json summary;
};
// Runs one configuration and writes ledger.csv, checkpoints/ and summary.json.
// Throws ConfigError for invalid configurations (including failed smallness
// without override in the stable regime).
RunOutcome execute_run(const RunConfig& c, std::ostream& log);

int cmd_run(const RunConfig& c, std::ostream& out, std::ostream& err);

struct VerifyOptions {
    long trials = 1000;
    uint64_t seed = 1;
    std::string output_dir = "verify";
    bool sup_first = false;  // also report int sup_y |d Pi| in the kernel table
};
// constants.csv, kernel_bounds.csv; counterexamples.json and exit 4 on violation.
int cmd_verify(const VerifyOptions& o, std::ostream& out, std::ostream& err);

// {"base": RunConfig, "grid": {"eps": [...], "delta": [...], "nu": [...], "amplitude": [...]},
//  "output_dir": dir}. Missing axes keep the base value; amplitude rescales |h0|_1.
struct SweepConfig {
    RunConfig base;
    std::vector<double> eps, delta, nu, amplitude;
    std::string output_dir = "sweep";
};
SweepConfig sweep_config_from_json(const nlohmann::json& j);
std::vector<RunConfig> sweep_points(const SweepConfig& s);
// Worker count from MUSKAT_THREADS, else the hardware concurrency.
int sweep_threads();
int cmd_sweep(const SweepConfig& s, std::ostream& out, std::ostream& err, int threads = 0);

// Physical parameters in, dimensionless groups, scales and the dimensional theorem report out.
nlohmann::json convert_report(const nondim::PhysicalParams& p, double h0_norm);
int cmd_convert(const nlohmann::json& physical, double h0_norm, std::ostream& out, std::ostream& err);

nlohmann::json radius_report(const Checkpoint& ck);
int cmd_radius(const std::string& checkpoint_path, std::ostream& out, std::ostream& err);

}  // namespace muskat::cli
