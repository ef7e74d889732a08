#ifndef NORMSOL_EXPERIMENTS_HPP
#define NORMSOL_EXPERIMENTS_HPP

#include "normsol/params.hpp"
#include "normsol/solvers.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace normsol {

struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct GridConfig {
    int M = 512;
    double R_max = 50.0;
    double kappa = 4.0;
};

struct SweepConfig {
    std::string kind; // "mu-to-zero" | "mu-to-alpha-bar" | "mu-to-infinity"
    double mu_min = 0.0;
    double mu_max = 0.0;
    int points = 6;
    bool track_profile = false;
};

struct AppendixConfig {
    double eps_min = 0.002;
    double eps_max = 0.2;
    int points = 8;
    std::vector<double> r_list;
};

struct NonexistConfig {
    std::vector<double> mu_list;
    int triples = 1000;
    int flow_seeds = 50;
};

struct RunConfig {
    int N = 3;
    double p = 2.0, q = 2.5, a = 1.0, mu = 0.1;
    GridConfig grid;
    SolverOptions solver;
    std::optional<SweepConfig> sweep;
    std::optional<AppendixConfig> appendix;
    std::optional<NonexistConfig> nonexist;
    std::string out_dir = "out";
    bool write_profiles = true;
    std::string cache_path; // empty: <out_dir>/threshold_cache.json
    int threads = 1;
};

// Strict parse: unknown keys are errors, tolerances must be positive,
// sweep grids monotone.
RunConfig parse_config(const std::string& path);

enum class RunStage { Thresholds, Shoot, SolvePlus, SolveMinus, Sweep, Appendix, Nonexist };

RunStage stage_from_verb(const std::string& verb);

struct RunOverrides {
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
};

// Executes the requested pipeline stage, writing results.json, profiles/*.csv,
// sweeps/*.csv and report.md under the output directory.
// Exit status: 0 success, 2 config error, 3 numerical failure.
int run(RunStage stage, const std::string& config_path, const RunOverrides& ov = {});

// Deterministic re-evaluation of the persisted certificates; exit 0 when all
// checks still pass, 1 when a certificate fails, 2 on missing/corrupt files.
int verify(const std::string& results_dir);

} // namespace normsol

#endif
