// Command-line driver: thresholds | shoot | solve-plus | solve-minus | sweep |
// appendix | nonexist run a pipeline stage from a JSON config; verify re-checks
// a results directory.

#include "normsol/experiments.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"normalized solutions of the critical p-Laplacian equation"};
    app.require_subcommand(1);

    std::string config_path, out_dir, results_dir;
    std::uint64_t seed = 0;
    int threads = 0;
    bool have_out = false, have_seed = false, have_threads = false;

    auto add_run_opts = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "run-configuration file (JSON)")
            ->required();
        sub->add_option("--out", out_dir, "output directory (overrides config)")
            ->each([&](const std::string&) { have_out = true; });
        sub->add_option("--seed", seed, "RNG seed (overrides config)")
            ->each([&](const std::string&) { have_seed = true; });
        sub->add_option("--threads", threads, "worker threads (overrides config)")
            ->each([&](const std::string&) { have_threads = true; });
    };

    const char* verbs[] = {"thresholds", "shoot", "solve-plus", "solve-minus",
                           "sweep",      "appendix", "nonexist"};
    for (const char* v : verbs) add_run_opts(app.add_subcommand(v));

    CLI::App* verify_cmd = app.add_subcommand("verify", "re-check a results directory");
    verify_cmd->add_option("results_dir", results_dir, "directory produced by a run")
        ->required();

    CLI11_PARSE(app, argc, argv);

    const CLI::App* sub = app.get_subcommands().front();
    if (sub->get_name() == "verify") return normsol::verify(results_dir);

    normsol::RunOverrides ov;
    if (have_out) ov.out_dir = out_dir;
    if (have_seed) ov.seed = seed;
    if (have_threads) ov.threads = threads;
    try {
        return normsol::run(normsol::stage_from_verb(sub->get_name()), config_path, ov);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
}
