#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <stdexcept>

#include "rcsw/commands.hpp"

namespace {

// Exit codes: 0 success, 2 validation/usage failures, 1 runtime failures.
int run(int argc, char** argv) {
    CLI::App app{"LFMCW radar clutter-suppression workbench"};
    app.require_subcommand(1);

    rcsw::cli::CommonOptions common;
    std::uint64_t seed = 0;
    bool seed_set = false;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--scenario", common.scenario_path,
                        "Scenario JSON path")->required();
        cmd->add_option("--out", common.out_dir, "Output directory")->required();
        cmd->add_option("--seed", seed, "Override the scenario seed")
            ->each([&](const std::string&) { seed_set = true; });
        cmd->add_option("--threads", common.threads, "Worker threads");
    };

    auto* simulate = app.add_subcommand(
        "simulate", "Write per-scan IF matrices and raw maps");
    add_common(simulate);

    auto* detect =
        app.add_subcommand("detect", "Run one detection scheme end to end");
    add_common(detect);
    std::string scheme;
    detect->add_option("--scheme", scheme,
                       "raw_ca | raw_os | mti_ca | mti_os | godec_ca")
        ->required();

    auto* sweep = app.add_subcommand("sweep", "Sweep the n_mov sparsity knob");
    add_common(sweep);
    std::vector<int> nmov;
    int repeats = 3;
    sweep->add_option("--nmov", nmov, "Comma-separated n_mov values")
        ->required()
        ->delimiter(',');
    sweep->add_option("--repeats", repeats, "Repeats per value");

    auto* bench = app.add_subcommand("bench", "Per-stage timing table");
    add_common(bench);
    int bench_repeats = 10;
    bench->add_option("--repeats", bench_repeats, "Benchmark repeats");

    CLI11_PARSE(app, argc, argv);
    if (seed_set) common.seed_override = seed;

    if (simulate->parsed()) rcsw::cli::cmd_simulate(common);
    if (detect->parsed()) rcsw::cli::cmd_detect(common, scheme);
    if (sweep->parsed()) rcsw::cli::cmd_sweep(common, nmov, repeats);
    if (bench->parsed()) rcsw::cli::cmd_bench(common, bench_repeats);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
