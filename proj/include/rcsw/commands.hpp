#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rcsw::cli {

struct CommonOptions {
    std::string scenario_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed_override;
    int threads = 1;
};

/// Writes per-scan IF-matrix binaries, raw range-velocity map CSVs and a
/// manifest echoing the effective configuration and seed.
void cmd_simulate(const CommonOptions& common);

/// Runs one detection scheme end to end; writes report.json, masks.csv,
/// normalized-dB map grids and a manifest.
void cmd_detect(const CommonOptions& common, const std::string& scheme_name);

/// Sparsity sweep; writes sweep.csv, the final report at the optimum and a
/// manifest carrying the recommended n_mov band.
void cmd_sweep(const CommonOptions& common, const std::vector<int>& nmov_list,
               int repeats);

/// Stage timing table over repeated runs; writes timing.csv and a manifest.
void cmd_bench(const CommonOptions& common, int repeats);

}  // namespace rcsw::cli
