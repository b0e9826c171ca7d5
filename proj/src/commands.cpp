#include "rcsw/commands.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "rcsw/clutter.hpp"
#include "rcsw/pipeline.hpp"
#include "rcsw/rdmap.hpp"
#include "rcsw/waveform.hpp"

namespace rcsw::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Context {
    Scenario scenario;
    fs::path out;
    json manifest;
    std::vector<std::string> outputs;
};

Context prepare(const CommonOptions& common, const std::string& command) {
    Context ctx;
    ctx.scenario = load_scenario_file(common.scenario_path);
    if (common.seed_override) ctx.scenario.seed = *common.seed_override;
    ctx.out = common.out_dir;
    std::error_code ec;
    fs::create_directories(ctx.out, ec);
    if (ec || !fs::is_directory(ctx.out))
        throw std::runtime_error("cannot create output directory: " +
                                 ctx.out.string());
    ctx.manifest["command"] = command;
    ctx.manifest["scenario_path"] = common.scenario_path;
    ctx.manifest["scenario"] = json::parse(save_scenario(ctx.scenario));
    ctx.manifest["seed"] = ctx.scenario.seed;
    ctx.manifest["threads"] = common.threads;
    return ctx;
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failure: " + path.string());
}

void emit(Context& ctx, const std::string& name, const std::string& content) {
    write_text(ctx.out / name, content);
    ctx.outputs.push_back(name);
}

void finish(Context& ctx) {
    ctx.manifest["outputs"] = ctx.outputs;
    write_text(ctx.out / "manifest.json", ctx.manifest.dump(2) + "\n");
}

std::string indexed_name(const char* prefix, int index, const char* suffix) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s%03d%s", prefix, index, suffix);
    return buf;
}

// Magnitudes to dB relative to the map maximum, for the plotting grids.
Eigen::MatrixXd normalized_db(const Eigen::MatrixXd& magnitude) {
    const double peak = magnitude.maxCoeff();
    Eigen::MatrixXd db(magnitude.rows(), magnitude.cols());
    for (Eigen::Index i = 0; i < magnitude.size(); ++i) {
        const double m = magnitude.data()[i];
        db.data()[i] =
            (peak > 0 && m > 0) ? 20.0 * std::log10(m / peak) : -300.0;
    }
    return db;
}

}  // namespace

void cmd_simulate(const CommonOptions& common) {
    Context ctx = prepare(common, "simulate");
    for (int k = 0; k < ctx.scenario.radar.scan_count; ++k) {
        IfMatrix m = synthesize_scan(ctx.scenario, k, ctx.scenario.seed);
        inject_clutter(m, ctx.scenario, ctx.scenario.seed);
        const std::string bin = indexed_name("scan_", k, ".c64");
        dump_if_matrix(m, (ctx.out / bin).string());
        ctx.outputs.push_back(bin);
        const std::string csv = indexed_name("raw_map_scan_", k, ".csv");
        write_map_csv(range_velocity_map(m).magnitude(), (ctx.out / csv).string());
        ctx.outputs.push_back(csv);
    }
    finish(ctx);
}

void cmd_detect(const CommonOptions& common, const std::string& scheme_name) {
    Context ctx = prepare(common, "detect");
    const Scheme scheme = scheme_from_string(scheme_name);
    ctx.manifest["scheme"] = scheme_name;

    RunOptions opts;
    opts.keep_maps = true;
    const DetectionReport report =
        run_scheme(ctx.scenario, scheme, ctx.scenario.seed, opts);

    emit(ctx, "report.json", report_json(report));
    write_masks_csv(report.masks, (ctx.out / "masks.csv").string());
    ctx.outputs.push_back("masks.csv");
    for (std::size_t k = 0; k < report.maps.size(); ++k) {
        const std::string grid =
            indexed_name("map_db_scan_", static_cast<int>(k), ".f32");
        write_map_f32(normalized_db(report.maps[k]), (ctx.out / grid).string());
        ctx.outputs.push_back(grid);
    }
    for (std::size_t k = 0; k < report.low_rank_maps.size(); ++k) {
        const std::string grid =
            indexed_name("static_map_db_scan_", static_cast<int>(k), ".f32");
        write_map_f32(normalized_db(report.low_rank_maps[k]),
                      (ctx.out / grid).string());
        ctx.outputs.push_back(grid);
    }
    if (!report.godec_trace.empty()) {
        write_trace_csv(report.godec_trace, (ctx.out / "godec_trace.csv").string());
        ctx.outputs.push_back("godec_trace.csv");
    }
    finish(ctx);
}

void cmd_sweep(const CommonOptions& common, const std::vector<int>& nmov_list,
               int repeats) {
    if (nmov_list.empty())
        throw std::invalid_argument("sweep: --nmov list must not be empty");
    if (repeats < 1)
        throw std::invalid_argument("sweep: --repeats must be >= 1");
    Context ctx = prepare(common, "sweep");
    ctx.manifest["nmov"] = nmov_list;
    ctx.manifest["repeats"] = repeats;

    const SweepResult sweep = sweep_nmov(ctx.scenario, nmov_list, repeats,
                                         ctx.scenario.seed, common.threads);
    emit(ctx, "sweep.csv", sweep_csv(sweep));
    emit(ctx, "final_report.json", report_json(sweep.final_report));
    write_masks_csv(sweep.final_report.masks,
                    (ctx.out / "final_masks.csv").string());
    ctx.outputs.push_back("final_masks.csv");
    ctx.manifest["optimal_n_mov"] = sweep.optimal_n_mov;
    ctx.manifest["recommended_n_mov_band"] = sweep.robust_band;
    finish(ctx);
}

void cmd_bench(const CommonOptions& common, int repeats) {
    if (repeats < 1)
        throw std::invalid_argument("bench: --repeats must be >= 1");
    Context ctx = prepare(common, "bench");
    ctx.manifest["repeats"] = repeats;
    const TimingTable table = benchmark(
        ctx.scenario,
        {Scheme::mti_ca, Scheme::mti_os, Scheme::godec_ca}, repeats,
        ctx.scenario.seed);
    emit(ctx, "timing.csv", timing_csv(table));
    finish(ctx);
}

}  // namespace rcsw::cli
