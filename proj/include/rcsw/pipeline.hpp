#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "rcsw/cfar.hpp"
#include "rcsw/godec.hpp"
#include "rcsw/rdmap.hpp"
#include "rcsw/scene.hpp"

namespace rcsw {

enum class Scheme { raw_ca, raw_os, mti_ca, mti_os, godec_ca };

const char* to_string(Scheme scheme);
/// Throws with the list of valid names on an unknown scheme.
Scheme scheme_from_string(const std::string& name);
CfarKind scheme_detector(Scheme scheme);
bool scheme_uses_mti(Scheme scheme);
bool scheme_uses_godec(Scheme scheme);

/// Per-scan true cell coordinates of every scene object, derived from the
/// scenario kinematics and the map axes. Velocity bins wrap (Doppler is
/// periodic); range bins are guaranteed in-map by the unambiguous-range
/// check.
struct GroundTruth {
    struct ObjectCells {
        ObjectKind kind = ObjectKind::static_io;
        std::vector<Cell> per_scan;
    };
    std::vector<ObjectCells> objects;
    int toi_index = -1;

    const Cell& toi_cell(int scan) const;
};

GroundTruth ground_truth(const Scenario& scenario, const AxisInfo& axes);

struct Score {
    double n_fa = 0.0;  // mean false-alarm cells per scan
    double p_d = 0.0;   // fraction of scans with a credited TOI detection
};

/// Scores detection masks against ground truth. A detection is credited to
/// the TOI when it lies within +/- tolerance_bins of the TOI's true cell in
/// both dimensions, is strictly closer (Chebyshev) to the TOI cell than to
/// any interference object's cell, and does not sit on an interference
/// object's range row or velocity column (within one bin) where that
/// object's spectral-leakage bands live. Mobile-IO detections are true
/// positives excluded from N_fa; everything else (including static-IO
/// residuals and band cells) counts as a false alarm.
Score score(const std::vector<DetectionMask>& masks, const GroundTruth& truth,
            int tolerance_bins = 2);

/// Normalized performance function
/// f = 0.5 (1/iter_cov + 0.5 (P_d + 1/(N_fa + 1))), range (0, 1].
double perf_score(int iter_cov, double p_d, double n_fa);

struct StageTiming {
    double synth_s = 0.0;
    double rdmap_s = 0.0;
    double mti_s = 0.0;
    double godec_s = 0.0;
    double cfar_s = 0.0;
};

struct DetectionReport {
    Scheme scheme = Scheme::raw_ca;
    std::vector<DetectionMask> masks;
    double n_fa = 0.0;
    double p_d = 0.0;
    int iter_cov = 0;  // 0 for schemes without the decomposition
    double f = std::numeric_limits<double>::quiet_NaN();
    double epsilon = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> godec_trace;

    StageTiming timing;
    std::int64_t mti_flop_count = 0;
    std::int64_t godec_flop_count = 0;
    std::int64_t cfar_flop_count = 0;        // CA adds
    std::int64_t cfar_comparison_count = 0;  // OS sort comparisons

    // Populated when RunOptions::keep_maps is set.
    std::vector<Eigen::MatrixXd> maps;          // magnitudes fed to CFAR
    std::vector<Eigen::MatrixXd> raw_maps;      // pre-decomposition maps (godec only)
    std::vector<Eigen::MatrixXd> low_rank_maps; // static part (godec only)
};

struct RunOptions {
    bool keep_maps = false;
    int n_mov_override = 0;  // > 0 replaces scenario godec.n_mov
};

/// Synthesizes K scans (echoes + noise + clutter), applies the scheme's
/// suppression and detector, and scores against ground truth. For the
/// decomposition scheme, detection runs on the unstacked sparse maps.
/// Deterministic in (scenario, scheme, run_seed); timings excepted.
DetectionReport run_scheme(const Scenario& scenario, Scheme scheme,
                           std::uint64_t run_seed, const RunOptions& opts = {});
DetectionReport run_scheme(const Scenario& scenario, Scheme scheme);

struct SweepPoint {
    int n_mov = 0;
    int repeat = 0;
    double n_fa = 0.0;
    double p_d = 0.0;
    int iter_cov = 0;
    double f = 0.0;
};

struct SweepResult {
    std::vector<int> nmov_values;
    std::vector<SweepPoint> points;  // one per (n_mov, repeat)
    std::vector<double> f_bar;       // per n_mov, mean over repeats
    int optimal_n_mov = 0;           // argmax of f_bar
    std::vector<int> robust_band;    // values with f_bar >= 95% of the max
    DetectionReport final_report;    // re-run at the optimum
};

/// Evaluates the sparsity knob over a grid: per (n_mov, repeat) metrics,
/// mean performance, the argmax and the >= 95%-of-max band, then a final
/// detection run at the optimum. Scans are synthesized once per repeat and
/// shared across grid points; `threads` > 1 decomposes grid points
/// concurrently with independent substreams.
SweepResult sweep_nmov(const Scenario& scenario,
                       const std::vector<int>& nmov_values, int repeats,
                       std::uint64_t seed, int threads = 1);

struct TimingRow {
    Scheme scheme = Scheme::raw_ca;
    std::string stage;
    double mean_seconds = 0.0;
    std::int64_t flops = 0;
};

struct TimingTable {
    std::vector<TimingRow> rows;
    double stage_mean(const std::string& stage) const;
};

/// Mean wall-clock per processing stage across repeated scheme runs, with
/// the analytic flop counts alongside.
TimingTable benchmark(const Scenario& scenario, const std::vector<Scheme>& schemes,
                      int repeats, std::uint64_t seed);

/// Median magnitude over map cells farther than exclusion_radius (Chebyshev)
/// from every listed cell; the interference-free background level.
double background_median(const Eigen::MatrixXd& magnitude,
                         const std::vector<Cell>& exclude,
                         int exclusion_radius);

std::string sweep_csv(const SweepResult& sweep);
std::string timing_csv(const TimingTable& table);
std::string report_json(const DetectionReport& report);

}  // namespace rcsw
