#include "rcsw/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "rcsw/clutter.hpp"
#include "rcsw/mti.hpp"
#include "rcsw/rng.hpp"
#include "rcsw/waveform.hpp"

namespace rcsw {

const char* to_string(Scheme scheme) {
    switch (scheme) {
        case Scheme::raw_ca: return "raw_ca";
        case Scheme::raw_os: return "raw_os";
        case Scheme::mti_ca: return "mti_ca";
        case Scheme::mti_os: return "mti_os";
        case Scheme::godec_ca: return "godec_ca";
    }
    return "?";
}

Scheme scheme_from_string(const std::string& name) {
    if (name == "raw_ca") return Scheme::raw_ca;
    if (name == "raw_os") return Scheme::raw_os;
    if (name == "mti_ca") return Scheme::mti_ca;
    if (name == "mti_os") return Scheme::mti_os;
    if (name == "godec_ca") return Scheme::godec_ca;
    throw std::invalid_argument(
        "unknown scheme '" + name +
        "' (valid: raw_ca, raw_os, mti_ca, mti_os, godec_ca)");
}

CfarKind scheme_detector(Scheme scheme) {
    return (scheme == Scheme::raw_os || scheme == Scheme::mti_os) ? CfarKind::os
                                                                  : CfarKind::ca;
}

bool scheme_uses_mti(Scheme scheme) {
    return scheme == Scheme::mti_ca || scheme == Scheme::mti_os;
}

bool scheme_uses_godec(Scheme scheme) { return scheme == Scheme::godec_ca; }

const Cell& GroundTruth::toi_cell(int scan) const {
    if (toi_index < 0) throw std::runtime_error("ground truth has no target");
    return objects[static_cast<std::size_t>(toi_index)]
        .per_scan[static_cast<std::size_t>(scan)];
}

GroundTruth ground_truth(const Scenario& scenario, const AxisInfo& axes) {
    GroundTruth truth;
    const int scans = scenario.radar.scan_count;
    for (const SceneObject& obj : scenario.objects) {
        GroundTruth::ObjectCells cells;
        cells.kind = obj.kind;
        for (int k = 0; k < scans; ++k) {
            const double range = obj.range_at_scan(k, scenario.radar.scan_interval_s);
            const int rbin =
                static_cast<int>(std::lround(axes.range_bin_of(range)));
            if (rbin < 0 || rbin >= axes.range_bins)
                throw std::runtime_error("ground truth range bin out of map bounds");
            const int n = axes.velocity_bins;
            int vbin = static_cast<int>(
                std::lround(axes.velocity_bin_of(obj.radial_velocity_mps)));
            vbin = ((vbin % n) + n) % n;  // Doppler wraps
            cells.per_scan.push_back({rbin, vbin});
        }
        if (obj.kind == ObjectKind::target)
            truth.toi_index = static_cast<int>(truth.objects.size());
        truth.objects.push_back(std::move(cells));
    }
    return truth;
}

namespace {

int cheb(const Cell& a, const Cell& b) {
    return std::max(std::abs(a.range_bin - b.range_bin),
                    std::abs(a.velocity_bin - b.velocity_bin));
}

}  // namespace

Score score(const std::vector<DetectionMask>& masks, const GroundTruth& truth,
            int tolerance_bins) {
    if (masks.empty()) throw std::invalid_argument("score: empty mask list");
    if (truth.toi_index < 0)
        throw std::invalid_argument("score: ground truth has no target");

    int toi_scans = 0;
    std::int64_t false_alarms = 0;
    for (std::size_t k = 0; k < masks.size(); ++k) {
        bool toi_seen = false;
        for (const Cell& d : masks[k].cells) {
            int d_toi = std::numeric_limits<int>::max();
            int d_io = std::numeric_limits<int>::max();
            int d_mobile = std::numeric_limits<int>::max();
            bool on_io_band = false;
            for (std::size_t o = 0; o < truth.objects.size(); ++o) {
                const Cell& cell = truth.objects[o].per_scan[k];
                const int dist = cheb(d, cell);
                if (static_cast<int>(o) == truth.toi_index) {
                    d_toi = std::min(d_toi, dist);
                } else {
                    d_io = std::min(d_io, dist);
                    if (truth.objects[o].kind == ObjectKind::mobile_io)
                        d_mobile = std::min(d_mobile, dist);
                    // Spectral-leakage bands run along a reflector's range
                    // row and velocity column; detections on them belong to
                    // the reflector no matter how far out they sit.
                    if (std::abs(d.range_bin - cell.range_bin) <= 1 ||
                        std::abs(d.velocity_bin - cell.velocity_bin) <= 1)
                        on_io_band = true;
                }
            }
            if (d_toi <= tolerance_bins && d_toi < d_io && !on_io_band) {
                toi_seen = true;
            } else if (d_mobile <= tolerance_bins) {
                // mobile-IO echo: true positive, but not the TOI
            } else {
                ++false_alarms;
            }
        }
        if (toi_seen) ++toi_scans;
    }
    Score s;
    s.p_d = static_cast<double>(toi_scans) / static_cast<double>(masks.size());
    s.n_fa = static_cast<double>(false_alarms) / static_cast<double>(masks.size());
    return s;
}

double perf_score(int iter_cov, double p_d, double n_fa) {
    if (iter_cov < 1)
        throw std::invalid_argument("perf_score: iter_cov must be >= 1");
    if (!(p_d >= 0.0 && p_d <= 1.0))
        throw std::invalid_argument("perf_score: p_d must lie in [0,1]");
    if (!(n_fa >= 0.0))
        throw std::invalid_argument("perf_score: n_fa must be >= 0");
    return 0.5 * (1.0 / iter_cov + 0.5 * (p_d + 1.0 / (n_fa + 1.0)));
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<IfMatrix> synthesize_scene(const Scenario& scenario,
                                       std::uint64_t run_seed) {
    std::vector<IfMatrix> scans;
    scans.reserve(static_cast<std::size_t>(scenario.radar.scan_count));
    for (int k = 0; k < scenario.radar.scan_count; ++k) {
        IfMatrix m = synthesize_scan(scenario, k, run_seed);
        inject_clutter(m, scenario, run_seed);
        scans.push_back(std::move(m));
    }
    return scans;
}

}  // namespace

DetectionReport run_scheme(const Scenario& scenario, Scheme scheme) {
    return run_scheme(scenario, scheme, scenario.seed);
}

DetectionReport run_scheme(const Scenario& scenario, Scheme scheme,
                           std::uint64_t run_seed, const RunOptions& opts) {
    validate(scenario);
    if (scenario.target_index() < 0)
        throw std::invalid_argument("run_scheme: scenario requires a target object");

    DetectionReport report;
    report.scheme = scheme;
    const RadarParams& radar = scenario.radar;
    const int scans = radar.scan_count;

    auto t0 = Clock::now();
    std::vector<IfMatrix> iq = synthesize_scene(scenario, run_seed);
    report.timing.synth_s = seconds_since(t0);

    if (scheme_uses_mti(scheme)) {
        t0 = Clock::now();
        for (IfMatrix& m : iq) m = single_delay_cancel(m);
        report.timing.mti_s = seconds_since(t0);
        report.mti_flop_count =
            static_cast<std::int64_t>(scans) *
            mti_flops(radar.samples_per_chirp, radar.chirps_per_scan);
    }

    t0 = Clock::now();
    std::vector<Eigen::MatrixXd> mags;
    mags.reserve(iq.size());
    for (const IfMatrix& m : iq) mags.push_back(range_velocity_map(m).magnitude());
    report.timing.rdmap_s = seconds_since(t0);

    std::vector<Eigen::MatrixXd>* detect_maps = &mags;
    std::vector<Eigen::MatrixXd> sparse_maps;
    if (scheme_uses_godec(scheme)) {
        const RvsMatrix x = stack_magnitudes(mags);
        GodecParams gp = scenario.godec;
        if (opts.n_mov_override > 0) gp.n_mov = opts.n_mov_override;
        const std::int64_t s =
            sparsity_from_n_mov(gp.n_mov, x.map_cols, x.scans);
        t0 = Clock::now();
        const GodecResult g = godec_decompose(
            x.data, gp, s,
            substream_seed(run_seed, kStreamGodec,
                           static_cast<std::uint64_t>(gp.n_mov)));
        report.timing.godec_s = seconds_since(t0);
        report.iter_cov = g.iter_cov;
        report.epsilon = g.epsilon;
        report.godec_trace = g.trace;
        report.godec_flop_count =
            godec_flops(x.map_rows, x.map_cols, x.scans, gp.rank_bound,
                        gp.power_exponent, g.iter_cov);
        sparse_maps = unstack_like(g.sparse, x);
        detect_maps = &sparse_maps;
        if (opts.keep_maps) report.low_rank_maps = unstack_like(g.low_rank, x);
    }

    const CfarKind kind = scheme_detector(scheme);
    t0 = Clock::now();
    for (int k = 0; k < scans; ++k) {
        DetectionMask mask =
            cfar_detect((*detect_maps)[static_cast<std::size_t>(k)]
                            .array()
                            .square()
                            .matrix(),
                        scenario.cfar, kind);
        mask.scan_index = k;
        report.masks.push_back(std::move(mask));
    }
    report.timing.cfar_s = seconds_since(t0);

    const std::int64_t cuts =
        static_cast<std::int64_t>((*detect_maps)[0].size()) * scans;
    if (kind == CfarKind::ca)
        report.cfar_flop_count = ca_cfar_flops(scenario.cfar.reference_cells, cuts);
    else
        report.cfar_comparison_count =
            os_cfar_comparisons(scenario.cfar.reference_cells, cuts);

    const AxisInfo axes =
        derive_axes(radar, static_cast<int>((*detect_maps)[0].cols()));
    const Score sc = score(report.masks, ground_truth(scenario, axes));
    report.n_fa = sc.n_fa;
    report.p_d = sc.p_d;
    if (scheme_uses_godec(scheme))
        report.f = perf_score(report.iter_cov, report.p_d, report.n_fa);

    if (opts.keep_maps) {
        if (scheme_uses_godec(scheme)) {
            report.maps = std::move(sparse_maps);
            report.raw_maps = std::move(mags);
        } else {
            report.maps = std::move(mags);
        }
    }
    return report;
}

SweepResult sweep_nmov(const Scenario& scenario,
                       const std::vector<int>& nmov_values, int repeats,
                       std::uint64_t seed, int threads) {
    if (nmov_values.empty())
        throw std::invalid_argument("sweep_nmov: empty n_mov list");
    if (repeats < 1)
        throw std::invalid_argument("sweep_nmov: repeats must be >= 1");
    validate(scenario);
    for (int v : nmov_values)
        if (v < 1 || v > scenario.radar.samples_per_chirp)
            throw std::invalid_argument("sweep_nmov: n_mov out of (0, M]");

    SweepResult result;
    result.nmov_values = nmov_values;
    result.points.resize(nmov_values.size() * static_cast<std::size_t>(repeats));

    for (int rep = 0; rep < repeats; ++rep) {
        const std::uint64_t rep_seed =
            substream_seed(scenario.seed ^ seed, kStreamRepeat,
                           static_cast<std::uint64_t>(rep));
        std::vector<IfMatrix> iq = synthesize_scene(scenario, rep_seed);
        std::vector<Eigen::MatrixXd> mags;
        mags.reserve(iq.size());
        for (const IfMatrix& m : iq)
            mags.push_back(range_velocity_map(m).magnitude());
        iq.clear();
        const RvsMatrix x = stack_magnitudes(mags);
        const AxisInfo axes = derive_axes(scenario.radar);
        const GroundTruth truth = ground_truth(scenario, axes);

        const auto eval_point = [&](std::size_t vi) {
            const int n_mov = nmov_values[vi];
            GodecParams gp = scenario.godec;
            gp.n_mov = n_mov;
            const std::int64_t s = sparsity_from_n_mov(n_mov, x.map_cols, x.scans);
            const GodecResult g = godec_decompose(
                x.data, gp, s,
                substream_seed(rep_seed, kStreamGodec,
                               static_cast<std::uint64_t>(n_mov)));
            std::vector<Eigen::MatrixXd> sparse_maps = unstack_like(g.sparse, x);
            std::vector<DetectionMask> masks;
            for (int k = 0; k < x.scans; ++k) {
                DetectionMask mask = cfar_detect(
                    sparse_maps[static_cast<std::size_t>(k)].array().square().matrix(),
                    scenario.cfar, CfarKind::ca);
                mask.scan_index = k;
                masks.push_back(std::move(mask));
            }
            const Score sc = score(masks, truth);
            SweepPoint point;
            point.n_mov = n_mov;
            point.repeat = rep;
            point.n_fa = sc.n_fa;
            point.p_d = sc.p_d;
            point.iter_cov = g.iter_cov;
            point.f = perf_score(g.iter_cov, sc.p_d, sc.n_fa);
            result.points[vi * static_cast<std::size_t>(repeats) +
                          static_cast<std::size_t>(rep)] = point;
        };

        if (threads <= 1) {
            for (std::size_t vi = 0; vi < nmov_values.size(); ++vi) eval_point(vi);
        } else {
            std::size_t next = 0;
            while (next < nmov_values.size()) {
                std::vector<std::thread> pool;
                const std::size_t batch = std::min<std::size_t>(
                    static_cast<std::size_t>(threads), nmov_values.size() - next);
                for (std::size_t i = 0; i < batch; ++i)
                    pool.emplace_back(eval_point, next + i);
                for (auto& th : pool) th.join();
                next += batch;
            }
        }
    }

    result.f_bar.resize(nmov_values.size());
    for (std::size_t vi = 0; vi < nmov_values.size(); ++vi) {
        double sum = 0.0;
        for (int rep = 0; rep < repeats; ++rep)
            sum += result
                       .points[vi * static_cast<std::size_t>(repeats) +
                               static_cast<std::size_t>(rep)]
                       .f;
        result.f_bar[vi] = sum / repeats;
    }
    const std::size_t best =
        static_cast<std::size_t>(std::max_element(result.f_bar.begin(),
                                                  result.f_bar.end()) -
                                 result.f_bar.begin());
    result.optimal_n_mov = nmov_values[best];
    for (std::size_t vi = 0; vi < nmov_values.size(); ++vi)
        if (result.f_bar[vi] >= 0.95 * result.f_bar[best])
            result.robust_band.push_back(nmov_values[vi]);

    RunOptions opts;
    opts.n_mov_override = result.optimal_n_mov;
    result.final_report = run_scheme(
        scenario, Scheme::godec_ca,
        substream_seed(scenario.seed ^ seed, kStreamRepeat,
                       static_cast<std::uint64_t>(repeats)),
        opts);
    return result;
}

double TimingTable::stage_mean(const std::string& stage) const {
    double sum = 0.0;
    int count = 0;
    for (const TimingRow& row : rows)
        if (row.stage == stage) {
            sum += row.mean_seconds;
            ++count;
        }
    return count > 0 ? sum / count : 0.0;
}

TimingTable benchmark(const Scenario& scenario, const std::vector<Scheme>& schemes,
                      int repeats, std::uint64_t seed) {
    if (repeats < 1)
        throw std::invalid_argument("benchmark: repeats must be >= 1");
    TimingTable table;
    for (Scheme scheme : schemes) {
        StageTiming sum;
        std::int64_t mti_fl = 0, godec_fl = 0, ca_fl = 0, os_cmp = 0;
        for (int rep = 0; rep < repeats; ++rep) {
            const DetectionReport r = run_scheme(
                scenario, scheme,
                substream_seed(scenario.seed ^ seed, kStreamRepeat,
                               static_cast<std::uint64_t>(rep)));
            sum.mti_s += r.timing.mti_s;
            sum.godec_s += r.timing.godec_s;
            sum.cfar_s += r.timing.cfar_s;
            mti_fl = r.mti_flop_count;
            godec_fl = r.godec_flop_count;
            ca_fl = r.cfar_flop_count;
            os_cmp = r.cfar_comparison_count;
        }
        if (scheme_uses_mti(scheme))
            table.rows.push_back(
                {scheme, "mti", sum.mti_s / repeats, mti_fl});
        if (scheme_uses_godec(scheme))
            table.rows.push_back(
                {scheme, "godec", sum.godec_s / repeats, godec_fl});
        if (scheme_detector(scheme) == CfarKind::ca)
            table.rows.push_back(
                {scheme, "ca_cfar", sum.cfar_s / repeats, ca_fl});
        else
            table.rows.push_back(
                {scheme, "os_cfar", sum.cfar_s / repeats, os_cmp});
    }
    return table;
}

double background_median(const Eigen::MatrixXd& magnitude,
                         const std::vector<Cell>& exclude,
                         int exclusion_radius) {
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(magnitude.size()));
    for (int v = 0; v < magnitude.cols(); ++v) {
        for (int r = 0; r < magnitude.rows(); ++r) {
            bool excluded = false;
            for (const Cell& c : exclude) {
                if (std::max(std::abs(r - c.range_bin),
                             std::abs(v - c.velocity_bin)) <= exclusion_radius) {
                    excluded = true;
                    break;
                }
            }
            if (!excluded) values.push_back(magnitude(r, v));
        }
    }
    if (values.empty())
        throw std::invalid_argument("background_median: everything excluded");
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                     values.end());
    return values[mid];
}

std::string sweep_csv(const SweepResult& sweep) {
    std::ostringstream out;
    out << "n_mov,repeat,n_fa,p_d,iter_cov,f,f_bar\n";
    const std::size_t repeats =
        sweep.points.size() / sweep.nmov_values.size();
    for (std::size_t vi = 0; vi < sweep.nmov_values.size(); ++vi) {
        for (std::size_t rep = 0; rep < repeats; ++rep) {
            const SweepPoint& p = sweep.points[vi * repeats + rep];
            char line[160];
            std::snprintf(line, sizeof line, "%d,%d,%.6g,%.6g,%d,%.6f,%.6f\n",
                          p.n_mov, p.repeat, p.n_fa, p.p_d, p.iter_cov, p.f,
                          sweep.f_bar[vi]);
            out << line;
        }
    }
    return out.str();
}

std::string timing_csv(const TimingTable& table) {
    std::ostringstream out;
    out << "scheme,stage,mean_seconds,flops\n";
    for (const TimingRow& row : table.rows) {
        char line[160];
        std::snprintf(line, sizeof line, "%s,%s,%.6f,%lld\n",
                      to_string(row.scheme), row.stage.c_str(), row.mean_seconds,
                      static_cast<long long>(row.flops));
        out << line;
    }
    return out.str();
}

std::string report_json(const DetectionReport& report) {
    nlohmann::json j;
    j["scheme"] = to_string(report.scheme);
    j["p_d"] = report.p_d;
    j["n_fa"] = report.n_fa;
    j["iter_cov"] = report.iter_cov;
    if (std::isfinite(report.f))
        j["f"] = report.f;
    else
        j["f"] = nullptr;
    if (std::isfinite(report.epsilon))
        j["epsilon"] = report.epsilon;
    else
        j["epsilon"] = nullptr;
    j["detections_per_scan"] = nlohmann::json::array();
    for (const DetectionMask& m : report.masks)
        j["detections_per_scan"].push_back(m.cells.size());
    j["timing"] = {{"synth_s", report.timing.synth_s},
                   {"rdmap_s", report.timing.rdmap_s},
                   {"mti_s", report.timing.mti_s},
                   {"godec_s", report.timing.godec_s},
                   {"cfar_s", report.timing.cfar_s}};
    j["flops"] = {{"mti", report.mti_flop_count},
                  {"godec", report.godec_flop_count},
                  {"ca_cfar", report.cfar_flop_count},
                  {"os_cfar_comparisons", report.cfar_comparison_count}};
    return j.dump(2) + "\n";
}

}  // namespace rcsw
