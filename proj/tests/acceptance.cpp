// End-to-end acceptance suite. Each criterion prints one [PASS]/[FAIL]
// line (plus detail lines) and the process exits nonzero if any evaluated
// criterion failed. `--only N` / `--skip N` select criteria.
//
// Scene-level checks run on the full-size reference scenario with fixed
// seeds; statistical checks state their tolerances inline.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "rcsw/cfar.hpp"
#include "rcsw/clutter.hpp"
#include "rcsw/godec.hpp"
#include "rcsw/mti.hpp"
#include "rcsw/pipeline.hpp"
#include "rcsw/rdmap.hpp"
#include "rcsw/rng.hpp"
#include "rcsw/scene.hpp"
#include "rcsw/waveform.hpp"

using namespace rcsw;

namespace {

int g_failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d (%s): %s\n", pass ? "PASS" : "FAIL", id, name,
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof buf, f, args);
    va_end(args);
    return buf;
}

Scenario reference_scene() {
    return load_scenario_file(std::string(RCSW_SCENARIO_DIR) + "/masking_scene.json");
}

Scenario band_scene() {
    return load_scenario_file(std::string(RCSW_SCENARIO_DIR) + "/band_overlap_scene.json");
}

double amplitude_db(double num, double den) { return 20.0 * std::log10(num / den); }

std::vector<Cell> all_truth_cells(const GroundTruth& truth) {
    std::vector<Cell> cells;
    for (const auto& obj : truth.objects)
        for (const Cell& c : obj.per_scan) cells.push_back(c);
    return cells;
}

// --- criterion 1: clutter statistics --------------------------------------

void criterion1() {
    const auto start = std::chrono::steady_clock::now();
    const Scenario sc = reference_scene();
    const WeibullSpec spec = WeibullSpec::from(sc.clutter, sc.radar.wavelength());
    const int n = 1 << 20;  // ~1.05e6 samples
    const double prf = 2048.0;
    const auto z = generate_coherent_weibull(n, spec, prf, 7);

    std::vector<double> amp(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) amp[i] = std::abs(z[i]);
    std::nth_element(amp.begin(), amp.begin() + n / 2, amp.end());
    const double median = amp[static_cast<std::size_t>(n) / 2];
    const double expected = spec.median_amplitude();

    const FitReport fit = validate_distribution(z, spec, prf);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();

    const bool median_ok = std::abs(median - expected) <= 0.01 * expected;
    const bool psd_ok = fit.psd_rms_db <= 2.0;
    const bool time_ok = secs < 10.0;
    report(1, "clutter statistics", median_ok && psd_ok && time_ok,
           fmt("median %.4f vs %.4f (1%% tol), psd rms %.2f dB (<=2), %.1f s (<10)",
               median, expected, fit.psd_rms_db, secs));
}

// --- criterion 2: masking effect -------------------------------------------

void criterion2() {
    const Scenario sc = reference_scene();
    int zero_reps = 0;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const double ca = run_scheme(sc, Scheme::raw_ca, seed).p_d;
        const double os = run_scheme(sc, Scheme::raw_os, seed).p_d;
        if (ca == 0.0 && os == 0.0) ++zero_reps;
        else detail += fmt(" seed %llu: ca %.1f os %.1f;", (unsigned long long)seed, ca, os);
    }
    report(2, "masking effect", zero_reps >= 9,
           fmt("raw_ca and raw_os both blind in %d of 10 repetitions (need >= 9)%s",
               zero_reps, detail.c_str()));
}

// --- criterion 3: MTI degradation ------------------------------------------

void criterion3() {
    const Scenario sc = reference_scene();
    Scenario toi_only = sc;
    toi_only.objects = {sc.objects[static_cast<std::size_t>(sc.target_index())]};
    SynthOptions signal_only;
    signal_only.include_noise = false;

    const AxisInfo axes = derive_axes(sc.radar, sc.radar.chirps_per_scan - 1);
    const GroundTruth truth = ground_truth(sc, axes);
    const std::vector<Cell> exclude = all_truth_cells(truth);

    bool band_ok = true, pd_ok = true;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        // The cancelled target response is measured signal-only (the cell is
        // interference-dominated once suppressed) against the full map floor.
        double band_db = 0.0;
        for (int k = 0; k < sc.radar.scan_count; ++k) {
            IfMatrix full = synthesize_scan(sc, k, seed);
            inject_clutter(full, sc, seed);
            const Eigen::MatrixXd map_full =
                range_velocity_map(single_delay_cancel(full)).magnitude();
            const IfMatrix clean = synthesize_scan(toi_only, k, seed, signal_only);
            const Eigen::MatrixXd map_toi =
                range_velocity_map(single_delay_cancel(clean)).magnitude();
            const Cell t = truth.toi_cell(k);
            band_db += amplitude_db(map_toi(t.range_bin, t.velocity_bin),
                                    background_median(map_full, exclude, 5));
        }
        band_db /= sc.radar.scan_count;
        const double ca = run_scheme(sc, Scheme::mti_ca, seed).p_d;
        const double os = run_scheme(sc, Scheme::mti_os, seed).p_d;
        if (!(band_db >= -20.0 && band_db <= -8.0)) band_ok = false;
        if (!(ca == 0.0 && os <= 0.3)) pd_ok = false;
        detail += fmt(" seed %llu: %.1f dB, mti_ca %.1f, mti_os %.1f;",
                      (unsigned long long)seed, band_db, ca, os);
    }
    report(3, "MTI degradation", band_ok && pd_ok,
           fmt("cancelled TOI vs floor in [-20,-8] dB and mti_ca=0, mti_os<=0.3:%s",
               detail.c_str()));
}

// --- criterion 4: decomposition recovery -----------------------------------

void criterion4() {
    const Scenario sc = reference_scene();
    const GroundTruth truth = ground_truth(sc, derive_axes(sc.radar));
    const std::vector<Cell> exclude = all_truth_cells(truth);

    double pd_sum = 0.0, db_sum = 0.0;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        RunOptions opts;
        opts.keep_maps = true;
        const DetectionReport r = run_scheme(sc, Scheme::godec_ca, seed, opts);
        std::vector<double> scan_db;
        for (int k = 0; k < sc.radar.scan_count; ++k) {
            const Cell t = truth.toi_cell(k);
            const double cell = std::abs(r.maps[static_cast<std::size_t>(k)](
                t.range_bin, t.velocity_bin));
            const double bg = background_median(
                r.raw_maps[static_cast<std::size_t>(k)], exclude, 5);
            scan_db.push_back(cell > 0 ? amplitude_db(cell, bg) : -100.0);
        }
        // typical level across the scans (a scan whose cell was not
        // extracted at all reads -100 dB and drags the median, not the tail)
        std::nth_element(scan_db.begin(), scan_db.begin() + scan_db.size() / 2,
                         scan_db.end());
        const double run_db = scan_db[scan_db.size() / 2];
        pd_sum += r.p_d;
        db_sum += run_db;
        detail += fmt(" seed %llu: P_d %.1f, TOI %.1f dB;", (unsigned long long)seed,
                      r.p_d, run_db);
    }
    const double pd = pd_sum / 3.0, db = db_sum / 3.0;
    report(4, "decomposition recovery", pd >= 0.9 && db >= 12.0,
           fmt("mean P_d %.2f (>=0.9), sparse TOI %.1f dB above floor (>=12):%s",
               pd, db, detail.c_str()));
}

// --- criterion 5: tradeoff structure ---------------------------------------

void criterion5() {
    const Scenario sc = reference_scene();
    const std::vector<int> grid{1, 5, 8, 11, 14, 18, 21, 25, 30, 40, 50, 100, 200};
    const SweepResult sweep = sweep_nmov(sc, grid, 3, 0, 2);

    bool nondecreasing = true, two_below = true, three_above = true;
    for (std::size_t vi = 0; vi < grid.size(); ++vi) {
        for (int rep = 0; rep < 3; ++rep) {
            const SweepPoint& p = sweep.points[vi * 3 + static_cast<std::size_t>(rep)];
            if (vi > 0 && p.iter_cov < sweep.points[(vi - 1) * 3 +
                                                    static_cast<std::size_t>(rep)]
                              .iter_cov)
                nondecreasing = false;
            if (grid[vi] <= 30 && p.iter_cov != 2) two_below = false;
            if (grid[vi] >= 40 && p.iter_cov < 3) three_above = false;
        }
    }
    const std::size_t best = static_cast<std::size_t>(
        std::max_element(sweep.f_bar.begin(), sweep.f_bar.end()) -
        sweep.f_bar.begin());
    const bool fbar_in_band = grid[best] >= 14 && grid[best] <= 40;

    const auto nfa_at = [&](int n_mov) {
        double sum = 0.0;
        for (std::size_t vi = 0; vi < grid.size(); ++vi)
            if (grid[vi] == n_mov)
                for (int rep = 0; rep < 3; ++rep)
                    sum += sweep.points[vi * 3 + static_cast<std::size_t>(rep)].n_fa;
        return sum / 3.0;
    };
    const double nfa5 = nfa_at(5), nfa100 = nfa_at(100);
    const bool nfa_ratio = nfa100 >= 3.0 * nfa5;

    std::string table = "\n    n_mov:";
    for (int v : grid) table += fmt(" %6d", v);
    table += "\n    f_bar:";
    for (double f : sweep.f_bar) table += fmt(" %6.3f", f);
    table += "\n    iter :";
    for (std::size_t vi = 0; vi < grid.size(); ++vi)
        table += fmt(" %6d", sweep.points[vi * 3].iter_cov);
    table += "\n    N_fa :";
    for (std::size_t vi = 0; vi < grid.size(); ++vi) {
        double s = 0;
        for (int rep = 0; rep < 3; ++rep)
            s += sweep.points[vi * 3 + static_cast<std::size_t>(rep)].n_fa;
        table += fmt(" %6.0f", s / 3.0);
    }

    std::printf("  criterion 5 sweep:%s\n", table.c_str());
    std::printf("  5a iter_cov nondecreasing: %s; =2 for n_mov<=30: %s; >=3 for n_mov>=40: %s\n",
                nondecreasing ? "yes" : "no", two_below ? "yes" : "no",
                three_above ? "yes" : "no");
    std::printf("  5b f_bar argmax at n_mov=%d (band [14,40]): %s\n", grid[best],
                fbar_in_band ? "yes" : "no");
    std::printf("  5c N_fa(100)=%.0f vs 3x N_fa(5)=%.0f: %s\n", nfa100, 3.0 * nfa5,
                nfa_ratio ? "yes" : "no");
    report(5, "tradeoff structure",
           nondecreasing && two_below && three_above && fbar_in_band && nfa_ratio,
           fmt("5a %s/%s/%s, 5b %s, 5c %s", nondecreasing ? "pass" : "FAIL",
               two_below ? "pass" : "FAIL", three_above ? "pass" : "FAIL",
               fbar_in_band ? "pass" : "FAIL", nfa_ratio ? "pass" : "FAIL"));
}

// --- criterion 6: performance-function exactness ---------------------------

void criterion6() {
    struct Column {
        int n_mov;
        double n_fa[3];
        double p_d[3];
        int iter[3];
        double f_bar;
    };
    // Reference per-run triples and their rounded mean performance values.
    const std::vector<Column> table = {
        {1, {3.4, 3.4, 2.9}, {0.0, 0.0, 0.0}, {2, 2, 2}, 0.309},
        {5, {5.5, 5.8, 4.6}, {0.2, 0.3, 0.1}, {2, 2, 2}, 0.340},
        {8, {4.8, 5.7, 5.7}, {0.2, 0.4, 0.1}, {2, 2, 2}, 0.348},
        {11, {5.1, 6.0, 6.4}, {0.4, 0.4, 0.4}, {2, 2, 2}, 0.387},
        {14, {6.8, 7.5, 8.3}, {0.6, 0.5, 0.5}, {2, 2, 2}, 0.413},
        {18, {13.1, 10.2, 10.3}, {0.6, 0.7, 1.0}, {2, 2, 2}, 0.462},
        {21, {13.8, 14.1, 12.1}, {0.9, 0.6, 0.7}, {2, 2, 2}, 0.451},
        {25, {15.3, 13.9, 13.2}, {1.0, 0.7, 0.7}, {2, 2, 2}, 0.467},
        {30, {17.4, 14.4, 14.6}, {0.8, 0.9, 0.8}, {2, 2, 2}, 0.474},
        {40, {20.3, 20.1, 19.2}, {0.9, 0.8, 0.7}, {3, 3, 3}, 0.379},
        {50, {21.9, 23.8, 24.3}, {0.8, 0.7, 0.9}, {3, 3, 3}, 0.377},
        {100, {34.5, 34.4, 34.8}, {0.9, 0.5, 0.8}, {4, 4, 4}, 0.315},
        {200, {27.1, 26.4, 25.2}, {0.8, 0.7, 0.7}, {5, 5, 5}, 0.293},
    };
    bool all_ok = true;
    std::string detail;
    for (const Column& col : table) {
        double sum = 0.0;
        for (int rep = 0; rep < 3; ++rep)
            sum += perf_score(col.iter[rep], col.p_d[rep], col.n_fa[rep]);
        const double rounded = std::round(sum / 3.0 * 1000.0) / 1000.0;
        if (std::abs(rounded - col.f_bar) > 5e-4) {
            all_ok = false;
            detail += fmt(" n_mov %d: %.3f vs %.3f;", col.n_mov, rounded, col.f_bar);
        }
    }
    report(6, "performance-function exactness", all_ok,
           all_ok ? "all 13 mean values reproduced to 3 decimals"
                  : "mismatches:" + detail);
}

// --- criterion 7: decomposition oracles ------------------------------------

Eigen::MatrixXd random_matrix(int rows, int cols, std::uint64_t seed) {
    Eigen::MatrixXd m(rows, cols);
    Xoshiro256 rng(seed);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
    return m;
}

void criterion7() {
    bool invariants_ok = true;
    for (int trial = 0; trial < 100; ++trial) {
        GodecParams params;
        params.rank_bound = 1 + trial % 3;
        params.power_exponent = trial % 4;
        params.error_bound = 1e-9;
        params.delta = 1e-7;
        params.iter_max = 10;
        const std::int64_t s = 3 + 2 * (trial % 8);
        const Eigen::MatrixXd x =
            random_matrix(20, 5, 500 + static_cast<std::uint64_t>(trial));
        godec_decompose(
            x, params, s, static_cast<std::uint64_t>(trial),
            [&](int, double, const Eigen::MatrixXd& l, const Eigen::MatrixXd& sp) {
                Eigen::JacobiSVD<Eigen::MatrixXd> svd(l);
                const auto& sv = svd.singularValues();
                int rank = 0;
                for (Eigen::Index i = 0; i < sv.size(); ++i)
                    if (sv[i] > 1e-8 * sv[0]) ++rank;
                std::int64_t nnz = 0;
                for (std::int64_t i = 0; i < sp.size(); ++i)
                    if (sp.data()[i] != 0.0) {
                        ++nnz;
                        if (sp.data()[i] != x.data()[i] - l.data()[i])
                            invariants_ok = false;
                    }
                if (rank > params.rank_bound || nnz > s) invariants_ok = false;
            });
    }

    bool planted_ok = true;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Xoshiro256 rng(seed);
        const Eigen::MatrixXd l_true = random_matrix(256, 1, seed * 3 + 1) *
                                       random_matrix(128, 1, seed * 3 + 2).transpose();
        Eigen::MatrixXd s_true = Eigen::MatrixXd::Zero(256, 128);
        std::int64_t placed = 0;
        while (placed < 50) {
            const std::int64_t i = static_cast<std::int64_t>(rng.next() % s_true.size());
            if (s_true.data()[i] != 0.0) continue;
            s_true.data()[i] = (rng.next() & 1 ? 100.0 : -100.0);
            ++placed;
        }
        GodecParams params;
        params.rank_bound = 1;
        params.power_exponent = 3;
        params.error_bound = 1e-10;
        params.delta = 1e-12;
        params.iter_max = 50;
        const GodecResult r = godec_decompose(l_true + s_true, params, 50, seed);
        for (std::int64_t i = 0; i < s_true.size(); ++i)
            if ((r.sparse.data()[i] != 0.0) != (s_true.data()[i] != 0.0))
                planted_ok = false;
    }

    bool brp_ok = true;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Eigen::MatrixXd x = random_matrix(20, 1, seed) *
                                  random_matrix(5, 1, seed + 900).transpose();
        GodecParams params;
        params.rank_bound = 1;
        params.power_exponent = 3;
        params.error_bound = 1e-12;
        params.delta = 1e-14;
        params.iter_max = 4;
        const GodecResult r = godec_decompose(x, params, 0, seed);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(
            x, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Eigen::MatrixXd rank1 = svd.singularValues()[0] *
                                      svd.matrixU().col(0) *
                                      svd.matrixV().col(0).transpose();
        if ((r.low_rank - rank1).norm() > 1e-6 * x.norm()) brp_ok = false;
    }

    bool project_ok = true;
    Xoshiro256 rng(8);
    for (int trial = 0; trial < 1000; ++trial) {
        Eigen::MatrixXd x(7, 5);
        for (Eigen::Index i = 0; i < x.size(); ++i)
            x.data()[i] = static_cast<double>(static_cast<int>(rng.next() % 9)) - 4.0;
        const std::int64_t s = static_cast<std::int64_t>(rng.next() % 36);
        // full-sort oracle
        std::vector<std::int64_t> idx(static_cast<std::size_t>(x.size()));
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::int64_t a, std::int64_t b) {
            const double ma = std::abs(x.data()[a]), mb = std::abs(x.data()[b]);
            if (ma != mb) return ma > mb;
            return a < b;
        });
        Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(7, 5);
        for (std::int64_t i = 0; i < s; ++i)
            expected.data()[idx[static_cast<std::size_t>(i)]] =
                x.data()[idx[static_cast<std::size_t>(i)]];
        if (sparse_project(x, s) != expected) project_ok = false;
    }

    report(7, "decomposition oracles",
           invariants_ok && planted_ok && brp_ok && project_ok,
           fmt("invariants(100 runs) %s, planted support(5) %s, svd oracle(20) %s, "
               "projection vs sort(1000) %s",
               invariants_ok ? "pass" : "FAIL", planted_ok ? "pass" : "FAIL",
               brp_ok ? "pass" : "FAIL", project_ok ? "pass" : "FAIL"));
}

// --- criterion 8: CFAR calibration -----------------------------------------

void criterion8() {
    const double alpha = ca_threshold_factor(1e-9, 40);
    const bool alpha_ok = std::abs(alpha - 27.15) <= 0.01;

    CfarParams params;
    params.guard_cells = 8;
    params.reference_cells = 40;
    params.false_alarm_rate = 1e-3;
    params.os_rank = 10;
    const int rows = 1024, cols = 1024;
    Eigen::MatrixXd field(rows, cols);
    Xoshiro256 rng(77);
    for (Eigen::Index i = 0; i < field.size(); ++i)
        field.data()[i] = -std::log(rng.uniform_pos());
    const auto det = cfar_detect(field, params, CfarKind::ca);
    const double n = static_cast<double>(rows) * cols;
    const double expected = n * 1e-3;
    const double sigma = std::sqrt(n * 1e-3 * (1 - 1e-3));
    const bool mc_ok =
        std::abs(static_cast<double>(det.cells.size()) - expected) <= 3.0 * sigma;

    report(8, "CFAR calibration", alpha_ok && mc_ok,
           fmt("alpha(40,1e-9)=%.4f (27.15 +/- 0.01); %zu detections vs %.0f +/- %.0f",
               alpha, det.cells.size(), expected, 3.0 * sigma));
}

// --- criterion 9: timing ordering ------------------------------------------

void criterion9() {
    const Scenario sc = reference_scene();
    const TimingTable table =
        benchmark(sc, {Scheme::mti_ca, Scheme::mti_os, Scheme::godec_ca}, 2, 5);
    for (const TimingRow& row : table.rows)
        std::printf("  bench %s/%s: %.4f s, %lld flops\n", to_string(row.scheme),
                    row.stage.c_str(), row.mean_seconds,
                    static_cast<long long>(row.flops));
    // The CFAR stage is summarized across both detector kinds; absolute
    // seconds are machine facts, only the ordering is asserted.
    double cfar_sum = 0.0;
    int cfar_rows = 0;
    for (const TimingRow& row : table.rows)
        if (row.stage == "ca_cfar" || row.stage == "os_cfar") {
            cfar_sum += row.mean_seconds;
            ++cfar_rows;
        }
    const double cfar = cfar_sum / cfar_rows;
    const double godec = table.stage_mean("godec");
    const double mti = table.stage_mean("mti");
    report(9, "timing ordering", cfar > godec && godec > mti,
           fmt("cfar %.3f s > godec %.3f s > mti %.4f s", cfar, godec, mti));
}

// --- criterion 10: band-overlap emulation ----------------------------------

void criterion10() {
    const Scenario sc = band_scene();
    bool mti_blind = true;
    double best_pd = 0.0;
    int best_nmov = 0;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 2; ++seed) {
        const double os = run_scheme(sc, Scheme::mti_os, seed).p_d;
        if (os != 0.0) mti_blind = false;
        detail += fmt(" seed %llu: mti_os %.1f,", (unsigned long long)seed, os);
        for (int n_mov : {4, 6, 10}) {
            RunOptions opts;
            opts.n_mov_override = n_mov;
            const double pd = run_scheme(sc, Scheme::godec_ca, seed, opts).p_d;
            if (pd > best_pd) {
                best_pd = pd;
                best_nmov = n_mov;
            }
        }
        detail += fmt(" godec best so far %.1f @ n_mov %d;", best_pd, best_nmov);
    }
    report(10, "band-overlap emulation", mti_blind && best_pd > 0.0,
           fmt("mti_os blind: %s; godec P_d %.1f at n_mov %d:%s",
               mti_blind ? "yes" : "no", best_pd, best_nmov, detail.c_str()));
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0, skip = 0;
    for (int i = 1; i + 1 < argc; i += 2) {
        if (!std::strcmp(argv[i], "--only")) only = std::atoi(argv[i + 1]);
        if (!std::strcmp(argv[i], "--skip")) skip = std::atoi(argv[i + 1]);
    }
    const auto want = [&](int id) {
        if (only) return id == only;
        return id != skip;
    };
    if (want(1)) criterion1();
    if (want(2)) criterion2();
    if (want(3)) criterion3();
    if (want(4)) criterion4();
    if (want(5)) criterion5();
    if (want(6)) criterion6();
    if (want(7)) criterion7();
    if (want(8)) criterion8();
    if (want(9)) criterion9();
    if (want(10)) criterion10();
    if (g_failures > 0)
        std::printf("%d criterion(s) failed\n", g_failures);
    else
        std::puts("all evaluated criteria passed");
    return g_failures > 0 ? 1 : 0;
}
