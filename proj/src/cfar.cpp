#include "rcsw/cfar.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace rcsw {

const char* to_string(CfarKind kind) { return kind == CfarKind::ca ? "ca" : "os"; }

double ca_threshold_factor(double p_fa, int n_reference) {
    if (!(p_fa > 0.0 && p_fa < 1.0))
        throw std::invalid_argument("ca_threshold_factor: p_fa must lie in (0,1)");
    if (n_reference < 1)
        throw std::invalid_argument("ca_threshold_factor: n_reference must be >= 1");
    return n_reference * (std::pow(p_fa, -1.0 / n_reference) - 1.0);
}

namespace {

double os_pfa(double alpha, int n_reference, int k_os) {
    double p = 1.0;
    for (int i = 0; i < k_os; ++i) {
        const double m = static_cast<double>(n_reference - i);
        p *= m / (m + alpha);
    }
    return p;
}

}  // namespace

double os_threshold_factor(double p_fa, int n_reference, int k_strongest) {
    if (!(p_fa > 0.0 && p_fa < 1.0))
        throw std::invalid_argument("os_threshold_factor: p_fa must lie in (0,1)");
    if (k_strongest < 1 || k_strongest > n_reference)
        throw std::invalid_argument("os_threshold_factor: k must lie in [1, N_R]");
    const int k_os = n_reference - k_strongest + 1;

    double lo = 0.0, hi = 1.0;
    int guard = 0;
    while (os_pfa(hi, n_reference, k_os) > p_fa) {
        hi *= 2.0;
        if (++guard > 200)
            throw std::runtime_error("os_threshold_factor: bracket failure");
    }
    while (hi - lo > 1e-10 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (os_pfa(mid, n_reference, k_os) > p_fa)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

DetectionMask cfar_detect(const Eigen::MatrixXd& power_map,
                          const CfarParams& params, CfarKind kind) {
    const double alpha =
        kind == CfarKind::ca
            ? ca_threshold_factor(params.false_alarm_rate, params.reference_cells)
            : os_threshold_factor(params.false_alarm_rate, params.reference_cells,
                                  params.os_rank);
    return cfar_detect_with_factor(power_map, params, kind, alpha);
}

DetectionMask cfar_detect_with_factor(const Eigen::MatrixXd& power_map,
                                      const CfarParams& params, CfarKind kind,
                                      double alpha) {
    const int rows = static_cast<int>(power_map.rows());
    const int cols = static_cast<int>(power_map.cols());
    const int guard = params.guard_ring_width();
    const int outer = guard + params.reference_ring_width();
    if (guard < 1 || outer <= guard)
        throw std::invalid_argument("cfar_detect: invalid window geometry");
    const int side = 2 * outer + 1;
    if (rows < side || cols < side)
        throw std::invalid_argument("cfar_detect: map smaller than the CFAR window");

    DetectionMask out;
    out.mask.setZero(rows, cols);

    std::vector<int> wrapped(static_cast<std::size_t>(side));
    std::vector<double> reference(
        static_cast<std::size_t>(side) * static_cast<std::size_t>(side));

    for (int v = 0; v < cols; ++v) {
        for (int dv = -outer; dv <= outer; ++dv)
            wrapped[static_cast<std::size_t>(dv + outer)] =
                (v + dv + cols) % cols;

        for (int r = 0; r < rows; ++r) {
            double sum = 0.0;
            int count = 0;
            for (int dv = -outer; dv <= outer; ++dv) {
                const int av = dv < 0 ? -dv : dv;
                const double* col =
                    power_map.col(wrapped[static_cast<std::size_t>(dv + outer)]).data();
                const int dr_lo = std::max(-outer, -r);
                const int dr_hi = std::min(outer, rows - 1 - r);
                for (int dr = dr_lo; dr <= dr_hi; ++dr) {
                    const int ar = dr < 0 ? -dr : dr;
                    if (ar <= guard && av <= guard) continue;  // CUT + guard ring
                    const double p = col[r + dr];
                    if (kind == CfarKind::ca) {
                        sum += p;
                    } else {
                        reference[static_cast<std::size_t>(count)] = p;
                    }
                    ++count;
                }
            }
            if (count == 0) continue;
            double statistic;
            if (kind == CfarKind::ca) {
                statistic = sum / count;
            } else {
                // k clamped to the (possibly border-shrunken) population.
                const int k = std::min(params.os_rank, count);
                std::nth_element(reference.begin(),
                                 reference.begin() + (k - 1),
                                 reference.begin() + count,
                                 std::greater<double>());
                statistic = reference[static_cast<std::size_t>(k - 1)];
            }
            if (power_map(r, v) > alpha * statistic) {
                out.mask(r, v) = 1;
                out.cells.push_back({r, v});
            }
        }
    }
    return out;
}

std::int64_t ca_cfar_flops(int n_reference, std::int64_t n_cuts) {
    return static_cast<std::int64_t>(n_reference) * n_cuts;
}

std::int64_t os_cfar_comparisons(int n_reference, std::int64_t n_cuts) {
    return static_cast<std::int64_t>(
        std::llround(n_cuts * n_reference * std::log2(double(n_reference))));
}

void write_masks_csv(const std::vector<DetectionMask>& masks,
                     const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "scan,range_bin,velocity_bin\n";
    for (const DetectionMask& m : masks)
        for (const Cell& c : m.cells)
            out << m.scan_index << ',' << c.range_bin << ',' << c.velocity_bin
                << '\n';
    if (!out) throw std::runtime_error("write failure: " + path);
}

}  // namespace rcsw
