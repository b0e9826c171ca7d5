#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "rcsw/scene.hpp"

namespace rcsw {

enum class CfarKind { ca, os };

const char* to_string(CfarKind kind);

struct Cell {
    int range_bin = 0;
    int velocity_bin = 0;
    bool operator==(const Cell&) const = default;
};

/// Detection result over one map: boolean grid plus the coordinate list
/// (mask true exactly where a coordinate is listed).
struct DetectionMask {
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> mask;
    std::vector<Cell> cells;
    int scan_index = 0;
};

/// CA-CFAR threshold factor for a square-law exponential background:
/// alpha = N_R (P_fa^(-1/N_R) - 1).
double ca_threshold_factor(double p_fa, int n_reference);

/// OS-CFAR threshold factor: solves
///   P_fa = prod_{i=0}^{k_os-1} (N_R - i) / (N_R - i + alpha)
/// by bisection to 1e-10 relative, where k_os = N_R - k + 1 converts the
/// "k-th strongest" rank into an ordered-statistic index.
double os_threshold_factor(double p_fa, int n_reference, int k_strongest);

/// 2D CFAR over a magnitude-squared map. The cell under test is compared
/// against alpha times the mean reference power (CA) or the k-th strongest
/// reference cell (OS). Guard and reference cells form square rings whose
/// widths derive from the configured counts. The velocity dimension wraps
/// circularly; the range dimension clips the window (the CA mean
/// renormalizes, the OS population shrinks with k clamped to it).
DetectionMask cfar_detect(const Eigen::MatrixXd& power_map,
                          const CfarParams& params, CfarKind kind);

/// Same detector with an externally supplied threshold factor.
DetectionMask cfar_detect_with_factor(const Eigen::MatrixXd& power_map,
                                      const CfarParams& params, CfarKind kind,
                                      double alpha);

/// Analytic work counts for the benchmark: CA costs N_R adds per CUT, OS
/// sorts N_R reference cells per CUT.
std::int64_t ca_cfar_flops(int n_reference, std::int64_t n_cuts);
std::int64_t os_cfar_comparisons(int n_reference, std::int64_t n_cuts);

/// Mask export: one CSV row per detection (scan,range_bin,velocity_bin).
void write_masks_csv(const std::vector<DetectionMask>& masks,
                     const std::string& path);

}  // namespace rcsw
