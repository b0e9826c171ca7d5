#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rcsw/scene.hpp"

namespace rcsw {

/// Output of one low-rank + sparse decomposition. `epsilon` is the relative
/// Frobenius error ||X - L - S||_F / ||X||_F as a fraction (multiply by 100
/// for display), `trace` holds it per iteration.
struct GodecResult {
    Eigen::MatrixXd low_rank;
    Eigen::MatrixXd sparse;
    int iter_cov = 0;
    double epsilon = 0.0;
    std::vector<double> trace;
};

/// Cardinality bound: the sparse part may keep n_mov full velocity rows per
/// scan, s = n_mov * chirps * scans.
std::int64_t sparsity_from_n_mov(int n_mov, int chirps, int scans);

/// Keeps the s largest-magnitude entries of the residual and zeroes the
/// rest. Ties at the cutoff magnitude break toward the smallest
/// column-major flat index, making the projection deterministic.
Eigen::MatrixXd sparse_project(const Eigen::MatrixXd& residual, std::int64_t s);

/// Relative Frobenius decomposition error (fractional).
double decomposition_error(const Eigen::MatrixXd& x, const Eigen::MatrixXd& l,
                           const Eigen::MatrixXd& s);

/// Flop count of the power-scheme decomposition:
/// [r^2 (MN + 3K + 4r) + 4 (zeta+1) MNKr] * (iter_cov + 1).
std::int64_t godec_flops(int m, int n, int k, int r, int zeta, int iter_cov);

/// Optional per-iteration hook (iteration number, error, current L and S).
using GodecObserver = std::function<void(
    int, double, const Eigen::MatrixXd&, const Eigen::MatrixXd&)>;

/// Bilateral-random-projection decomposition with the power scheme.
///
/// Each iteration draws a fresh Gaussian A1, applies
/// Ltilde = [(X-S)(X-S)^T]^zeta (X-S) implicitly as 2 zeta + 1 alternating
/// thin products, extracts the rank-r factors through two QR passes, takes
/// the (2 zeta + 1)-th root of the r x r core, and projects the residual
/// onto the s largest magnitudes. Iteration stops when the error drops
/// below error_bound, the error change between consecutive iterations
/// falls below delta (checked once two errors exist), or iter_max
/// iterations have run; iter_cov reports the iterations executed.
///
/// A singular r x r core triggers up to 3 redraws of A1 before failing.
/// Results are bit-reproducible for a fixed seed.
GodecResult godec_decompose(const Eigen::MatrixXd& x, const GodecParams& params,
                            std::int64_t sparsity, std::uint64_t seed,
                            const GodecObserver& observer = nullptr);

/// Convergence trace export: one CSV row per iteration (iter, epsilon).
void write_trace_csv(const std::vector<double>& trace, const std::string& path);

}  // namespace rcsw
