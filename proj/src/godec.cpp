#include "rcsw/godec.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <stdexcept>

#include "rcsw/rng.hpp"

namespace rcsw {

std::int64_t sparsity_from_n_mov(int n_mov, int chirps, int scans) {
    return static_cast<std::int64_t>(n_mov) * chirps * scans;
}

Eigen::MatrixXd sparse_project(const Eigen::MatrixXd& residual, std::int64_t s) {
    const std::int64_t count = residual.size();
    if (s < 0 || s > count)
        throw std::invalid_argument("sparse_project: s out of range");
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(residual.rows(), residual.cols());
    if (s == 0) return out;
    if (s == count) return residual;

    // Threshold at the s-th largest magnitude, then fill ties in flat-index
    // order. Two passes, no index sort.
    std::vector<double> mags(static_cast<std::size_t>(count));
    const double* src = residual.data();
    for (std::int64_t i = 0; i < count; ++i)
        mags[static_cast<std::size_t>(i)] = std::abs(src[i]);
    std::nth_element(mags.begin(), mags.begin() + (s - 1), mags.end(),
                     std::greater<double>());
    const double cutoff = mags[static_cast<std::size_t>(s - 1)];

    std::int64_t above = 0;
    for (std::int64_t i = 0; i < count; ++i)
        if (std::abs(src[i]) > cutoff) ++above;
    std::int64_t ties_left = s - above;

    double* dst = out.data();
    for (std::int64_t i = 0; i < count; ++i) {
        const double a = std::abs(src[i]);
        if (a > cutoff) {
            dst[i] = src[i];
        } else if (a == cutoff && ties_left > 0) {
            dst[i] = src[i];
            --ties_left;
        }
    }
    return out;
}

double decomposition_error(const Eigen::MatrixXd& x, const Eigen::MatrixXd& l,
                           const Eigen::MatrixXd& s) {
    if (x.rows() != l.rows() || x.cols() != l.cols() || x.rows() != s.rows() ||
        x.cols() != s.cols())
        throw std::invalid_argument("decomposition_error: shape mismatch");
    const double xn = x.norm();
    if (!(xn > 0.0))
        throw std::invalid_argument("decomposition_error: zero-norm input");
    return (x - l - s).norm() / xn;
}

std::int64_t godec_flops(int m, int n, int k, int r, int zeta, int iter_cov) {
    const std::int64_t mn = static_cast<std::int64_t>(m) * n;
    const std::int64_t per_iter =
        static_cast<std::int64_t>(r) * r * (mn + 3ll * k + 4ll * r) +
        4ll * (zeta + 1) * mn * k * r;
    return per_iter * (iter_cov + 1);
}

namespace {

// The operand X - S is never materialized; products stream X and patch in
// the sparse correction from an index list.
struct SparseEntries {
    std::vector<std::int64_t> index;  // column-major flat indices into (MN)xK
    std::vector<double> value;
    void clear() {
        index.clear();
        value.clear();
    }
};

// y = (X - S) a,  a: K x r, y: MN x r
void multiply_right(const Eigen::MatrixXd& x, const SparseEntries& s,
                    const Eigen::MatrixXd& a, Eigen::MatrixXd& y) {
    y.noalias() = x * a;
    const Eigen::Index rows = x.rows();
    for (std::size_t i = 0; i < s.index.size(); ++i) {
        const std::int64_t flat = s.index[i];
        const Eigen::Index row = static_cast<Eigen::Index>(flat % rows);
        const Eigen::Index col = static_cast<Eigen::Index>(flat / rows);
        y.row(row).noalias() -= s.value[i] * a.row(col);
    }
}

// c = (X - S)^T w,  w: MN x r, c: K x r
void multiply_left(const Eigen::MatrixXd& x, const SparseEntries& s,
                   const Eigen::MatrixXd& w, Eigen::MatrixXd& c) {
    c.noalias() = x.transpose() * w;
    const Eigen::Index rows = x.rows();
    for (std::size_t i = 0; i < s.index.size(); ++i) {
        const std::int64_t flat = s.index[i];
        const Eigen::Index row = static_cast<Eigen::Index>(flat % rows);
        const Eigen::Index col = static_cast<Eigen::Index>(flat / rows);
        c.row(col).noalias() -= s.value[i] * w.row(row);
    }
}

// (2 zeta + 1)-th root of the r x r core. Scalar fast path for r = 1 with
// the real odd root; larger r goes through an eigendecomposition.
Eigen::MatrixXd matrix_odd_root(const Eigen::MatrixXd& m, int zeta) {
    const double inv_exp = 1.0 / (2.0 * zeta + 1.0);
    if (m.rows() == 1) {
        const double v = m(0, 0);
        Eigen::MatrixXd out(1, 1);
        out(0, 0) = std::copysign(std::pow(std::abs(v), inv_exp), v);
        return out;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> eig(m);
    Eigen::MatrixXcd values = eig.eigenvalues().asDiagonal();
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        std::complex<double> lambda = values(i, i);
        if (lambda.imag() == 0.0) {
            const double v = lambda.real();
            values(i, i) = std::copysign(std::pow(std::abs(v), inv_exp), v);
        } else {
            values(i, i) = std::pow(lambda, inv_exp);
        }
    }
    const Eigen::MatrixXcd vec = eig.eigenvectors();
    return (vec * values * vec.inverse()).real();
}

}  // namespace

GodecResult godec_decompose(const Eigen::MatrixXd& x, const GodecParams& params,
                            std::int64_t sparsity, std::uint64_t seed,
                            const GodecObserver& observer) {
    const Eigen::Index mn = x.rows();
    const Eigen::Index k = x.cols();
    const int r = params.rank_bound;
    const int zeta = params.power_exponent;
    if (r < 1 || r > k)
        throw std::invalid_argument("godec_decompose: rank bound must lie in [1, K]");
    if (sparsity < 0 || sparsity > x.size())
        throw std::invalid_argument("godec_decompose: sparsity out of range");
    if (!x.allFinite())
        throw std::invalid_argument("godec_decompose: non-finite input");

    const double x_norm = x.norm();
    if (!(x_norm > 0.0))
        throw std::invalid_argument("godec_decompose: zero input matrix");

    Xoshiro256 rng(substream_seed(seed, kStreamGodec));
    const auto draw_a1 = [&] {
        Eigen::MatrixXd a1(k, r);
        for (Eigen::Index j = 0; j < a1.size(); ++j) a1.data()[j] = rng.normal();
        return a1;
    };

    GodecResult result;
    result.low_rank.setZero(mn, k);
    result.sparse.setZero(mn, k);

    SparseEntries s_entries;
    Eigen::MatrixXd y1(mn, r), y2(k, r), tmp_k(k, r);
    Eigen::MatrixXd residual(mn, k);

    double eps_prev = 0.0;
    int t = 0;
    while (true) {
        ++t;

        // Rank-r estimate of X - S via bilateral projection, with up to 3
        // fresh draws of A1 if the r x r core degenerates.
        Eigen::MatrixXd core;
        Eigen::MatrixXd q1, q2, r1, r2;
        bool ok = false;
        for (int attempt = 0; attempt < 4 && !ok; ++attempt) {
            const Eigen::MatrixXd a1 = draw_a1();
            multiply_right(x, s_entries, a1, y1);
            for (int p = 0; p < zeta; ++p) {
                multiply_left(x, s_entries, y1, tmp_k);
                multiply_right(x, s_entries, tmp_k, y1);
            }
            const Eigen::MatrixXd a2 = y1;

            // Y2 = Ltilde^T Y1 with QR, then Y1 = Ltilde Y2 with QR.
            Eigen::MatrixXd v = y1;
            for (int p = 0; p < zeta; ++p) {
                multiply_left(x, s_entries, v, tmp_k);
                multiply_right(x, s_entries, tmp_k, v);
            }
            multiply_left(x, s_entries, v, y2);
            Eigen::HouseholderQR<Eigen::MatrixXd> qr2(y2);
            q2 = qr2.householderQ() * Eigen::MatrixXd::Identity(k, r);
            r2 = q2.transpose() * y2;

            multiply_right(x, s_entries, y2, y1);
            for (int p = 0; p < zeta; ++p) {
                multiply_left(x, s_entries, y1, tmp_k);
                multiply_right(x, s_entries, tmp_k, y1);
            }
            Eigen::HouseholderQR<Eigen::MatrixXd> qr1(y1);
            q1 = qr1.householderQ() * Eigen::MatrixXd::Identity(mn, r);
            r1 = q1.transpose() * y1;

            const Eigen::MatrixXd gram = a2.transpose() * y1;
            Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
            if (lu.isInvertible()) {
                core = r1 * lu.inverse() * r2.transpose();
                ok = core.allFinite();
            }
        }
        if (!ok)
            throw std::runtime_error(
                "godec_decompose: projection core stayed singular after 3 redraws");

        result.low_rank.noalias() =
            q1 * matrix_odd_root(core, zeta) * q2.transpose();

        // Sparse step: keep the s largest residual magnitudes. The error
        // needs only the discarded part, so it falls out of the same pass.
        residual = x - result.low_rank;
        result.sparse = sparse_project(residual, sparsity);
        const double discarded_sq =
            residual.squaredNorm() - result.sparse.squaredNorm();
        const double eps = std::sqrt(std::max(discarded_sq, 0.0)) / x_norm;

        s_entries.clear();
        const double* sp = result.sparse.data();
        for (std::int64_t i = 0; i < result.sparse.size(); ++i)
            if (sp[i] != 0.0) {
                s_entries.index.push_back(i);
                s_entries.value.push_back(sp[i]);
            }

        result.trace.push_back(eps);
        result.epsilon = eps;
        if (observer) observer(t, eps, result.low_rank, result.sparse);

        if (eps < params.error_bound) break;
        if (t >= params.iter_max) break;
        if (t >= 2 && std::abs(eps_prev - eps) < params.delta) break;
        eps_prev = eps;
    }
    result.iter_cov = t;
    return result;
}

void write_trace_csv(const std::vector<double>& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "iter,epsilon\n";
    for (std::size_t i = 0; i < trace.size(); ++i)
        out << (i + 1) << ',' << trace[i] << '\n';
    if (!out) throw std::runtime_error("write failure: " + path);
}

}  // namespace rcsw
