#include "rcsw/rdmap.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>

#include "rcsw/fft.hpp"

namespace rcsw {
namespace {

Eigen::VectorXd window_vector(int n, Window window) {
    Eigen::VectorXd w(n);
    if (window == Window::rectangular || n == 1) {
        w.setOnes();
        return w;
    }
    for (int i = 0; i < n; ++i)
        w[i] = 0.54 - 0.46 * std::cos(2.0 * kPi * i / (n - 1));
    return w;
}

}  // namespace

RangeVelocityMap range_velocity_map(const IfMatrix& if_matrix, Window window) {
    const int rows = static_cast<int>(if_matrix.data.rows());
    const int cols = static_cast<int>(if_matrix.data.cols());
    if (rows == 0 || cols == 0)
        throw std::invalid_argument("range_velocity_map: empty IF matrix");

    Eigen::MatrixXcd work = if_matrix.data;
    const Eigen::VectorXd wr = window_vector(rows, window);
    const Eigen::VectorXd wc = window_vector(cols, window);
    work.array().colwise() *= wr.array();
    work.array().rowwise() *= wc.transpose().array();

    // Conjugate transforms: the IF phase law is negative, so beat tones land
    // at positive range bins and receding objects right of the center column.
    fft::backward_columns(work);  // fast time -> range bins
    fft::backward_rows(work);     // chirps -> Doppler bins

    // Center zero Doppler at floor(cols/2); range bins stay unshifted.
    RangeVelocityMap map;
    map.scan_index = if_matrix.scan_index;
    map.spectrum.resize(rows, cols);
    const int zero_bin = cols / 2;
    for (int v = 0; v < cols; ++v) {
        const int src = (v + cols - zero_bin) % cols;
        map.spectrum.col(v) = work.col(src);
    }
    return map;
}

RvsMatrix stack_scans(const std::vector<RangeVelocityMap>& maps) {
    std::vector<Eigen::MatrixXd> mags;
    mags.reserve(maps.size());
    for (const auto& m : maps) mags.push_back(m.magnitude());
    return stack_magnitudes(mags);
}

RvsMatrix stack_magnitudes(const std::vector<Eigen::MatrixXd>& maps) {
    if (maps.empty()) throw std::invalid_argument("stack_scans: no maps");
    const Eigen::Index rows = maps.front().rows();
    const Eigen::Index cols = maps.front().cols();
    RvsMatrix out;
    out.map_rows = static_cast<int>(rows);
    out.map_cols = static_cast<int>(cols);
    out.scans = static_cast<int>(maps.size());
    out.data.resize(rows * cols, static_cast<Eigen::Index>(maps.size()));
    for (std::size_t k = 0; k < maps.size(); ++k) {
        if (maps[k].rows() != rows || maps[k].cols() != cols)
            throw std::invalid_argument("stack_scans: map shape mismatch");
        out.data.col(static_cast<Eigen::Index>(k)) =
            Eigen::Map<const Eigen::VectorXd>(maps[k].data(), rows * cols);
    }
    return out;
}

std::vector<Eigen::MatrixXd> unstack(const RvsMatrix& matrix) {
    return unstack_like(matrix.data, matrix);
}

std::vector<Eigen::MatrixXd> unstack_like(const Eigen::MatrixXd& data,
                                          const RvsMatrix& like) {
    const Eigen::Index cells =
        static_cast<Eigen::Index>(like.map_rows) * like.map_cols;
    if (data.rows() != cells || data.cols() != like.scans)
        throw std::invalid_argument("unstack: dimension mismatch with layout");
    std::vector<Eigen::MatrixXd> maps;
    maps.reserve(static_cast<std::size_t>(like.scans));
    for (int k = 0; k < like.scans; ++k) {
        maps.emplace_back(Eigen::Map<const Eigen::MatrixXd>(
            data.col(k).data(), like.map_rows, like.map_cols));
    }
    return maps;
}

void write_map_csv(const Eigen::MatrixXd& magnitude, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "range_bin,velocity_bin,magnitude_db_normalized\n";
    const double peak = magnitude.maxCoeff();
    const double floor_db = -300.0;
    char line[96];
    for (Eigen::Index r = 0; r < magnitude.rows(); ++r) {
        for (Eigen::Index v = 0; v < magnitude.cols(); ++v) {
            const double m = magnitude(r, v);
            const double db = (peak > 0 && m > 0)
                                  ? 20.0 * std::log10(m / peak)
                                  : floor_db;
            std::snprintf(line, sizeof line, "%lld,%lld,%.4f\n",
                          static_cast<long long>(r), static_cast<long long>(v), db);
            out << line;
        }
    }
    if (!out) throw std::runtime_error("write failure: " + path);
}

void write_map_f32(const Eigen::MatrixXd& magnitude, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    const std::uint32_t rows = static_cast<std::uint32_t>(magnitude.rows());
    const std::uint32_t cols = static_cast<std::uint32_t>(magnitude.cols());
    out.write(reinterpret_cast<const char*>(&rows), 4);
    out.write(reinterpret_cast<const char*>(&cols), 4);
    std::vector<float> row(cols);
    for (std::uint32_t r = 0; r < rows; ++r) {
        for (std::uint32_t c = 0; c < cols; ++c)
            row[c] = static_cast<float>(magnitude(r, c));
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size() * sizeof(float)));
    }
    if (!out) throw std::runtime_error("write failure: " + path);
}

}  // namespace rcsw
