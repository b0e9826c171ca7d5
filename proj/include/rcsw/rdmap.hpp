#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "rcsw/waveform.hpp"

namespace rcsw {

enum class Window { hamming, rectangular };

/// One scan's 2D spectrum: range bins down the rows, velocity bins across
/// the columns with zero Doppler centered at floor(cols/2).
struct RangeVelocityMap {
    Eigen::MatrixXcd spectrum;
    int scan_index = 0;

    Eigen::MatrixXd magnitude() const { return spectrum.cwiseAbs(); }
};

/// Window + unnormalized 2D FFT (fast time first, then chirps), velocity
/// axis circularly shifted so zero Doppler sits at floor(cols/2).
RangeVelocityMap range_velocity_map(const IfMatrix& if_matrix,
                                    Window window = Window::hamming);

/// The (M*N) x K stack of linear magnitude maps that the decomposition
/// factorizes. Column k is scan k's map flattened column-major (velocity
/// column n of the map follows column n-1).
struct RvsMatrix {
    Eigen::MatrixXd data;
    int map_rows = 0;  // M
    int map_cols = 0;  // N
    int scans = 0;     // K
};

RvsMatrix stack_scans(const std::vector<RangeVelocityMap>& maps);
RvsMatrix stack_magnitudes(const std::vector<Eigen::MatrixXd>& maps);

/// Exact inverse of the stacking layout.
std::vector<Eigen::MatrixXd> unstack(const RvsMatrix& matrix);
/// Unstacks an arbitrary same-shape matrix (e.g. a decomposition factor)
/// using the layout of `like`.
std::vector<Eigen::MatrixXd> unstack_like(const Eigen::MatrixXd& data,
                                          const RvsMatrix& like);

/// CSV export: range_bin,velocity_bin,magnitude_db_normalized (dB relative
/// to the map maximum).
void write_map_csv(const Eigen::MatrixXd& magnitude, const std::string& path);

/// Dense binary grid: uint32 rows, uint32 cols, then row-major float32
/// magnitudes (linear).
void write_map_f32(const Eigen::MatrixXd& magnitude, const std::string& path);

}  // namespace rcsw
