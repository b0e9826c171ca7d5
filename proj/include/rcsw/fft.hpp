#pragma once

#include <Eigen/Dense>
#include <complex>

namespace rcsw::fft {

/// Unnormalized forward DFT along every column (length = rows).
void forward_columns(Eigen::MatrixXcd& m);

/// Unnormalized conjugate (backward) DFT along every column. The IF phase
/// law carries a negative sign, so this is the transform that places beat
/// tones at positive range bins.
void backward_columns(Eigen::MatrixXcd& m);

/// Unnormalized conjugate (backward) DFT along every row.
void backward_rows(Eigen::MatrixXcd& m);

/// Unnormalized conjugate DFT of a single vector, in place.
void backward(Eigen::VectorXcd& v);

/// Unnormalized forward DFT of a single vector, in place.
void forward(Eigen::VectorXcd& v);

/// Inverse DFT of a single vector, in place, including the 1/n factor.
void inverse(Eigen::VectorXcd& v);

}  // namespace rcsw::fft
