#include "rcsw/mti.hpp"

#include <cmath>
#include <stdexcept>

namespace rcsw {

IfMatrix single_delay_cancel(const IfMatrix& if_matrix) {
    const Eigen::Index cols = if_matrix.data.cols();
    if (cols < 2)
        throw std::invalid_argument("single_delay_cancel: needs at least 2 chirps");
    IfMatrix out;
    out.scan_index = if_matrix.scan_index;
    out.data = if_matrix.data.rightCols(cols - 1) - if_matrix.data.leftCols(cols - 1);
    return out;
}

std::int64_t mti_flops(int samples_per_chirp, int chirps_per_scan) {
    return static_cast<std::int64_t>(chirps_per_scan - 1) * samples_per_chirp;
}

double canceller_response(double f_over_fr, int order) {
    if (order != 1 && order != 2)
        throw std::invalid_argument("canceller_response: order must be 1 or 2");
    const double base = 2.0 * std::abs(std::sin(kPi * f_over_fr));
    return order == 1 ? base : base * base;
}

}  // namespace rcsw
