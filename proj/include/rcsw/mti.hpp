#pragma once

#include <cstdint>

#include "rcsw/waveform.hpp"

namespace rcsw {

/// Single delay-line canceller: output column n = input column n+1 minus
/// input column n, applied chirp-to-chirp before the Doppler FFT. The
/// result has one fewer chirp column. Throws when fewer than two chirps
/// are present.
IfMatrix single_delay_cancel(const IfMatrix& if_matrix);

/// Flops for one cancelled matrix: (N-1)*M, one subtraction per output cell.
std::int64_t mti_flops(int samples_per_chirp, int chirps_per_scan);

/// Magnitude response |H| = (2 |sin(pi f / f_r)|)^order of the delay-line
/// canceller, with f expressed as a fraction of the chirp repetition
/// frequency. Orders 1 (single) and 2 (double) are supported; the double
/// canceller exists only for this curve.
double canceller_response(double f_over_fr, int order);

}  // namespace rcsw
