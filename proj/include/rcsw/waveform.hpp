#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>

#include "rcsw/scene.hpp"

namespace rcsw {

/// Sampled IF matrix of one scan: fast-time samples down the rows (M),
/// chirps across the columns (N).
struct IfMatrix {
    Eigen::MatrixXcd data;
    int scan_index = 0;
};

/// Round-trip propagation delay of an object at elapsed time t within the
/// given scan. The object's range is first advanced by the scan interval.
double propagation_delay(const SceneObject& obj, double t, int scan_index,
                         double scan_interval_s);

/// One IF sample of a single object echo (reference path, evaluated
/// directly from the phase law). The beat term uses intra-chirp time while
/// the delay evolves with full scan time, so a static object produces the
/// same tone in every chirp.
std::complex<double> object_if_sample(const SceneObject& obj,
                                      const RadarParams& radar, int m, int n,
                                      int scan_index);

struct SynthOptions {
    bool include_noise = true;
    bool include_objects = true;
};

/// Sum of all object echoes plus complex AWGN at the configured noise
/// power. Clutter is injected separately. Deterministic in
/// (scenario, scan_index, master_seed).
IfMatrix synthesize_scan(const Scenario& scenario, int scan_index,
                         std::uint64_t master_seed,
                         const SynthOptions& opts = {});

/// Binary cache format: uint32 M, uint32 N (little endian), then M rows of
/// N interleaved float32 (re, im) pairs.
void dump_if_matrix(const IfMatrix& m, const std::string& path);
IfMatrix load_if_matrix(const std::string& path);

}  // namespace rcsw
