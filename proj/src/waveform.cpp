#include "rcsw/waveform.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "rcsw/rng.hpp"

namespace rcsw {

double propagation_delay(const SceneObject& obj, double t, int scan_index,
                         double scan_interval_s) {
    const double range = obj.range_at_scan(scan_index, scan_interval_s);
    return 2.0 * (range + obj.radial_velocity_mps * t) / kSpeedOfLight;
}

std::complex<double> object_if_sample(const SceneObject& obj,
                                      const RadarParams& radar, int m, int n,
                                      int scan_index) {
    const double dt = radar.chirp_interval_s / radar.samples_per_chirp;
    const double t_intra = m * dt;
    const double t = n * radar.chirp_interval_s + t_intra;
    const double tau = propagation_delay(obj, t, scan_index, radar.scan_interval_s);
    const double mu = radar.slope();
    const double phase = -2.0 * kPi *
                         (radar.carrier_hz * tau + mu * tau * t_intra -
                          0.5 * mu * tau * tau);
    // tx_amplitude is the IF-chain amplitude reference: echo amplitudes are
    // measured in units of A_t while the noise floor stays at N0 * Fs.
    const double amp = radar.tx_amplitude * std::sqrt(received_power(radar, obj));
    return std::polar(amp, phase);
}

namespace {

// Adds one object echo to the scan via a second-order phase recurrence.
// Within chirp n the phase is a + b*m + c*m^2, which a rotating phasor
// tracks with two complex multiplies per sample.
void add_object_echo(Eigen::MatrixXcd& out, const SceneObject& obj,
                     const RadarParams& radar, int scan_index) {
    const int M = radar.samples_per_chirp;
    const int N = radar.chirps_per_scan;
    const double dt = radar.chirp_interval_s / M;
    const double mu = radar.slope();
    const double f0 = radar.carrier_hz;
    const double amp = radar.tx_amplitude * std::sqrt(received_power(radar, obj));
    const double kappa = 2.0 * obj.radial_velocity_mps * dt / kSpeedOfLight;
    const double range0 = obj.range_at_scan(scan_index, radar.scan_interval_s);

    for (int n = 0; n < N; ++n) {
        const double tau_n =
            2.0 * (range0 +
                   obj.radial_velocity_mps * n * radar.chirp_interval_s) /
            kSpeedOfLight;
        const double a = -2.0 * kPi * (f0 * tau_n - 0.5 * mu * tau_n * tau_n);
        const double b =
            -2.0 * kPi * (f0 * kappa + mu * tau_n * dt - mu * tau_n * kappa);
        const double c = -2.0 * kPi * mu * kappa * (dt - 0.5 * kappa);

        std::complex<double> z = std::polar(amp, a);
        std::complex<double> w = std::polar(1.0, b + c);
        const std::complex<double> q = std::polar(1.0, 2.0 * c);
        std::complex<double>* col = out.col(n).data();
        for (int m = 0; m < M; ++m) {
            col[m] += z;
            z *= w;
            w *= q;
        }
    }
}

}  // namespace

IfMatrix synthesize_scan(const Scenario& scenario, int scan_index,
                         std::uint64_t master_seed, const SynthOptions& opts) {
    const RadarParams& radar = scenario.radar;
    IfMatrix out;
    out.scan_index = scan_index;
    out.data = Eigen::MatrixXcd::Zero(radar.samples_per_chirp,
                                      radar.chirps_per_scan);

    if (opts.include_objects) {
        for (const SceneObject& obj : scenario.objects)
            add_object_echo(out.data, obj, radar, scan_index);
    }

    if (opts.include_noise) {
        const double sigma = std::sqrt(0.5 * radar.noise_power_w());
        Xoshiro256 rng(substream_seed(master_seed, kStreamNoise,
                                      static_cast<std::uint64_t>(scan_index)));
        std::complex<double>* p = out.data.data();
        const auto count = out.data.size();
        for (Eigen::Index i = 0; i < count; ++i) {
            double re, im;
            rng.normal_pair(re, im);
            p[i] += std::complex<double>(sigma * re, sigma * im);
        }
    }
    return out;
}

void dump_if_matrix(const IfMatrix& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    const std::uint32_t rows = static_cast<std::uint32_t>(m.data.rows());
    const std::uint32_t cols = static_cast<std::uint32_t>(m.data.cols());
    out.write(reinterpret_cast<const char*>(&rows), 4);
    out.write(reinterpret_cast<const char*>(&cols), 4);
    std::vector<float> row(2 * cols);
    for (std::uint32_t r = 0; r < rows; ++r) {
        for (std::uint32_t c = 0; c < cols; ++c) {
            row[2 * c] = static_cast<float>(m.data(r, c).real());
            row[2 * c + 1] = static_cast<float>(m.data(r, c).imag());
        }
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size() * sizeof(float)));
    }
    if (!out) throw std::runtime_error("write failure: " + path);
}

IfMatrix load_if_matrix(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::uint32_t rows = 0, cols = 0;
    in.read(reinterpret_cast<char*>(&rows), 4);
    in.read(reinterpret_cast<char*>(&cols), 4);
    if (!in) throw std::runtime_error("truncated header: " + path);
    IfMatrix m;
    m.data.resize(rows, cols);
    std::vector<float> row(2 * cols);
    for (std::uint32_t r = 0; r < rows; ++r) {
        in.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(row.size() * sizeof(float)));
        if (!in) throw std::runtime_error("truncated data: " + path);
        for (std::uint32_t c = 0; c < cols; ++c)
            m.data(r, c) = {row[2 * c], row[2 * c + 1]};
    }
    return m;
}

}  // namespace rcsw
