#include "rcsw/clutter.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "rcsw/fft.hpp"
#include "rcsw/rng.hpp"

namespace rcsw {

double median_amplitude(double shape_p, double scale_q) {
    if (!(shape_p > 0) || !(scale_q > 0))
        throw std::invalid_argument("median_amplitude: shape and scale must be positive");
    return scale_q * std::pow(std::log(2.0), 1.0 / shape_p);
}

double WeibullSpec::median_amplitude() const {
    return rcsw::median_amplitude(shape_p, scale_q);
}

double WeibullSpec::mean_power_c0() const {
    const double wm = median_amplitude();
    return wm * wm * std::tgamma(1.0 + 2.0 / shape_p) /
           std::pow(std::log(2.0), 2.0 / shape_p);
}

WeibullSpec WeibullSpec::from(const ClutterParams& params, double wavelength_m) {
    WeibullSpec spec;
    spec.shape_p = params.shape_p;
    spec.scale_q = params.scale_q;
    spec.psd_model = params.psd_model;
    spec.allpole_exponent = params.allpole_exponent;
    spec.f_3db_hz = (2.0 * params.wind_velocity_mps / wavelength_m) * 0.03;
    return spec;
}

double psd_value(double f_hz, const WeibullSpec& spec) {
    const double c0 = spec.mean_power_c0();
    const double u = std::abs(f_hz) / spec.f_3db_hz;
    switch (spec.psd_model) {
        case PsdModel::gaussian:
            return c0 * std::exp(-0.5 * u * u);
        case PsdModel::exponential:
            return c0 * std::exp(-u);
        case PsdModel::all_pole:
            return c0 / (1.0 + std::pow(u, spec.allpole_exponent));
    }
    return 0.0;
}

namespace {

// ZMNL map g -> g * |g|^(2/p - 1); amplitude becomes |g|^(2/p), phase kept.
inline std::complex<double> zmnl(double x, double y, double half_exp) {
    const double rr = x * x + y * y;
    const double factor = rr > 0.0 ? std::pow(rr, half_exp) : 0.0;
    return {x * factor, y * factor};
}

}  // namespace

std::vector<std::complex<double>> generate_coherent_weibull(
    int length, const WeibullSpec& spec, double prf_hz, std::uint64_t seed) {
    if (length < 2)
        throw std::invalid_argument("generate_coherent_weibull: length must be >= 2");
    if (!(spec.f_3db_hz < 0.5 * prf_hz))
        throw std::invalid_argument(
            "generate_coherent_weibull: invalid spectral support (f_3db >= prf/2)");

    // White complex Gaussian spectrum shaped by sqrt(S(f)) on the two-sided
    // FFT grid. The C0 factor cancels in the final power normalization.
    Eigen::VectorXcd spectrum(length);
    Xoshiro256 rng(seed);
    double h_sq_sum = 0.0;
    for (int k = 0; k < length; ++k) {
        const double f = (k <= length / 2 ? k : k - length) * prf_hz / length;
        const double h = std::sqrt(psd_value(f, spec) / spec.mean_power_c0());
        h_sq_sum += h * h;
        spectrum[k] = h * rng.complex_normal() * 0.70710678118654752440;
    }
    fft::inverse(spectrum);

    // Scale so each Gaussian sample has E|g|^2 = q^p, which makes the ZMNL
    // output amplitude exactly Weibull(p, q) with mean power C0.
    const double var_now = h_sq_sum / (static_cast<double>(length) * length);
    const double alpha =
        std::sqrt(std::pow(spec.scale_q, spec.shape_p) / var_now);

    const double half_exp = 1.0 / spec.shape_p - 0.5;
    std::vector<std::complex<double>> out(static_cast<std::size_t>(length));
    for (int n = 0; n < length; ++n) {
        const std::complex<double> g = alpha * spectrum[n];
        out[static_cast<std::size_t>(n)] = zmnl(g.real(), g.imag(), half_exp);
    }
    return out;
}

std::vector<std::complex<double>> generate_iid_weibull(int length,
                                                       double shape_p,
                                                       std::uint64_t seed) {
    if (length < 0) throw std::invalid_argument("generate_iid_weibull: bad length");
    // x,y ~ N(0,1) gives E|z|^2 = 2^(2/p) Gamma(1+2/p); divide it out.
    const double norm =
        1.0 / std::sqrt(std::pow(2.0, 2.0 / shape_p) *
                        std::tgamma(1.0 + 2.0 / shape_p));
    const double half_exp = 1.0 / shape_p - 0.5;
    std::vector<std::complex<double>> out(static_cast<std::size_t>(length));
    Xoshiro256 rng(seed);
    for (auto& z : out) {
        double x, y;
        rng.normal_pair(x, y);
        z = norm * zmnl(x, y, half_exp);
    }
    return out;
}

void inject_clutter(IfMatrix& m, const Scenario& scenario,
                    std::uint64_t master_seed) {
    const double xi = scenario.clutter.clutter_power_coeff;
    if (xi == 0.0) return;
    if (scenario.target_index() < 0)
        throw std::runtime_error(
            "inject_clutter: scene has no target; clutter power reference undefined");

    const int rows = static_cast<int>(m.data.rows());
    const int cols = static_cast<int>(m.data.cols());
    const WeibullSpec spec =
        WeibullSpec::from(scenario.clutter, scenario.radar.wavelength());
    const double prf = scenario.radar.prf();

    // Every range bin carries an independent coherent Weibull sequence along
    // slow time, Doppler-shaped at the chirp repetition frequency. The
    // global scale pins the IF-domain clutter power to xi times the target
    // echo power (in tx_amplitude units): spreading the bin sequences over
    // fast time divides the per-sample power by the bin count.
    const double target_power = scenario.radar.tx_amplitude *
                                scenario.radar.tx_amplitude *
                                received_power(scenario.radar, scenario.target());
    const double scale =
        std::sqrt(rows * xi * target_power / spec.mean_power_c0());

    // Each range bin holds a persistent clutter sequence for the whole run
    // plus a small fluctuating share redrawn every scan (steady scatterers
    // vs internal motion between looks). The persistent part is what the
    // rank-1 scan structure can absorb; the fluctuating part is what leaks
    // into the sparse estimate as clutter cells. Repeated runs draw fresh
    // realizations.
    const double jitter = std::clamp(scenario.clutter.scan_jitter, 0.0, 1.0);
    const double w_hold = std::sqrt(1.0 - jitter);
    const double w_scan = std::sqrt(jitter);
    Eigen::MatrixXcd bins(rows, cols);
    for (int r = 0; r < rows; ++r) {
        const auto held = generate_coherent_weibull(
            cols, spec, prf,
            substream_seed(master_seed, kStreamClutter,
                           static_cast<std::uint64_t>(r)));
        for (int n = 0; n < cols; ++n)
            bins(r, n) = (scale * w_hold) * held[static_cast<std::size_t>(n)];
        if (jitter > 0.0) {
            const auto fresh = generate_coherent_weibull(
                cols, spec, prf,
                substream_seed(master_seed, kStreamClutterJitter,
                               static_cast<std::uint64_t>(r),
                               static_cast<std::uint64_t>(m.scan_index)));
            for (int n = 0; n < cols; ++n)
                bins(r, n) += (scale * w_scan) * fresh[static_cast<std::size_t>(n)];
        }
    }
    // Synthesize the fast-time waveform whose conjugate-transform range
    // profile reproduces the shaped bin sequences.
    fft::forward_columns(bins);
    m.data += bins / static_cast<double>(rows);
}

std::string FitReport::csv_header() { return "model,ks_stat,psd_rms_db,n_samples"; }

std::string FitReport::csv_row() const {
    std::ostringstream ss;
    ss << to_string(model) << ',' << ks_stat << ',' << psd_rms_db << ','
       << n_samples;
    return ss.str();
}

namespace {

double weibull_cdf(double a, double p, double q) {
    return a <= 0.0 ? 0.0 : 1.0 - std::exp(-std::pow(a / q, p));
}

double ks_statistic(std::vector<double>& amplitudes, double p, double q_hat) {
    std::sort(amplitudes.begin(), amplitudes.end());
    const double n = static_cast<double>(amplitudes.size());
    double d = 0.0;
    for (std::size_t i = 0; i < amplitudes.size(); ++i) {
        const double cdf = weibull_cdf(amplitudes[i], p, q_hat);
        d = std::max(d, std::abs(cdf - (static_cast<double>(i) + 1.0) / n));
        d = std::max(d, std::abs(cdf - static_cast<double>(i) / n));
    }
    return d;
}

// Hann-windowed Welch estimate with 50% overlap, averaged into coarse
// frequency bins over (0, f_max]. Returns per-bin (empirical, theoretical)
// pairs; the overall gain is a free normalization and is removed by the
// caller in dB space.
struct PsdComparison {
    std::vector<double> empirical;
    std::vector<double> theoretical;
};

PsdComparison welch_compare(const std::vector<std::complex<double>>& samples,
                            const WeibullSpec& spec, double prf_hz,
                            double f_max, int coarse_bins) {
    int seg = 1;
    while (seg * 2 <= static_cast<int>(samples.size()) / 4 && seg < 8192) seg *= 2;
    seg = std::max(seg, 64);
    const int hop = seg / 2;

    Eigen::VectorXd window(seg);
    for (int i = 0; i < seg; ++i)
        window[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * i / (seg - 1));

    Eigen::VectorXd psd = Eigen::VectorXd::Zero(seg);
    Eigen::VectorXcd buf(seg);
    int count = 0;
    for (std::size_t start = 0; start + seg <= samples.size();
         start += static_cast<std::size_t>(hop)) {
        for (int i = 0; i < seg; ++i)
            buf[i] = window[i] * samples[start + static_cast<std::size_t>(i)];
        fft::forward(buf);
        psd += buf.cwiseAbs2();
        ++count;
    }
    if (count == 0) throw std::invalid_argument("welch_compare: too few samples");
    psd /= count;

    PsdComparison cmp;
    cmp.empirical.assign(static_cast<std::size_t>(coarse_bins), 0.0);
    cmp.theoretical.assign(static_cast<std::size_t>(coarse_bins), 0.0);
    std::vector<int> hits(static_cast<std::size_t>(coarse_bins), 0);
    for (int k = 0; k < seg; ++k) {
        const double f = (k <= seg / 2 ? k : k - seg) * prf_hz / seg;
        const double af = std::abs(f);
        if (af <= 0.0 || af > f_max) continue;
        const int b = std::min(coarse_bins - 1,
                               static_cast<int>(af / f_max * coarse_bins));
        cmp.empirical[static_cast<std::size_t>(b)] += psd[k];
        cmp.theoretical[static_cast<std::size_t>(b)] += psd_value(f, spec);
        ++hits[static_cast<std::size_t>(b)];
    }
    for (int b = 0; b < coarse_bins; ++b) {
        if (hits[static_cast<std::size_t>(b)] == 0) continue;
        cmp.empirical[static_cast<std::size_t>(b)] /= hits[static_cast<std::size_t>(b)];
        cmp.theoretical[static_cast<std::size_t>(b)] /= hits[static_cast<std::size_t>(b)];
    }
    return cmp;
}

}  // namespace

FitReport validate_distribution(const std::vector<std::complex<double>>& samples,
                                const WeibullSpec& spec, double prf_hz) {
    if (samples.size() < 10000)
        throw std::invalid_argument(
            "validate_distribution requires at least 10^4 samples");

    FitReport report;
    report.model = spec.psd_model;
    report.n_samples = samples.size();

    std::vector<double> amplitudes(samples.size());
    double pow_sum = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        amplitudes[i] = std::abs(samples[i]);
        pow_sum += std::pow(amplitudes[i], spec.shape_p);
    }
    // MLE scale for known shape.
    const double q_hat =
        std::pow(pow_sum / static_cast<double>(samples.size()), 1.0 / spec.shape_p);
    report.ks_stat = ks_statistic(amplitudes, spec.shape_p, q_hat);

    const double f_max = 10.0 * spec.f_3db_hz;
    const PsdComparison cmp = welch_compare(samples, spec, prf_hz, f_max, 48);
    std::vector<double> diff;
    for (std::size_t b = 0; b < cmp.empirical.size(); ++b) {
        if (cmp.empirical[b] <= 0.0 || cmp.theoretical[b] <= 0.0) continue;
        diff.push_back(10.0 * std::log10(cmp.empirical[b] / cmp.theoretical[b]));
    }
    if (!diff.empty()) {
        const double mean =
            std::accumulate(diff.begin(), diff.end(), 0.0) / diff.size();
        double rss = 0.0;
        for (double d : diff) rss += (d - mean) * (d - mean);
        report.psd_rms_db = std::sqrt(rss / diff.size());
    }
    return report;
}

}  // namespace rcsw
