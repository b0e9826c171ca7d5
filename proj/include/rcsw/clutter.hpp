#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "rcsw/scene.hpp"
#include "rcsw/waveform.hpp"

namespace rcsw {

/// Weibull clutter description with the derived quantities used by the
/// generator: median amplitude, average power and half-power Doppler width.
struct WeibullSpec {
    double shape_p = 1.6;
    double scale_q = 6.9;
    double f_3db_hz = 24.0;
    PsdModel psd_model = PsdModel::all_pole;
    double allpole_exponent = 3.0;

    double median_amplitude() const;
    /// C0 = w_m^2 * Gamma(1 + 2/p) / (ln 2)^(2/p)
    double mean_power_c0() const;

    /// Builds the spec from scenario clutter parameters; the Doppler width
    /// is 3% of the wind Doppler shift 2 v_w / lambda.
    static WeibullSpec from(const ClutterParams& params, double wavelength_m);
};

/// Weibull median amplitude q * (ln 2)^(1/p).
double median_amplitude(double shape_p, double scale_q);

/// Clutter Doppler PSD value at frequency f for the selected model.
double psd_value(double f_hz, const WeibullSpec& spec);

/// Coherent correlated Weibull sequence: two white Gaussian streams are
/// shaped in the frequency domain by sqrt(S(f)) on the length-point grid at
/// the given PRF, passed through the zero-mean nonlinear map
/// u = x (x^2+y^2)^(1/p-1/2), v = y (...), and scaled so the mean power is
/// exactly C0. Phase is preserved by the nonlinearity.
std::vector<std::complex<double>> generate_coherent_weibull(
    int length, const WeibullSpec& spec, double prf_hz, std::uint64_t seed);

/// Spectrally white coherent Weibull samples with unit mean power.
std::vector<std::complex<double>> generate_iid_weibull(int length,
                                                       double shape_p,
                                                       std::uint64_t seed);

/// Adds broadband coherent Weibull clutter to the IF matrix, scaled so the
/// mean clutter sample power is clutter_power_coeff times the target echo
/// power. Chirps use independent substreams. Throws if the coefficient is
/// positive but the scene has no target (the power reference is undefined).
void inject_clutter(IfMatrix& m, const Scenario& scenario,
                    std::uint64_t master_seed);

/// Distribution / spectrum fit report for generated clutter.
struct FitReport {
    PsdModel model = PsdModel::all_pole;
    double ks_stat = 0.0;     // amplitude vs Weibull(p, fitted scale)
    double psd_rms_db = 0.0;  // normalized-dB RMS over |f| <= 10 f_3db
    std::size_t n_samples = 0;

    std::string csv_row() const;
    static std::string csv_header();
};

/// Kolmogorov-Smirnov fit of |samples| against Weibull(p, fitted scale)
/// plus the PSD shape error against the spec's model. Requires at least
/// 10^4 samples.
FitReport validate_distribution(const std::vector<std::complex<double>>& samples,
                                const WeibullSpec& spec, double prf_hz);

}  // namespace rcsw
