#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <complex>
#include <vector>

#include "rcsw/clutter.hpp"
#include "rcsw/waveform.hpp"
#include "test_support.hpp"

using namespace rcsw;

namespace {

WeibullSpec table_spec() {
    const Scenario sc = test::masking_scenario();
    return WeibullSpec::from(sc.clutter, sc.radar.wavelength());
}

}  // namespace

TEST_CASE("weibull spec derivations") {
    const WeibullSpec spec = table_spec();
    CHECK(spec.f_3db_hz == doctest::Approx(24.0).epsilon(2e-3));
    CHECK(spec.median_amplitude() ==
          doctest::Approx(6.9 * std::pow(std::log(2.0), 1.0 / 1.6)));
    // C0 = w_m^2 Gamma(1 + 2/p) / (ln 2)^(2/p)
    const double wm = spec.median_amplitude();
    CHECK(spec.mean_power_c0() ==
          doctest::Approx(wm * wm * std::tgamma(1.0 + 2.0 / 1.6) /
                          std::pow(std::log(2.0), 2.0 / 1.6)));
}

TEST_CASE("median amplitude closed form") {
    CHECK(median_amplitude(1.0, 1.0) == doctest::Approx(std::log(2.0)));
    CHECK(median_amplitude(1.6, 6.9) == doctest::Approx(5.4874).epsilon(1e-4));
    CHECK(median_amplitude(50.0, 1.0) == doctest::Approx(1.0).epsilon(0.01));
    CHECK_THROWS_AS(median_amplitude(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("psd models") {
    WeibullSpec spec = table_spec();
    const double c0 = spec.mean_power_c0();

    spec.psd_model = PsdModel::all_pole;
    CHECK(psd_value(0.0, spec) == doctest::Approx(c0));
    CHECK(psd_value(spec.f_3db_hz, spec) == doctest::Approx(c0 / 2.0));
    CHECK(psd_value(-spec.f_3db_hz, spec) == doctest::Approx(c0 / 2.0));

    spec.psd_model = PsdModel::exponential;
    CHECK(psd_value(spec.f_3db_hz, spec) == doctest::Approx(c0 * std::exp(-1.0)));

    spec.psd_model = PsdModel::gaussian;
    CHECK(psd_value(0.0, spec) == doctest::Approx(c0));
    CHECK(psd_value(spec.f_3db_hz, spec) > psd_value(2.0 * spec.f_3db_hz, spec));
}

TEST_CASE("zmnl keeps phase and warps amplitude only") {
    // Same seed, different shapes: the Gaussian pair is identical, so the
    // phases must match exactly while amplitudes differ.
    const auto a = generate_iid_weibull(512, 1.2, 77);
    const auto b = generate_iid_weibull(512, 2.0, 77);
    for (std::size_t i = 0; i < a.size(); i += 41) {
        CHECK(std::arg(a[i]) == doctest::Approx(std::arg(b[i])).epsilon(1e-12));
    }
}

TEST_CASE("shape 2 collapses to Rayleigh") {
    WeibullSpec spec = table_spec();
    spec.shape_p = 2.0;
    spec.scale_q = 1.0;
    const auto z = generate_coherent_weibull(1 << 15, spec, 2048.0, 5);
    // Rayleigh amplitude: E A^4 / (E A^2)^2 = 2.
    double m2 = 0.0, m4 = 0.0;
    for (const auto& v : z) {
        const double p = std::norm(v);
        m2 += p;
        m4 += p * p;
    }
    m2 /= static_cast<double>(z.size());
    m4 /= static_cast<double>(z.size());
    CHECK(m4 / (m2 * m2) == doctest::Approx(2.0).epsilon(0.35));
}

TEST_CASE("coherent generator hits the weibull median and power") {
    const WeibullSpec spec = table_spec();
    const int n = 1 << 20;
    const auto z = generate_coherent_weibull(n, spec, 2048.0, 11);

    std::vector<double> amp(z.size());
    double power = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        amp[i] = std::abs(z[i]);
        power += amp[i] * amp[i];
    }
    power /= static_cast<double>(n);
    std::nth_element(amp.begin(), amp.begin() + n / 2, amp.end());
    const double median = amp[static_cast<std::size_t>(n / 2)];

    CHECK(median == doctest::Approx(spec.median_amplitude()).epsilon(0.01));
    CHECK(power == doctest::Approx(spec.mean_power_c0()).epsilon(0.01));
}

TEST_CASE("generator rejects unusable spectral support") {
    const WeibullSpec spec = table_spec();
    CHECK_THROWS_AS(generate_coherent_weibull(1024, spec, 40.0, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(generate_coherent_weibull(1, spec, 2048.0, 1),
                    std::invalid_argument);
}

TEST_CASE("distribution validator") {
    const WeibullSpec spec = table_spec();

    SUBCASE("self-consistency") {
        const auto z = generate_coherent_weibull(1 << 17, spec, 2048.0, 3);
        const FitReport r = validate_distribution(z, spec, 2048.0);
        CHECK(r.ks_stat < 0.01);
        CHECK(r.psd_rms_db < 2.0);
        CHECK(r.n_samples == z.size());
        CHECK(r.csv_row().find("all_pole") == 0);
    }
    SUBCASE("wrong family is reported, not an error") {
        std::vector<std::complex<double>> uniform(20000);
        for (std::size_t i = 0; i < uniform.size(); ++i)
            uniform[i] = {static_cast<double>(i) / uniform.size(), 0.0};
        const FitReport r = validate_distribution(uniform, spec, 2048.0);
        CHECK(r.ks_stat > 0.05);
    }
    SUBCASE("too few samples") {
        std::vector<std::complex<double>> none;
        CHECK_THROWS_AS(validate_distribution(none, spec, 2048.0),
                        std::invalid_argument);
        std::vector<std::complex<double>> few(100, {1.0, 0.0});
        CHECK_THROWS_AS(validate_distribution(few, spec, 2048.0),
                        std::invalid_argument);
    }
}

TEST_CASE("clutter injection") {
    Scenario sc = test::mini_scenario();
    const int rows = sc.radar.samples_per_chirp;
    const int cols = sc.radar.chirps_per_scan;

    SUBCASE("zero coefficient leaves the matrix untouched") {
        Scenario quiet = sc;
        quiet.clutter.clutter_power_coeff = 0.0;
        IfMatrix m;
        m.data = Eigen::MatrixXcd::Ones(rows, cols);
        inject_clutter(m, quiet, 5);
        CHECK((m.data.array() - 1.0).matrix().norm() == 0.0);
    }
    SUBCASE("power scales linearly with the coefficient") {
        IfMatrix a, b;
        a.data = Eigen::MatrixXcd::Zero(rows, cols);
        b.data = Eigen::MatrixXcd::Zero(rows, cols);
        Scenario twice = sc;
        twice.clutter.clutter_power_coeff *= 2.0;
        inject_clutter(a, sc, 5);
        inject_clutter(b, twice, 5);
        CHECK(b.data.squaredNorm() ==
              doctest::Approx(2.0 * a.data.squaredNorm()).epsilon(1e-12));
    }
    SUBCASE("mean power matches the coefficient times the echo power") {
        IfMatrix m;
        m.data = Eigen::MatrixXcd::Zero(rows, cols);
        inject_clutter(m, sc, 5);
        const double a2 = sc.radar.tx_amplitude * sc.radar.tx_amplitude;
        const double target_power =
            a2 * received_power(sc.radar, sc.target());
        const double measured =
            m.data.squaredNorm() / static_cast<double>(m.data.size());
        CHECK(measured == doctest::Approx(sc.clutter.clutter_power_coeff *
                                          target_power)
                              .epsilon(0.35));
    }
    SUBCASE("scenario without a target is rejected") {
        Scenario no_target = sc;
        no_target.objects.erase(no_target.objects.begin() + 2);
        IfMatrix m;
        m.data = Eigen::MatrixXcd::Zero(rows, cols);
        CHECK_THROWS_AS(inject_clutter(m, no_target, 5), std::runtime_error);
    }
    SUBCASE("persistent pattern is shared across scans, redrawn across runs") {
        IfMatrix s0, s0b, s1, other;
        for (IfMatrix* m : {&s0, &s0b, &s1, &other})
            m->data = Eigen::MatrixXcd::Zero(rows, cols);
        s1.scan_index = 1;
        inject_clutter(s0, sc, 5);
        inject_clutter(s0b, sc, 5);
        inject_clutter(s1, sc, 5);
        inject_clutter(other, sc, 6);
        CHECK((s0.data - s0b.data).norm() == 0.0);  // deterministic
        CHECK((s0.data - s1.data).norm() == 0.0);   // frozen over the run
        CHECK((s0.data - other.data).norm() > 0.0); // fresh per run
    }
    SUBCASE("scan jitter redraws a share of the power") {
        Scenario breathing = sc;
        breathing.clutter.scan_jitter = 0.25;
        IfMatrix s0, s1;
        s0.data = Eigen::MatrixXcd::Zero(rows, cols);
        s1.data = Eigen::MatrixXcd::Zero(rows, cols);
        s1.scan_index = 1;
        inject_clutter(s0, breathing, 5);
        inject_clutter(s1, breathing, 5);
        CHECK((s0.data - s1.data).norm() > 0.0);  // scans now differ...
        std::complex<double> corr = 0.0;
        for (int i = 0; i < rows * cols; ++i)
            corr += s0.data.data()[i] * std::conj(s1.data.data()[i]);
        const double rho = std::abs(corr) /
                           std::sqrt(s0.data.squaredNorm() * s1.data.squaredNorm());
        CHECK(rho > 0.4);  // ...while the held share keeps them correlated
    }
}
