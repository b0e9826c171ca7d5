#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace rcsw {

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kPi = 3.141592653589793238462643383279502884;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

/// Transmitter and sampling constants of one scenario, with derived
/// quantities. Immutable after construction; safe to share across threads.
struct RadarParams {
    double transmit_power_dbm = 20.0;
    double tx_gain_db = 20.0;
    double rx_gain_db = 20.0;
    double noise_psd_dbm_hz = -174.0;
    double bandwidth_hz = 1e9;
    double carrier_hz = 24e9;
    int samples_per_chirp = 1024;   // M
    int chirps_per_scan = 256;      // N
    int scan_count = 10;            // K
    double chirp_interval_s = 1e-4; // T_c (= chirp repetition interval)
    double scan_interval_s = 0.5;
    double tx_amplitude = 1.0;      // normalized units; not part of the power budget

    double slope() const { return bandwidth_hz / chirp_interval_s; }
    double wavelength() const { return kSpeedOfLight / carrier_hz; }
    double sample_rate() const { return samples_per_chirp / chirp_interval_s; }
    double prf() const { return 1.0 / chirp_interval_s; }
    double transmit_power_w() const { return dbm_to_watts(transmit_power_dbm); }
    double noise_psd_w_hz() const { return dbm_to_watts(noise_psd_dbm_hz); }
    /// Complex AWGN power: PSD integrated over the sampled bandwidth.
    double noise_power_w() const { return noise_psd_w_hz() * sample_rate(); }
    /// Largest range whose beat frequency stays below the sample rate.
    double unambiguous_range_m() const {
        return kSpeedOfLight * samples_per_chirp / (2.0 * bandwidth_hz);
    }
};

enum class ObjectKind { static_io, mobile_io, target };

const char* to_string(ObjectKind kind);
ObjectKind object_kind_from_string(const std::string& s);

/// One reflector. Azimuth is carried through configs for fidelity but only
/// radial quantities enter the single-antenna signal model.
struct SceneObject {
    ObjectKind kind = ObjectKind::static_io;
    double range_m = 0.0;
    double azimuth_deg = 0.0;
    double radial_velocity_mps = 0.0;
    double rcs_dbsm = 0.0;

    double rcs_sqm() const { return db_to_linear(rcs_dbsm); }
    /// Range at the start of a given scan (positive velocity recedes).
    double range_at_scan(int scan_index, double scan_interval_s) const {
        return range_m + radial_velocity_mps * scan_index * scan_interval_s;
    }
};

enum class PsdModel { gaussian, exponential, all_pole };

const char* to_string(PsdModel model);
PsdModel psd_model_from_string(const std::string& s);

struct ClutterParams {
    double shape_p = 1.6;
    double scale_q = 6.9;
    double wind_velocity_mps = 5.0;
    double allpole_exponent = 3.0;    // gamma
    double clutter_power_coeff = 2000.0;  // xi = clutter power / target echo power
    PsdModel psd_model = PsdModel::all_pole;
    // Share of clutter power that redraws between scans. The rest is a
    // persistent reflectivity pattern held over the whole observation.
    double scan_jitter = 0.0;
};

struct CfarParams {
    int guard_cells = 8;       // N_G, square ring around the CUT
    int reference_cells = 40;  // N_R, square ring around the guard ring
    double false_alarm_rate = 1e-9;
    int os_rank = 10;          // k-th strongest reference cell

    int guard_ring_width() const;      // derived from guard_cells
    int reference_ring_width() const;  // derived from reference_cells
};

struct GodecParams {
    int rank_bound = 1;       // r
    int power_exponent = 3;   // zeta
    double error_bound = 1e-3;
    double delta = 1e-4;
    int iter_max = 100;
    int n_mov = 18;           // sparsity rows: s = n_mov * N * K
};

struct Scenario {
    RadarParams radar;
    std::vector<SceneObject> objects;
    ClutterParams clutter;
    CfarParams cfar;
    GodecParams godec;
    std::uint64_t seed = 1;

    /// Index of the unique target object, or -1 if absent.
    int target_index() const;
    const SceneObject& target() const;  // throws if absent
};

/// Bin spacings of the range-velocity grid.
struct AxisInfo {
    int range_bins = 0;      // M
    int velocity_bins = 0;   // N (or N-1 after cancellation)
    double range_bin_m = 0.0;       // c / (2B)
    double velocity_bin_mps = 0.0;  // lambda / (2 * velocity_bins * T_c)
    int zero_velocity_bin = 0;      // floor(velocity_bins / 2)
    double prf_hz = 0.0;
    double wavelength_m = 0.0;

    /// Fractional range bin of a reflector at range r (beat-frequency bin).
    double range_bin_of(double range_m) const { return range_m / range_bin_m; }
    /// Fractional velocity bin of a radial velocity. The map is formed with
    /// the conjugate transform, so receding objects land right of center.
    double velocity_bin_of(double radial_velocity_mps) const {
        const double offset_hz = 2.0 * radial_velocity_mps / wavelength_m;
        return zero_velocity_bin + offset_hz / (prf_hz / velocity_bins);
    }
};

AxisInfo derive_axes(const RadarParams& radar);
/// Axis info for maps whose chirp dimension was shortened (e.g. by MTI).
AxisInfo derive_axes(const RadarParams& radar, int velocity_bins);

/// Received echo power from the radar equation, in linear watts.
/// Throws on non-positive range.
double received_power(const RadarParams& radar, const SceneObject& obj);

/// Validates every scenario invariant; throws std::invalid_argument naming
/// the offending field.
void validate(const Scenario& scenario);

Scenario load_scenario(const std::string& json_text);
Scenario load_scenario_file(const std::string& path);
std::string save_scenario(const Scenario& scenario);

}  // namespace rcsw
