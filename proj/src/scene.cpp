#include "rcsw/scene.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rcsw {

using nlohmann::json;

const char* to_string(ObjectKind kind) {
    switch (kind) {
        case ObjectKind::static_io: return "static_io";
        case ObjectKind::mobile_io: return "mobile_io";
        case ObjectKind::target: return "target";
    }
    return "?";
}

ObjectKind object_kind_from_string(const std::string& s) {
    if (s == "static_io") return ObjectKind::static_io;
    if (s == "mobile_io") return ObjectKind::mobile_io;
    if (s == "target") return ObjectKind::target;
    throw std::invalid_argument("unknown object kind '" + s + "'");
}

const char* to_string(PsdModel model) {
    switch (model) {
        case PsdModel::gaussian: return "gaussian";
        case PsdModel::exponential: return "exponential";
        case PsdModel::all_pole: return "all_pole";
    }
    return "?";
}

PsdModel psd_model_from_string(const std::string& s) {
    if (s == "gaussian") return PsdModel::gaussian;
    if (s == "exponential") return PsdModel::exponential;
    if (s == "all_pole") return PsdModel::all_pole;
    throw std::invalid_argument("unknown psd model '" + s + "'");
}

namespace {

// Side length of the square with `cells` cells surrounding an existing
// inner square of side `inner`, or 0 if no integer layout exists.
int ring_outer_side(int cells, int inner) {
    const int outer_sq = cells + inner * inner;
    const int outer = static_cast<int>(std::lround(std::sqrt(double(outer_sq))));
    if (outer * outer != outer_sq || outer <= inner || (outer - inner) % 2 != 0)
        return 0;
    return outer;
}

}  // namespace

int CfarParams::guard_ring_width() const {
    const int side = ring_outer_side(guard_cells, 1);  // CUT is the 1x1 core
    return side > 0 ? (side - 1) / 2 : 0;
}

int CfarParams::reference_ring_width() const {
    const int inner = 2 * guard_ring_width() + 1;
    const int side = ring_outer_side(reference_cells, inner);
    return side > 0 ? (side - inner) / 2 : 0;
}

int Scenario::target_index() const {
    for (std::size_t i = 0; i < objects.size(); ++i)
        if (objects[i].kind == ObjectKind::target) return static_cast<int>(i);
    return -1;
}

const SceneObject& Scenario::target() const {
    const int idx = target_index();
    if (idx < 0) throw std::runtime_error("scenario has no target object");
    return objects[static_cast<std::size_t>(idx)];
}

AxisInfo derive_axes(const RadarParams& radar) {
    return derive_axes(radar, radar.chirps_per_scan);
}

AxisInfo derive_axes(const RadarParams& radar, int velocity_bins) {
    AxisInfo axes;
    axes.range_bins = radar.samples_per_chirp;
    axes.velocity_bins = velocity_bins;
    axes.range_bin_m = kSpeedOfLight / (2.0 * radar.bandwidth_hz);
    axes.velocity_bin_mps =
        radar.wavelength() / (2.0 * velocity_bins * radar.chirp_interval_s);
    axes.zero_velocity_bin = velocity_bins / 2;
    axes.prf_hz = radar.prf();
    axes.wavelength_m = radar.wavelength();
    return axes;
}

double received_power(const RadarParams& radar, const SceneObject& obj) {
    if (!(obj.range_m > 0.0))
        throw std::invalid_argument("received_power: range must be positive");
    const double lambda = radar.wavelength();
    const double four_pi = 4.0 * kPi;
    const double r2 = obj.range_m * obj.range_m;
    return radar.transmit_power_w() * db_to_linear(radar.tx_gain_db) *
           db_to_linear(radar.rx_gain_db) * lambda * lambda * obj.rcs_sqm() /
           (four_pi * four_pi * four_pi * r2 * r2);
}

void validate(const Scenario& sc) {
    const auto fail = [](const std::string& msg) {
        throw std::invalid_argument(msg);
    };
    const RadarParams& r = sc.radar;
    if (r.samples_per_chirp < 1) fail("samples_per_chirp must be >= 1");
    if (r.chirps_per_scan < 1) fail("chirps_per_scan must be >= 1");
    if (r.scan_count < 1) fail("scan_count must be >= 1");
    if (!(r.bandwidth_hz > 0)) fail("bandwidth_hz must be positive");
    if (!(r.carrier_hz > 0)) fail("carrier_hz must be positive");
    if (!(r.chirp_interval_s > 0)) fail("chirp_interval_s must be positive");
    if (!(r.scan_interval_s > 0)) fail("scan_interval_s must be positive");
    if (!(r.tx_amplitude > 0)) fail("tx_amplitude must be positive");
    if (!std::isfinite(r.slope()) || !std::isfinite(r.wavelength()) ||
        !std::isfinite(r.sample_rate()))
        fail("derived radar constants must be finite");

    if (sc.objects.empty()) fail("scene requires at least one object");
    int targets = 0;
    for (std::size_t i = 0; i < sc.objects.size(); ++i) {
        const SceneObject& o = sc.objects[i];
        const std::string tag = "objects[" + std::to_string(i) + "]: ";
        if (!(o.range_m > 0)) fail(tag + "range_m must be positive");
        if (o.kind == ObjectKind::target) {
            ++targets;
            if (o.rcs_dbsm > 0.0) fail(tag + "target RCS exceeds 0 dBsm");
            if (std::abs(o.radial_velocity_mps) > 1.0)
                fail(tag + "target radial velocity exceeds 1 m/s");
        }
        if (o.kind == ObjectKind::static_io && o.radial_velocity_mps != 0.0)
            fail(tag + "static object has nonzero radial velocity");
        // Ranges over the whole scan sequence must stay positive and
        // unambiguous (beat frequency below the sample rate).
        const double r_last = o.range_at_scan(r.scan_count - 1, r.scan_interval_s);
        if (!(std::min(o.range_m, r_last) > 0))
            fail(tag + "range must remain positive across scans");
        const double r_max = std::max(o.range_m, r_last);
        if (r_max >= r.unambiguous_range_m())
            fail(tag + "beat frequency exceeds the sample rate (unambiguous range " +
                 std::to_string(r.unambiguous_range_m()) + " m)");
    }
    if (targets > 1) fail("scene supports at most one target object");

    const ClutterParams& c = sc.clutter;
    if (!(c.shape_p > 0)) fail("clutter shape_p must be positive");
    if (!(c.scale_q > 0)) fail("clutter scale_q must be positive");
    if (!(c.wind_velocity_mps > 0)) fail("clutter wind_velocity_mps must be positive");
    if (!(c.allpole_exponent > 0)) fail("clutter allpole_exponent must be positive");
    if (c.clutter_power_coeff < 0) fail("clutter_power_coeff must be non-negative");
    if (c.scan_jitter < 0.0 || c.scan_jitter > 1.0)
        fail("clutter scan_jitter must lie in [0,1]");

    const CfarParams& f = sc.cfar;
    if (f.guard_ring_width() < 1)
        fail("cfar guard_cells does not form a square ring");
    if (f.reference_ring_width() < 1)
        fail("cfar reference_cells does not form a square ring around the guard ring");
    if (!(f.false_alarm_rate > 0 && f.false_alarm_rate < 1))
        fail("cfar false_alarm_rate must lie in (0,1)");
    if (f.os_rank < 1 || f.os_rank > f.reference_cells)
        fail("cfar os_rank must lie in [1, reference_cells]");

    const GodecParams& g = sc.godec;
    if (g.rank_bound < 1) fail("godec rank_bound must be >= 1");
    if (g.power_exponent < 0) fail("godec power_exponent must be >= 0");
    if (!(g.error_bound > 0)) fail("godec error_bound must be positive");
    if (g.delta < 0) fail("godec delta must be non-negative");
    if (g.iter_max < 1) fail("godec iter_max must be >= 1");
    if (g.n_mov < 1 || g.n_mov > r.samples_per_chirp)
        fail("godec n_mov must lie in (0, samples_per_chirp]");
}

namespace {

Scenario scenario_from_json(const json& j) {
    Scenario sc;
    const json& jr = j.at("radar");
    RadarParams& r = sc.radar;
    jr.at("transmit_power_dbm").get_to(r.transmit_power_dbm);
    jr.at("tx_gain_db").get_to(r.tx_gain_db);
    jr.at("rx_gain_db").get_to(r.rx_gain_db);
    jr.at("noise_psd_dbm_hz").get_to(r.noise_psd_dbm_hz);
    jr.at("bandwidth_hz").get_to(r.bandwidth_hz);
    jr.at("carrier_hz").get_to(r.carrier_hz);
    jr.at("samples_per_chirp").get_to(r.samples_per_chirp);
    jr.at("chirps_per_scan").get_to(r.chirps_per_scan);
    jr.at("scan_count").get_to(r.scan_count);
    jr.at("chirp_interval_s").get_to(r.chirp_interval_s);
    jr.at("scan_interval_s").get_to(r.scan_interval_s);
    r.tx_amplitude = jr.value("tx_amplitude", 1.0);

    for (const json& jo : j.at("objects")) {
        SceneObject o;
        o.kind = object_kind_from_string(jo.at("kind").get<std::string>());
        jo.at("range_m").get_to(o.range_m);
        o.azimuth_deg = jo.value("azimuth_deg", 0.0);
        o.radial_velocity_mps = jo.value("radial_velocity_mps", 0.0);
        jo.at("rcs_dbsm").get_to(o.rcs_dbsm);
        sc.objects.push_back(o);
    }

    const json& jc = j.at("clutter");
    jc.at("shape_p").get_to(sc.clutter.shape_p);
    jc.at("scale_q").get_to(sc.clutter.scale_q);
    jc.at("wind_velocity_mps").get_to(sc.clutter.wind_velocity_mps);
    jc.at("allpole_exponent").get_to(sc.clutter.allpole_exponent);
    jc.at("clutter_power_coeff").get_to(sc.clutter.clutter_power_coeff);
    sc.clutter.psd_model =
        psd_model_from_string(jc.value("psd_model", std::string("all_pole")));
    sc.clutter.scan_jitter = jc.value("scan_jitter", 0.0);

    const json& jf = j.at("cfar");
    jf.at("guard_cells").get_to(sc.cfar.guard_cells);
    jf.at("reference_cells").get_to(sc.cfar.reference_cells);
    jf.at("false_alarm_rate").get_to(sc.cfar.false_alarm_rate);
    jf.at("os_rank").get_to(sc.cfar.os_rank);

    const json& jg = j.at("godec");
    jg.at("rank_bound").get_to(sc.godec.rank_bound);
    jg.at("power_exponent").get_to(sc.godec.power_exponent);
    jg.at("error_bound").get_to(sc.godec.error_bound);
    jg.at("delta").get_to(sc.godec.delta);
    jg.at("iter_max").get_to(sc.godec.iter_max);
    jg.at("n_mov").get_to(sc.godec.n_mov);

    sc.seed = j.at("seed").get<std::uint64_t>();
    return sc;
}

json scenario_to_json(const Scenario& sc) {
    json j;
    const RadarParams& r = sc.radar;
    j["radar"] = {{"transmit_power_dbm", r.transmit_power_dbm},
                  {"tx_gain_db", r.tx_gain_db},
                  {"rx_gain_db", r.rx_gain_db},
                  {"noise_psd_dbm_hz", r.noise_psd_dbm_hz},
                  {"bandwidth_hz", r.bandwidth_hz},
                  {"carrier_hz", r.carrier_hz},
                  {"samples_per_chirp", r.samples_per_chirp},
                  {"chirps_per_scan", r.chirps_per_scan},
                  {"scan_count", r.scan_count},
                  {"chirp_interval_s", r.chirp_interval_s},
                  {"scan_interval_s", r.scan_interval_s},
                  {"tx_amplitude", r.tx_amplitude}};
    j["objects"] = json::array();
    for (const SceneObject& o : sc.objects) {
        j["objects"].push_back({{"kind", to_string(o.kind)},
                                {"range_m", o.range_m},
                                {"azimuth_deg", o.azimuth_deg},
                                {"radial_velocity_mps", o.radial_velocity_mps},
                                {"rcs_dbsm", o.rcs_dbsm}});
    }
    j["clutter"] = {{"shape_p", sc.clutter.shape_p},
                    {"scale_q", sc.clutter.scale_q},
                    {"wind_velocity_mps", sc.clutter.wind_velocity_mps},
                    {"allpole_exponent", sc.clutter.allpole_exponent},
                    {"clutter_power_coeff", sc.clutter.clutter_power_coeff},
                    {"psd_model", to_string(sc.clutter.psd_model)},
                    {"scan_jitter", sc.clutter.scan_jitter}};
    j["cfar"] = {{"guard_cells", sc.cfar.guard_cells},
                 {"reference_cells", sc.cfar.reference_cells},
                 {"false_alarm_rate", sc.cfar.false_alarm_rate},
                 {"os_rank", sc.cfar.os_rank}};
    j["godec"] = {{"rank_bound", sc.godec.rank_bound},
                  {"power_exponent", sc.godec.power_exponent},
                  {"error_bound", sc.godec.error_bound},
                  {"delta", sc.godec.delta},
                  {"iter_max", sc.godec.iter_max},
                  {"n_mov", sc.godec.n_mov}};
    j["seed"] = sc.seed;
    return j;
}

}  // namespace

Scenario load_scenario(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("scenario parse failure: ") + e.what());
    }
    Scenario sc;
    try {
        sc = scenario_from_json(j);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("scenario field error: ") + e.what());
    }
    validate(sc);
    return sc;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_scenario(ss.str());
}

std::string save_scenario(const Scenario& scenario) {
    return scenario_to_json(scenario).dump(2) + "\n";
}

}  // namespace rcsw
