#include "risbeam/scenario_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace risbeam {

using nlohmann::json;

namespace {

void require_keys(const json& j, const std::string& where,
                  const std::set<std::string>& required,
                  const std::set<std::string>& optional = {}) {
    if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
    for (const auto& item : j.items()) {
        if (!required.count(item.key()) && !optional.count(item.key()))
            throw ConfigError(where + ": unknown key '" + item.key() + "'");
    }
    for (const auto& key : required)
        if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
}

Vec3 parse_vec3(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3)
        throw ConfigError(where + ": expected [x, y, z]");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

AntennaModel parse_antenna(const json& j, const std::string& where) {
    require_keys(j, where, {"kind"}, {"boresight_gain_dbi", "beamwidth_3db_deg", "boresight"});
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "isotropic") {
        for (const char* k : {"boresight_gain_dbi", "beamwidth_3db_deg", "boresight"})
            if (j.contains(k))
                throw ConfigError(where + ": key '" + k + "' is not valid for isotropic");
        return AntennaModel::isotropic();
    }
    if (kind != "directional")
        throw ConfigError(where + ": kind must be 'isotropic' or 'directional'");
    for (const char* k : {"boresight_gain_dbi", "beamwidth_3db_deg", "boresight"})
        if (!j.contains(k)) throw ConfigError(where + ": missing key '" + std::string(k) + "'");
    return AntennaModel::directional(j.at("boresight_gain_dbi").get<double>(),
                                     j.at("beamwidth_3db_deg").get<double>(),
                                     parse_vec3(j.at("boresight"), where + ".boresight"));
}

PhaseStateSet parse_phase_states(const json& j, const std::string& where) {
    require_keys(j, where, {"mode"}, {"states"});
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "continuous") {
        if (j.contains("states"))
            throw ConfigError(where + ": 'states' is not valid in continuous mode");
        return PhaseStateSet::continuous();
    }
    if (mode != "discrete")
        throw ConfigError(where + ": mode must be 'continuous' or 'discrete'");
    if (!j.contains("states")) throw ConfigError(where + ": missing key 'states'");
    std::vector<PhaseState> states;
    for (const auto& s : j.at("states")) {
        require_keys(s, where + ".states[]", {"amplitude", "phase_rad"});
        states.push_back({s.at("amplitude").get<double>(), s.at("phase_rad").get<double>()});
    }
    return PhaseStateSet::discrete(std::move(states));
}

json antenna_to_json(const AntennaModel& a) {
    json j;
    if (a.kind == AntennaModel::Kind::isotropic) {
        j["kind"] = "isotropic";
    } else {
        j["kind"] = "directional";
        j["boresight_gain_dbi"] = a.boresight_gain_dbi;
        j["beamwidth_3db_deg"] = a.beamwidth_3db_deg;
        j["boresight"] = {a.boresight.x, a.boresight.y, a.boresight.z};
    }
    return j;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("scenario: JSON parse error: ") + e.what());
    }

    require_keys(j, "scenario",
                 {"carrier_hz", "tx_power_dbm", "tx", "rx", "ris", "direct_path", "scatterers",
                  "noise_sigma_db", "rng_seed"},
                 {"id", "element_cos_exponent"});

    Scenario sc;
    sc.id = j.value("id", std::string("scenario"));
    sc.carrier_hz = j.at("carrier_hz").get<double>();
    sc.tx_power_dbm = j.at("tx_power_dbm").get<double>();
    sc.noise_sigma_db = j.at("noise_sigma_db").get<double>();
    sc.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    sc.element_cos_exponent = j.value("element_cos_exponent", default_element_cos_exponent);

    const json& jtx = j.at("tx");
    require_keys(jtx, "tx", {"position", "antenna"});
    sc.tx.position = parse_vec3(jtx.at("position"), "tx.position");
    sc.tx.antenna = parse_antenna(jtx.at("antenna"), "tx.antenna");

    const json& jrx = j.at("rx");
    require_keys(jrx, "rx", {"position", "antenna"});
    sc.rx.position = parse_vec3(jrx.at("position"), "rx.position");
    sc.rx.antenna = parse_antenna(jrx.at("antenna"), "rx.antenna");

    const json& jris = j.at("ris");
    require_keys(jris, "ris", {"position", "normal", "up", "rows_z", "cols_y", "phase_states"},
                 {"spacing_z_m", "spacing_y_m"});
    sc.ris.position = parse_vec3(jris.at("position"), "ris.position");
    sc.ris.normal = parse_vec3(jris.at("normal"), "ris.normal");
    sc.ris.up = parse_vec3(jris.at("up"), "ris.up");
    sc.ris.geometry.rows_z = jris.at("rows_z").get<std::size_t>();
    sc.ris.geometry.cols_y = jris.at("cols_y").get<std::size_t>();
    sc.ris.geometry.wavelength = sc.carrier_hz > 0.0 ? speed_of_light / sc.carrier_hz : 0.0;
    sc.ris.geometry.spacing_z =
        jris.value("spacing_z_m", sc.ris.geometry.wavelength / 2.0);
    sc.ris.geometry.spacing_y =
        jris.value("spacing_y_m", sc.ris.geometry.wavelength / 2.0);
    sc.ris.phase_states = parse_phase_states(jris.at("phase_states"), "ris.phase_states");

    const json& jd = j.at("direct_path");
    require_keys(jd, "direct_path", {"present"}, {"extra_attenuation_db"});
    sc.direct_path.present = jd.at("present").get<bool>();
    sc.direct_path.extra_attenuation_db = jd.value("extra_attenuation_db", 0.0);

    for (const auto& s : j.at("scatterers")) {
        require_keys(s, "scatterers[]", {"position", "amplitude_gain"});
        sc.scatterers.push_back({parse_vec3(s.at("position"), "scatterers[].position"),
                                 s.at("amplitude_gain").get<double>()});
    }

    try {
        sc.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("scenario: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string scenario_to_json(const Scenario& sc) {
    json j;
    j["id"] = sc.id;
    j["carrier_hz"] = sc.carrier_hz;
    j["tx_power_dbm"] = sc.tx_power_dbm;
    j["noise_sigma_db"] = sc.noise_sigma_db;
    j["rng_seed"] = sc.rng_seed;
    j["element_cos_exponent"] = sc.element_cos_exponent;
    j["tx"] = {{"position", {sc.tx.position.x, sc.tx.position.y, sc.tx.position.z}},
               {"antenna", antenna_to_json(sc.tx.antenna)}};
    j["rx"] = {{"position", {sc.rx.position.x, sc.rx.position.y, sc.rx.position.z}},
               {"antenna", antenna_to_json(sc.rx.antenna)}};
    json states;
    if (sc.ris.phase_states.is_discrete()) {
        states["mode"] = "discrete";
        states["states"] = json::array();
        for (const auto& s : sc.ris.phase_states.states())
            states["states"].push_back({{"amplitude", s.amplitude}, {"phase_rad", s.phase}});
    } else {
        states["mode"] = "continuous";
    }
    j["ris"] = {{"position", {sc.ris.position.x, sc.ris.position.y, sc.ris.position.z}},
                {"normal", {sc.ris.normal.x, sc.ris.normal.y, sc.ris.normal.z}},
                {"up", {sc.ris.up.x, sc.ris.up.y, sc.ris.up.z}},
                {"rows_z", sc.ris.geometry.rows_z},
                {"cols_y", sc.ris.geometry.cols_y},
                {"spacing_z_m", sc.ris.geometry.spacing_z},
                {"spacing_y_m", sc.ris.geometry.spacing_y},
                {"phase_states", states}};
    j["direct_path"] = {{"present", sc.direct_path.present},
                        {"extra_attenuation_db", sc.direct_path.extra_attenuation_db}};
    j["scatterers"] = json::array();
    for (const auto& s : sc.scatterers)
        j["scatterers"].push_back({{"position", {s.position.x, s.position.y, s.position.z}},
                                   {"amplitude_gain", s.amplitude_gain}});
    return j.dump(2);
}

}  // namespace risbeam
