#include "risbeam/harness.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "risbeam/scenario_io.hpp"

namespace risbeam {

using nlohmann::json;

namespace {
constexpr double pi = std::numbers::pi;
constexpr double deg = pi / 180.0;

std::string format_num(const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, v);
    return buf;
}

Vec3 json_vec3(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3) throw ConfigError(where + ": expected [x, y, z]");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
}
}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::string to_string(AlgorithmKind kind) {
    switch (kind) {
        case AlgorithmKind::uniform: return "uniform";
        case AlgorithmKind::exhaustive_angle: return "exhaustive";
        case AlgorithmKind::exhaustive_dft: return "dft";
        case AlgorithmKind::two_step: return "two-step";
        case AlgorithmKind::greedy: return "greedy";
    }
    return "two-step";
}

AlgorithmKind algorithm_kind_from_string(const std::string& s) {
    if (s == "uniform") return AlgorithmKind::uniform;
    if (s == "exhaustive") return AlgorithmKind::exhaustive_angle;
    if (s == "dft") return AlgorithmKind::exhaustive_dft;
    if (s == "two-step") return AlgorithmKind::two_step;
    if (s == "greedy") return AlgorithmKind::greedy;
    throw ConfigError("unknown algorithm '" + s + "'");
}

SweepSpec parse_sweep(const std::string& json_text, const RisPlacement& ris) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("sweep: JSON parse error: ") + e.what());
    }
    if (!j.is_object() || !j.contains("kind")) throw ConfigError("sweep: missing key 'kind'");

    SweepSpec spec;
    spec.aim_rx_at_ris = j.value("aim_rx_at_ris", true);
    const std::string kind = j.at("kind").get<std::string>();

    if (kind == "points") {
        for (const auto& p : j.at("points"))
            spec.points.push_back({p.at("label").get<std::string>(),
                                   json_vec3(p.at("position"), "sweep.points[].position")});
    } else if (kind == "line") {
        const Vec3 start = json_vec3(j.at("start"), "sweep.start");
        const Vec3 step = json_vec3(j.at("step"), "sweep.step");
        const std::size_t count = j.at("count").get<std::size_t>();
        const double label_start = j.value("label_start", 0.0);
        const double label_step = j.value("label_step", 1.0);
        for (std::size_t i = 0; i < count; ++i)
            spec.points.push_back({format_num("%g", label_start + label_step * i),
                                   start + static_cast<double>(i) * step});
    } else if (kind == "grid") {
        const Vec3 origin = json_vec3(j.at("origin"), "sweep.origin");
        const Vec3 axis_a = json_vec3(j.at("axis_a"), "sweep.axis_a");
        const Vec3 axis_b = json_vec3(j.at("axis_b"), "sweep.axis_b");
        const std::size_t count_a = j.at("count_a").get<std::size_t>();
        const std::size_t count_b = j.at("count_b").get<std::size_t>();
        std::size_t index = 1;
        for (std::size_t b = 0; b < count_b; ++b)
            for (std::size_t a = 0; a < count_a; ++a)
                spec.points.push_back({std::to_string(index++),
                                       origin + static_cast<double>(a) * axis_a +
                                           static_cast<double>(b) * axis_b});
    } else if (kind == "radial") {
        const Vec3 center =
            j.contains("center") ? json_vec3(j.at("center"), "sweep.center") : ris.panel_center();
        for (const auto& ja : j.at("angles_deg")) {
            const double angle = ja.get<double>();
            const Vec3 dir =
                std::cos(angle * deg) * ris.normal + std::sin(angle * deg) * ris.axis_y();
            for (const auto& jd : j.at("distances_m")) {
                const double dist = jd.get<double>();
                spec.points.push_back(
                    {format_num("%g", angle) + "/" + format_num("%g", dist), center + dist * dir});
            }
        }
    } else {
        throw ConfigError("sweep: unknown kind '" + kind + "'");
    }
    if (spec.points.empty()) throw ConfigError("sweep: no points");
    return spec;
}

SweepSpec load_sweep(const std::string& path, const RisPlacement& ris) {
    std::ifstream in(path);
    if (!in) throw ConfigError("sweep: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_sweep(buf.str(), ris);
}

namespace {

Scenario scenario_at_point(const Scenario& base, const SweepSpec& sweep, std::size_t index) {
    Scenario sc = base;
    sc.rx.position = sweep.points[index].position;
    if (sweep.aim_rx_at_ris && sc.rx.antenna.kind == AntennaModel::Kind::directional)
        sc.rx.antenna.boresight = (sc.ris.panel_center() - sc.rx.position).normalized();
    return sc;
}

struct ConfigureResult {
    PhaseProfile profile;
    std::uint64_t queries = 0;
};

ConfigureResult configure_profile(const Scenario& sc, const AlgorithmSpec& algo) {
    const RisGeometry& geom = sc.ris.geometry;
    const PhaseStateSet states = algo.quantize_with_scenario_states
                                     ? sc.ris.phase_states
                                     : PhaseStateSet::continuous();
    if (algo.kind == AlgorithmKind::uniform)
        return {PhaseProfile::uniform_state(geom, states, 0), 0};

    SimulatedOracle oracle(sc);
    SearchResult result;
    switch (algo.kind) {
        case AlgorithmKind::exhaustive_angle: {
            Codebook cb = build_angle_codebook(geom, algo.grid);
            result = exhaustive_search(oracle, cb, geom, states);
            break;
        }
        case AlgorithmKind::exhaustive_dft: {
            Codebook cb = build_dft_codebook(geom, algo.dft_oversampling_z, algo.dft_oversampling_y);
            result = exhaustive_search(oracle, cb, geom, states);
            break;
        }
        case AlgorithmKind::two_step:
            result = two_step_search(oracle, geom, algo.grid, states);
            break;
        case AlgorithmKind::greedy: {
            if (!states.is_discrete())
                throw ConfigError("greedy requires a discrete phase-state set");
            result = greedy_search(oracle, geom, states, algo.greedy_sweeps, algo.greedy_group);
            break;
        }
        case AlgorithmKind::uniform:
            break;  // handled above
    }
    return {std::move(result.best_profile), oracle.query_count()};
}

}  // namespace

ExperimentReport run_scenario(const Scenario& scenario, const AlgorithmSpec& algo,
                              const SweepSpec& sweep, std::uint64_t seed) {
    scenario.validate();
    if (sweep.points.empty()) throw ConfigError("run_scenario: empty sweep");

    ExperimentReport report;
    report.scenario_id = scenario.id;
    report.algorithm = to_string(algo.kind);
    report.seed = seed;

    const PhaseProfile off_profile =
        PhaseProfile::uniform_state(scenario.ris.geometry, scenario.ris.phase_states, 0);

    std::optional<PhaseProfile> held;
    if (algo.fixed_at_point) {
        if (*algo.fixed_at_point >= sweep.points.size())
            throw ConfigError("run_scenario: fixed_at_point is outside the sweep");
        Scenario cfg = scenario_at_point(scenario, sweep, *algo.fixed_at_point);
        cfg.rng_seed = derive_seed(seed, *algo.fixed_at_point);
        ConfigureResult r = configure_profile(cfg, algo);
        held = std::move(r.profile);
        report.query_counts.push_back(r.queries);
    }

    for (std::size_t i = 0; i < sweep.points.size(); ++i) {
        Scenario sc = scenario_at_point(scenario, sweep, i);
        sc.rng_seed = derive_seed(seed, i);

        PhaseProfile profile = off_profile;
        if (held) {
            profile = *held;
        } else {
            ConfigureResult r = configure_profile(sc, algo);
            profile = std::move(r.profile);
            report.query_counts.push_back(r.queries);
        }

        ExperimentRecord rec;
        rec.label = sweep.points[i].label;
        rec.position = sweep.points[i].position;
        rec.power_on_dbm = received_power(sc, profile);
        rec.power_off_dbm = received_power(sc, off_profile);
        Scenario none = sc;
        none.ris_present = false;
        rec.power_none_dbm = received_power(none, off_profile);
        rec.gain_db = rec.power_on_dbm - rec.power_off_dbm;
        report.records.push_back(std::move(rec));
    }
    return report;
}

std::string report_records_csv(const ExperimentReport& report) {
    std::ostringstream out;
    out << "point,label,x_m,y_m,z_m,power_on_dbm,power_off_dbm,power_none_dbm,gain_db\n";
    for (std::size_t i = 0; i < report.records.size(); ++i) {
        const auto& r = report.records[i];
        out << (i + 1) << ',' << r.label << ',' << format_num("%.4f", r.position.x) << ','
            << format_num("%.4f", r.position.y) << ',' << format_num("%.4f", r.position.z) << ','
            << format_num("%.4f", r.power_on_dbm) << ',' << format_num("%.4f", r.power_off_dbm)
            << ',' << format_num("%.4f", r.power_none_dbm) << ','
            << format_num("%.4f", r.gain_db) << "\n";
    }
    return out.str();
}

std::string report_metadata_json(const ExperimentReport& report) {
    json j;
    j["scenario"] = report.scenario_id;
    j["algorithm"] = report.algorithm;
    j["seed"] = report.seed;
    j["version"] = report.version;
    j["records"] = report.records.size();
    j["query_counts"] = report.query_counts;
    return j.dump(2) + "\n";
}

void write_report(const ExperimentReport& report, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    write_file(out_dir + "/records.csv", report_records_csv(report));
    write_file(out_dir + "/report.json", report_metadata_json(report));
}

PatternRun run_pattern(const RisGeometry& geom, const std::vector<double>& commands_deg,
                       double step_deg, const PhaseStateSet& states,
                       double element_cos_exponent) {
    if (commands_deg.empty()) throw ConfigError("run_pattern: no command angles");
    geom.validate();

    PatternRun run;
    double sll_sum = 0.0;
    double peak_min = 0.0, peak_max = 0.0;
    double gain_min = 0.0, gain_max = 0.0;
    for (std::size_t i = 0; i < commands_deg.size(); ++i) {
        const double command = commands_deg[i];
        PhaseProfile profile =
            profile_from_vector(steering_vector(geom, pi / 2.0, command * deg));
        if (states.is_discrete()) profile = quantize_profile(profile, states);

        CutSpec cut;
        cut.axis = CutAxis::azimuth;
        cut.fixed_deg = 90.0;
        cut.start_deg = -90.0;
        cut.stop_deg = 90.0;
        cut.step_deg = step_deg;

        PatternCommandResult res;
        res.command_deg = command;
        res.pattern = compute_cut(geom, profile, cut, Incidence::normal(), false);
        res.metrics = extract_metrics(res.pattern);
        RadiationPattern with_factor = compute_cut(geom, profile, cut, Incidence::normal(),
                                                   true, element_cos_exponent);
        res.peak_gain_db = 20.0 * std::log10(with_factor.peak_magnitude);

        sll_sum += res.metrics.sidelobe_level_db;
        if (i == 0) {
            peak_min = peak_max = res.metrics.peak_angle_deg;
            gain_min = gain_max = res.peak_gain_db;
        } else {
            peak_min = std::min(peak_min, res.metrics.peak_angle_deg);
            peak_max = std::max(peak_max, res.metrics.peak_angle_deg);
            gain_min = std::min(gain_min, res.peak_gain_db);
            gain_max = std::max(gain_max, res.peak_gain_db);
        }
        run.commands.push_back(std::move(res));
    }
    run.mean_sidelobe_level_db = sll_sum / static_cast<double>(commands_deg.size());
    run.scan_range_deg = peak_max - peak_min;
    run.gain_fluctuation_db = gain_max - gain_min;
    for (auto& c : run.commands) c.metrics.scan_range_deg = run.scan_range_deg;
    return run;
}

void write_pattern_run(const PatternRun& run, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::ostringstream metrics;
    metrics << "command_deg,peak_deg,beamwidth_3db_deg,sidelobe_level_db,peak_gain_db\n";
    for (const auto& c : run.commands) {
        std::string name = format_num("%g", c.command_deg);
        write_file(out_dir + "/cut_" + name + ".csv", pattern_to_csv(c.pattern));
        metrics << format_num("%.1f", c.command_deg) << ','
                << format_num("%.4f", c.metrics.peak_angle_deg) << ','
                << format_num("%.4f", c.metrics.beamwidth_3db_deg) << ','
                << format_num("%.4f", c.metrics.sidelobe_level_db) << ','
                << format_num("%.4f", c.peak_gain_db) << "\n";
    }
    write_file(out_dir + "/metrics.csv", metrics.str());

    json j;
    j["commands"] = run.commands.size();
    j["mean_sidelobe_level_db"] = run.mean_sidelobe_level_db;
    j["scan_range_deg"] = run.scan_range_deg;
    j["gain_fluctuation_db"] = run.gain_fluctuation_db;
    write_file(out_dir + "/summary.json", j.dump(2) + "\n");
}

SweepSpec default_nearfield_arc(const RisPlacement& ris) {
    SweepSpec spec;
    const Vec3 center = ris.panel_center();
    for (int angle = 30; angle <= 60; angle += 5) {
        const Vec3 dir = std::cos(angle * deg) * ris.normal + std::sin(angle * deg) * ris.axis_y();
        spec.points.push_back({format_num("%g", angle) + "/2", center + 2.0 * dir});
    }
    return spec;
}

AlgorithmComparison compare_algorithms(const Scenario& scenario, const AngleGrid& grid,
                                       const SweepSpec& arc, std::uint64_t seed,
                                       unsigned dft_oversampling) {
    scenario.validate();
    if (arc.points.empty()) throw ConfigError("compare_algorithms: empty arc");

    AlgorithmComparison cmp;
    const AlgorithmKind kinds[] = {AlgorithmKind::exhaustive_dft,
                                   AlgorithmKind::exhaustive_angle, AlgorithmKind::two_step};
    for (std::size_t a = 0; a < 3; ++a) {
        AlgorithmSpec algo;
        algo.kind = kinds[a];
        algo.grid = grid;
        algo.dft_oversampling_z = dft_oversampling;
        algo.dft_oversampling_y = dft_oversampling;
        ExperimentReport report =
            run_scenario(scenario, algo, arc, derive_seed(seed, 1000 + a));
        double gain_sum = 0.0;
        for (const auto& r : report.records) gain_sum += r.gain_db;
        cmp.rows.push_back({to_string(kinds[a]),
                            gain_sum / static_cast<double>(report.records.size()),
                            report.query_counts.empty() ? 0 : report.query_counts.front()});
    }
    return cmp;
}

std::string comparison_csv(const AlgorithmComparison& cmp) {
    std::ostringstream out;
    out << "algorithm,average_gain_db,queries_per_point\n";
    for (const auto& row : cmp.rows)
        out << row.algorithm << ',' << format_num("%.4f", row.average_gain_db) << ','
            << row.queries_per_point << "\n";
    return out.str();
}

}  // namespace risbeam
