// risbeam: RIS beamforming toolkit CLI.
//
// Subcommands: pattern, search, scenario, compare, serve.
// Exit codes: 0 success, 2 configuration error, 3 oracle/transport failure,
// 4 threshold failure in --check mode.

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "risbeam/harness.hpp"
#include "risbeam/protocol.hpp"
#include "risbeam/scenario_io.hpp"

namespace {

using namespace risbeam;
using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<double> json_angle_list(const json& j, const std::string& where) {
    std::vector<double> out;
    if (j.is_array()) {
        for (const auto& v : j) out.push_back(v.get<double>());
    } else if (j.is_object()) {
        const double start = j.at("start").get<double>();
        const double stop = j.at("stop").get<double>();
        const double step = j.at("step").get<double>();
        if (!(step > 0.0)) throw ConfigError(where + ": step must be positive");
        for (double a = start; a <= stop + 1e-9; a += step) out.push_back(a);
    } else {
        throw ConfigError(where + ": expected a list or {start, stop, step}");
    }
    if (out.empty()) throw ConfigError(where + ": empty angle list");
    return out;
}

AngleGrid load_grid(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ConfigError("grid: JSON parse error: " + std::string(e.what()));
    }
    constexpr double d = 3.14159265358979323846 / 180.0;
    AngleGrid grid;
    for (double v : json_angle_list(j.at("zeniths_deg"), "grid.zeniths_deg"))
        grid.zeniths.push_back(v * d);
    for (double v : json_angle_list(j.at("azimuths_deg"), "grid.azimuths_deg"))
        grid.azimuths.push_back(v * d);
    grid.validate();
    return grid;
}

RisGeometry load_geom(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ConfigError("geom: JSON parse error: " + std::string(e.what()));
    }
    for (const auto& item : j.items()) {
        const std::string& k = item.key();
        if (k != "rows_z" && k != "cols_y" && k != "carrier_hz" && k != "wavelength_m" &&
            k != "spacing_z_m" && k != "spacing_y_m")
            throw ConfigError("geom: unknown key '" + k + "'");
    }
    RisGeometry g;
    g.rows_z = j.at("rows_z").get<std::size_t>();
    g.cols_y = j.at("cols_y").get<std::size_t>();
    if (j.contains("wavelength_m"))
        g.wavelength = j.at("wavelength_m").get<double>();
    else
        g.wavelength = speed_of_light / j.at("carrier_hz").get<double>();
    g.spacing_z = j.value("spacing_z_m", g.wavelength / 2.0);
    g.spacing_y = j.value("spacing_y_m", g.wavelength / 2.0);
    g.validate();
    return g;
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("RISBEAM_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw ConfigError("RISBEAM_SEED is not an unsigned integer");
        }
    }
    return 1;
}

std::pair<std::string, std::uint16_t> split_endpoint(const std::string& endpoint) {
    auto pos = endpoint.rfind(':');
    if (pos == std::string::npos)
        throw ConfigError("endpoint must be host:port, got '" + endpoint + "'");
    int port = std::stoi(endpoint.substr(pos + 1));
    if (port < 0 || port > 65535) throw ConfigError("port out of range");
    return {endpoint.substr(0, pos), static_cast<std::uint16_t>(port)};
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
}

int cmd_pattern(const std::string& geom_path, const std::vector<double>& angles,
                const std::string& out_dir, double step, unsigned quantize_bits) {
    RisGeometry geom = load_geom(geom_path);
    PhaseStateSet states = quantize_bits > 0 ? PhaseStateSet::uniform(quantize_bits)
                                             : PhaseStateSet::continuous();
    PatternRun run = run_pattern(geom, angles, step, states);
    write_pattern_run(run, out_dir);
    std::cout << "pattern: " << run.commands.size() << " cuts -> " << out_dir
              << " (scan range " << run.scan_range_deg << " deg, mean SLL "
              << run.mean_sidelobe_level_db << " dB, peak-gain fluctuation "
              << run.gain_fluctuation_db << " dB)\n";
    return 0;
}

int cmd_search(const std::string& scenario_path, const std::string& algo_name,
               const std::string& grid_path, const std::string& remote,
               std::uint64_t seed, const std::string& trace_path, bool continuous,
               unsigned sweeps, const std::string& group, const std::string& encoding) {
    Scenario sc = load_scenario(scenario_path);
    sc.rng_seed = seed;
    AngleGrid grid = grid_path.empty() ? AngleGrid::default_grid() : load_grid(grid_path);
    PhaseStateSet states = continuous ? PhaseStateSet::continuous() : sc.ris.phase_states;

    std::unique_ptr<PowerOracle> oracle;
    if (remote.empty()) {
        oracle = make_oracle(sc);
    } else {
        auto [host, port] = split_endpoint(remote);
        ProfileEncoding enc =
            encoding == "1bit" ? ProfileEncoding::one_bit : ProfileEncoding::phase;
        oracle = std::make_unique<RemoteOracle>(host, port, enc, sc.ris.phase_states);
    }

    const RisGeometry& geom = sc.ris.geometry;
    SearchResult result;
    AlgorithmKind kind = algorithm_kind_from_string(algo_name);
    switch (kind) {
        case AlgorithmKind::exhaustive_angle:
            result = exhaustive_search(*oracle, build_angle_codebook(geom, grid), geom, states);
            break;
        case AlgorithmKind::exhaustive_dft:
            result = exhaustive_search(*oracle, build_dft_codebook(geom, 1, 1), geom, states);
            break;
        case AlgorithmKind::two_step:
            result = two_step_search(*oracle, geom, grid, states);
            break;
        case AlgorithmKind::greedy: {
            if (!states.is_discrete())
                throw ConfigError("greedy requires a discrete phase-state set");
            GreedyGroup g = group == "element" ? GreedyGroup::element : GreedyGroup::column;
            result = greedy_search(*oracle, geom, states, sweeps, g);
            break;
        }
        case AlgorithmKind::uniform:
            throw ConfigError("'uniform' is not a search algorithm");
    }

    if (!trace_path.empty()) write_text(trace_path, trace_to_csv(result));
    std::cout << "search: best " << result.best_power_dbm << " dBm after "
              << result.query_count << " queries";
    if (result.selected_angles) {
        constexpr double r2d = 180.0 / 3.14159265358979323846;
        std::cout << " (theta " << result.selected_angles->first * r2d << " deg, phi "
                  << result.selected_angles->second * r2d << " deg)";
    }
    std::cout << "\n";
    return 0;
}

int cmd_scenario(const std::string& scenario_path, const std::string& sweep_path,
                 const std::string& out_dir, const std::string& algo_name,
                 const std::string& grid_path, std::uint64_t seed, int fixed_at,
                 bool continuous, unsigned sweeps, const std::string& group) {
    Scenario sc = load_scenario(scenario_path);
    SweepSpec sweep = load_sweep(sweep_path, sc.ris);
    AlgorithmSpec algo;
    algo.kind = algorithm_kind_from_string(algo_name);
    algo.grid = grid_path.empty() ? AngleGrid::default_grid() : load_grid(grid_path);
    algo.quantize_with_scenario_states = !continuous;
    algo.greedy_sweeps = sweeps;
    algo.greedy_group = group == "element" ? GreedyGroup::element : GreedyGroup::column;
    if (fixed_at >= 0) algo.fixed_at_point = static_cast<std::size_t>(fixed_at);

    ExperimentReport report = run_scenario(sc, algo, sweep, seed);
    write_report(report, out_dir);
    std::cout << "scenario '" << report.scenario_id << "': " << report.records.size()
              << " records -> " << out_dir << "\n";
    return 0;
}

int cmd_compare(const std::string& scenario_path, const std::string& grid_path,
                std::uint64_t seed, const std::string& out_dir, bool check,
                unsigned dft_oversampling) {
    Scenario sc = load_scenario(scenario_path);
    AngleGrid grid = grid_path.empty() ? AngleGrid::default_grid() : load_grid(grid_path);
    SweepSpec arc = default_nearfield_arc(sc.ris);
    AlgorithmComparison cmp = compare_algorithms(sc, grid, arc, seed, dft_oversampling);

    std::string csv = comparison_csv(cmp);
    std::cout << csv;
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        write_text(out_dir + "/comparison.csv", csv);
    }
    if (check) {
        const double dft = cmp.rows[0].average_gain_db;
        const double angle2d = cmp.rows[1].average_gain_db;
        const double two_step = cmp.rows[2].average_gain_db;
        bool ok = angle2d >= dft && std::abs(two_step - angle2d) <= 0.5;
        std::cout << "check: angle2d-vs-dft " << (angle2d >= dft ? "ok" : "FAILED")
                  << ", two-step gap " << std::abs(two_step - angle2d) << " dB\n";
        if (!ok) return 4;
    }
    return 0;
}

int cmd_serve(const std::string& scenario_path, const std::string& listen) {
    Scenario sc = load_scenario(scenario_path);
    auto [host, port] = split_endpoint(listen);
    FeedbackServer server(sc, host, port);
    std::cout << "serving scenario '" << sc.id << "' on " << host << ":" << server.port()
              << "\n";
    server.run();  // runs until the process is terminated
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RIS beamforming toolkit"};
    app.require_subcommand(1);

    std::string geom_path, scenario_path, sweep_path, grid_path, out_dir, remote, listen;
    std::string algo_name = "two-step", group = "column", trace_path, encoding = "phase";
    std::vector<double> angles;
    double step = 0.05;
    unsigned quantize_bits = 0, sweeps = 2, dft_oversampling = 1;
    int fixed_at = -1;
    bool continuous = false, check = false;
    std::uint64_t seed = 0;
    bool seed_given = false;

    auto add_seed = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "RNG seed (default: RISBEAM_SEED or 1)")
            ->each([&](const std::string&) { seed_given = true; });
    };

    CLI::App* pattern = app.add_subcommand("pattern", "radiation-pattern cuts and metrics");
    pattern->add_option("--geom", geom_path, "geometry JSON file")->required();
    pattern->add_option("--angles", angles, "commanded azimuths in degrees")
        ->required()
        ->delimiter(',');
    pattern->add_option("--out", out_dir, "output directory")->default_val("pattern_out");
    pattern->add_option("--step", step, "cut sampling step in degrees (<= 0.1)");
    pattern->add_option("--quantize-bits", quantize_bits, "quantize codewords to 2^k states");

    CLI::App* search = app.add_subcommand("search", "run one beam search");
    search->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    search->add_option("--algo", algo_name, "exhaustive|dft|two-step|greedy");
    search->add_option("--grid", grid_path, "angle-grid JSON file");
    search->add_option("--remote", remote, "query a remote oracle at host:port");
    search->add_option("--trace", trace_path, "write the query trace CSV here");
    search->add_option("--sweeps", sweeps, "greedy sweep count");
    search->add_option("--group", group, "greedy group: column|element");
    search->add_option("--encoding", encoding, "remote payload encoding: phase|1bit");
    search->add_flag("--continuous", continuous, "skip phase quantization at dispatch");
    add_seed(search);

    CLI::App* scenario = app.add_subcommand("scenario", "sweep replication run");
    scenario->add_option("--file", scenario_path, "scenario JSON file")->required();
    scenario->add_option("--sweep", sweep_path, "sweep JSON file")->required();
    scenario->add_option("--out", out_dir, "output directory")->required();
    scenario->add_option("--algo", algo_name, "uniform|exhaustive|dft|two-step|greedy");
    scenario->add_option("--grid", grid_path, "angle-grid JSON file");
    scenario->add_option("--fixed-at", fixed_at, "configure at this 0-based point, then hold");
    scenario->add_option("--sweeps", sweeps, "greedy sweep count");
    scenario->add_option("--group", group, "greedy group: column|element");
    scenario->add_flag("--continuous", continuous, "skip phase quantization at dispatch");
    add_seed(scenario);

    CLI::App* compare = app.add_subcommand("compare", "near-field algorithm comparison");
    compare->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    compare->add_option("--grid", grid_path, "angle-grid JSON file");
    compare->add_option("--out", out_dir, "output directory");
    compare->add_option("--dft-oversampling", dft_oversampling, "DFT oversampling factor");
    compare->add_flag("--check", check, "fail (exit 4) when the expected ordering breaks");
    add_seed(compare);

    CLI::App* serve = app.add_subcommand("serve", "feedback-protocol server");
    serve->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    serve->add_option("--listen", listen, "host:port to listen on")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (!seed_given) seed = default_seed();
        if (pattern->parsed())
            return cmd_pattern(geom_path, angles, out_dir, step, quantize_bits);
        if (search->parsed())
            return cmd_search(scenario_path, algo_name, grid_path, remote, seed, trace_path,
                              continuous, sweeps, group, encoding);
        if (scenario->parsed())
            return cmd_scenario(scenario_path, sweep_path, out_dir, algo_name, grid_path, seed,
                                fixed_at, continuous, sweeps, group);
        if (compare->parsed())
            return cmd_compare(scenario_path, grid_path, seed, out_dir, check, dft_oversampling);
        if (serve->parsed()) return cmd_serve(scenario_path, listen);
    } catch (const SearchAborted& e) {
        std::cerr << "error: " << e.what() << " (partial trace: " << e.partial.trace.size()
                  << " queries)\n";
        return 3;
    } catch (const OracleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
