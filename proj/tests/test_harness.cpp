#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "risbeam/harness.hpp"
#include "risbeam/scenario_io.hpp"

using namespace risbeam;

namespace {
const std::string scenario_dir = RISBEAM_SCENARIO_DIR;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name) {
        path = std::filesystem::temp_directory_path() / name;
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};
}  // namespace

TEST_CASE("corridor sweep has exactly 21 records at 1 m steps") {
    Scenario sc = load_scenario(scenario_dir + "/corridor.json");
    SweepSpec sweep = load_sweep(scenario_dir + "/corridor_sweep.json", sc.ris);
    REQUIRE(sweep.points.size() == 21);
    for (std::size_t i = 1; i < sweep.points.size(); ++i) {
        double step = (sweep.points[i].position - sweep.points[i - 1].position).norm();
        CHECK(step == doctest::Approx(1.0).epsilon(1e-6));
    }
    CHECK(sweep.points.front().label == "0");
    CHECK(sweep.points.back().label == "20");
}

TEST_CASE("office sweep is the 4x7 grid") {
    Scenario sc = load_scenario(scenario_dir + "/office.json");
    SweepSpec sweep = load_sweep(scenario_dir + "/office_sweep.json", sc.ris);
    REQUIRE(sweep.points.size() == 28);
    CHECK(sweep.points.front().label == "1");
    CHECK(sweep.points.back().label == "28");
    // 1.2 m squares.
    double dx = (sweep.points[1].position - sweep.points[0].position).norm();
    CHECK(dx == doctest::Approx(1.2));
}

TEST_CASE("outdoor sweep is 9 distances x 3 angles") {
    Scenario sc = load_scenario(scenario_dir + "/outdoor.json");
    SweepSpec sweep = load_sweep(scenario_dir + "/outdoor_sweep.json", sc.ris);
    REQUIRE(sweep.points.size() == 27);
}

TEST_CASE("run_scenario produces complete, ordered reports") {
    Scenario sc = load_scenario(scenario_dir + "/corridor.json");
    SweepSpec sweep = load_sweep(scenario_dir + "/corridor_sweep.json", sc.ris);
    AlgorithmSpec algo;
    algo.kind = AlgorithmKind::two_step;
    algo.grid = AngleGrid::regular_deg(80, 100, 5, -80, 0, 5);

    ExperimentReport report = run_scenario(sc, algo, sweep, 3);
    REQUIRE(report.records.size() == 21);
    CHECK(report.query_counts.size() == 21);
    for (auto q : report.query_counts) CHECK(q == 1 + 5 + 17);
    for (const auto& r : report.records)
        CHECK(r.gain_db == doctest::Approx(r.power_on_dbm - r.power_off_dbm));
}

TEST_CASE("blocked-path ordering: optimized > uniform > no-RIS on the corridor") {
    Scenario sc = load_scenario(scenario_dir + "/corridor.json");
    SweepSpec sweep = load_sweep(scenario_dir + "/corridor_sweep.json", sc.ris);
    AlgorithmSpec algo;
    algo.kind = AlgorithmKind::two_step;

    ExperimentReport report = run_scenario(sc, algo, sweep, 1);
    for (std::size_t i = 1; i < report.records.size(); ++i) {  // skip the 0 m point
        const auto& r = report.records[i];
        CAPTURE(r.label);
        CHECK(r.power_on_dbm > r.power_off_dbm);
        CHECK(r.power_off_dbm > r.power_none_dbm);
    }
}

TEST_CASE("fixed-profile office run holds one configuration") {
    Scenario sc = load_scenario(scenario_dir + "/office.json");
    SweepSpec sweep = load_sweep(scenario_dir + "/office_sweep.json", sc.ris);
    AlgorithmSpec algo;
    algo.kind = AlgorithmKind::two_step;
    algo.fixed_at_point = 3;  // paper's point 4, 0-based

    ExperimentReport report = run_scenario(sc, algo, sweep, 17);
    REQUIRE(report.records.size() == 28);
    CHECK(report.query_counts.size() == 1);  // configured once
    // The target point must benefit from the held beam.
    const auto& target = report.records[3];
    CHECK(target.power_on_dbm > target.power_off_dbm);
}

TEST_CASE("report files are deterministic for a fixed seed") {
    Scenario sc = load_scenario(scenario_dir + "/corridor.json");
    SweepSpec sweep = load_sweep(scenario_dir + "/corridor_sweep.json", sc.ris);
    AlgorithmSpec algo;
    algo.kind = AlgorithmKind::greedy;
    algo.greedy_sweeps = 1;

    TempDir dir_a("risbeam_report_a"), dir_b("risbeam_report_b");
    write_report(run_scenario(sc, algo, sweep, 11), dir_a.path.string());
    write_report(run_scenario(sc, algo, sweep, 11), dir_b.path.string());
    CHECK(slurp(dir_a.path / "records.csv") == slurp(dir_b.path / "records.csv"));
    CHECK(slurp(dir_a.path / "report.json") == slurp(dir_b.path / "report.json"));

    std::string csv = slurp(dir_a.path / "records.csv");
    CHECK(csv.rfind("point,label,x_m,y_m,z_m,power_on_dbm,power_off_dbm,power_none_dbm,gain_db",
                    0) == 0);
}

TEST_CASE("pattern run: one CSV and one metrics row per command") {
    auto geom = RisGeometry::half_wavelength(8, 16, speed_of_light / 5.8e9);
    PatternRun run = run_pattern(geom, {0.0, 10.0, 20.0}, 0.05);
    REQUIRE(run.commands.size() == 3);
    for (const auto& c : run.commands) {
        CHECK(std::abs(c.metrics.peak_angle_deg - c.command_deg) <= 0.5);
        CHECK(c.metrics.beamwidth_3db_deg > 0.0);
        CHECK(c.metrics.sidelobe_level_db <= 0.0);
    }

    TempDir dir("risbeam_pattern");
    write_pattern_run(run, dir.path.string());
    CHECK(std::filesystem::exists(dir.path / "cut_0.csv"));
    CHECK(std::filesystem::exists(dir.path / "cut_10.csv"));
    CHECK(std::filesystem::exists(dir.path / "cut_20.csv"));
    std::string metrics = slurp(dir.path / "metrics.csv");
    CHECK(std::count(metrics.begin(), metrics.end(), '\n') == 4);  // header + 3 rows
    CHECK(std::filesystem::exists(dir.path / "summary.json"));
    std::string summary = slurp(dir.path / "summary.json");
    CHECK(summary.find("mean_sidelobe_level_db") != std::string::npos);
}

TEST_CASE("metrics row for a 0-degree command reports a 0-degree peak") {
    auto geom = RisGeometry::half_wavelength(4, 12, speed_of_light / 5.8e9);
    PatternRun run = run_pattern(geom, {0.0}, 0.05);
    CHECK(std::abs(run.commands[0].metrics.peak_angle_deg) <= 0.2);
}

TEST_CASE("algorithm comparison has three rows and sane accounting") {
    Scenario sc = load_scenario(scenario_dir + "/nearfield26.json");
    // A compact grid keeps this unit test quick; the acceptance suite runs
    // the full default grid.
    AngleGrid grid = AngleGrid::regular_deg(70, 110, 4, -70, 70, 4);
    SweepSpec arc = default_nearfield_arc(sc.ris);
    REQUIRE(arc.points.size() == 7);

    AlgorithmComparison cmp = compare_algorithms(sc, grid, arc, 5);
    REQUIRE(cmp.rows.size() == 3);
    CHECK(cmp.rows[0].algorithm == "dft");
    CHECK(cmp.rows[1].algorithm == "exhaustive");
    CHECK(cmp.rows[2].algorithm == "two-step");

    const std::size_t q = grid.zeniths.size(), p = grid.azimuths.size();
    CHECK(cmp.rows[1].queries_per_point == p * q);
    CHECK(cmp.rows[2].queries_per_point == 1 + p + q);
    CHECK(cmp.rows[2].queries_per_point < cmp.rows[1].queries_per_point);

    std::string csv = comparison_csv(cmp);
    CHECK(csv.rfind("algorithm,average_gain_db,queries_per_point", 0) == 0);
}

TEST_CASE("config errors carry the offending key") {
    Scenario sc = load_scenario(scenario_dir + "/corridor.json");
    CHECK_THROWS_AS(parse_sweep("{\"kind\":\"bogus\"}", sc.ris), ConfigError);
    CHECK_THROWS_AS(parse_sweep("{}", sc.ris), ConfigError);
    AlgorithmSpec algo;
    algo.fixed_at_point = 999;
    SweepSpec sweep = load_sweep(scenario_dir + "/corridor_sweep.json", sc.ris);
    CHECK_THROWS_AS(run_scenario(sc, algo, sweep, 1), ConfigError);
}

TEST_CASE("derived seeds differ per point and are stable") {
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) == derive_seed(1, 0));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}
