#ifndef RISBEAM_HARNESS_HPP
#define RISBEAM_HARNESS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "risbeam/channel.hpp"
#include "risbeam/codebook.hpp"
#include "risbeam/pattern.hpp"
#include "risbeam/search.hpp"

namespace risbeam {

inline constexpr const char* toolkit_version = "risbeam 1.0.0";

struct SweepPoint {
    std::string label;  ///< comma-free
    Vec3 position;
};

struct SweepSpec {
    std::vector<SweepPoint> points;
    bool aim_rx_at_ris = true;  ///< re-aim a directional RX at the panel center per point
};

/// Sweep JSON: kinds `points`, `line`, `grid`, `radial`; see the shipped
/// files under scenarios/ for the field layout.
SweepSpec parse_sweep(const std::string& json_text, const RisPlacement& ris);
SweepSpec load_sweep(const std::string& path, const RisPlacement& ris);

enum class AlgorithmKind { uniform, exhaustive_angle, exhaustive_dft, two_step, greedy };

std::string to_string(AlgorithmKind kind);
AlgorithmKind algorithm_kind_from_string(const std::string& s);

struct AlgorithmSpec {
    AlgorithmKind kind = AlgorithmKind::two_step;
    AngleGrid grid = AngleGrid::default_grid();
    unsigned dft_oversampling_z = 1;
    unsigned dft_oversampling_y = 1;
    unsigned greedy_sweeps = 2;
    GreedyGroup greedy_group = GreedyGroup::column;
    bool quantize_with_scenario_states = true;
    /// Configure once at this sweep-point index (0-based) and hold the
    /// profile for the whole sweep, as in the office experiment.
    std::optional<std::size_t> fixed_at_point;
};

struct ExperimentRecord {
    std::string label;
    Vec3 position;
    double power_on_dbm = 0.0;    ///< optimized (or held) profile
    double power_off_dbm = 0.0;   ///< uniform all-state-0 profile, RIS as static reflector
    double power_none_dbm = 0.0;  ///< RIS absent
    double gain_db = 0.0;         ///< on - off
};

struct ExperimentReport {
    std::string scenario_id;
    std::string algorithm;
    std::uint64_t seed = 0;
    std::string version = toolkit_version;
    std::vector<ExperimentRecord> records;
    std::vector<std::uint64_t> query_counts;  ///< per sweep point
};

/// Run the sweep: per point, configure through the chosen algorithm (the
/// search sees the scenario's noise), then record noiseless on/off/no-RIS
/// powers. Per-point oracles are seeded from `seed` and the point index.
ExperimentReport run_scenario(const Scenario& scenario, const AlgorithmSpec& algo,
                              const SweepSpec& sweep, std::uint64_t seed);

/// records.csv + report.json, deterministic bytes for a fixed input.
void write_report(const ExperimentReport& report, const std::string& out_dir);
std::string report_records_csv(const ExperimentReport& report);
std::string report_metadata_json(const ExperimentReport& report);

struct PatternCommandResult {
    double command_deg = 0.0;
    PatternMetrics metrics;       ///< from the element-factor-off cut
    double peak_gain_db = 0.0;    ///< 20*log10 peak |AF|, element factor on
    RadiationPattern pattern;     ///< element-factor-off cut (exported)
};

struct PatternRun {
    std::vector<PatternCommandResult> commands;
    double mean_sidelobe_level_db = 0.0;
    double scan_range_deg = 0.0;        ///< span of achieved peak angles
    double gain_fluctuation_db = 0.0;   ///< max - min of peak_gain_db
};

/// Azimuth-cut pattern study at zenith 90 for each commanded azimuth,
/// normal incidence. Commands are steered with continuous phases unless a
/// discrete set is given.
PatternRun run_pattern(const RisGeometry& geom, const std::vector<double>& commands_deg,
                       double step_deg = 0.05,
                       const PhaseStateSet& states = PhaseStateSet::continuous(),
                       double element_cos_exponent = default_element_cos_exponent);

/// cut_<angle>.csv per command + metrics.csv + summary.json.
void write_pattern_run(const PatternRun& run, const std::string& out_dir);

struct ComparisonRow {
    std::string algorithm;
    double average_gain_db = 0.0;
    std::uint64_t queries_per_point = 0;
};

struct AlgorithmComparison {
    std::vector<ComparisonRow> rows;  ///< dft, angle2d, two-step (fixed order)
};

/// The near-field algorithm study: DFT-exhaustive, angle2d-exhaustive and
/// two-step over an RX arc, reporting average gain over the uniform-profile
/// baseline and the per-point query count of each algorithm.
AlgorithmComparison compare_algorithms(const Scenario& scenario, const AngleGrid& grid,
                                       const SweepSpec& arc, std::uint64_t seed,
                                       unsigned dft_oversampling = 1);

std::string comparison_csv(const AlgorithmComparison& cmp);

/// Default RX arc for the near-field comparison: 2 m radius, 30..60 degrees
/// off the panel normal in 5-degree steps.
SweepSpec default_nearfield_arc(const RisPlacement& ris);

/// splitmix64 step, used to derive per-point seeds.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace risbeam

#endif
