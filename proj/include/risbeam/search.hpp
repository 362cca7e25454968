#ifndef RISBEAM_SEARCH_HPP
#define RISBEAM_SEARCH_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "risbeam/channel.hpp"
#include "risbeam/codebook.hpp"
#include "risbeam/geometry.hpp"

namespace risbeam {

struct TraceEntry {
    std::uint64_t query = 0;
    double power_dbm = 0.0;
    std::string label;
};

struct SearchResult {
    PhaseProfile best_profile;
    double best_power_dbm = no_signal_floor_dbm;
    std::uint64_t query_count = 0;
    std::vector<TraceEntry> trace;
    std::optional<std::pair<double, double>> selected_angles;  ///< (theta, phi) radians
};

/// Search aborted mid-run (oracle/transport failure); carries the partial
/// trace accumulated so far.
struct SearchAborted : std::runtime_error {
    SearchAborted(const std::string& what, SearchResult partial_result)
        : std::runtime_error(what), partial(std::move(partial_result)) {}
    SearchResult partial;
};

/// Query every codeword once, in order; ties break toward the earlier
/// index. Codewords are quantized through `states` at dispatch when the
/// set is discrete. Full-surface codebooks only.
SearchResult exhaustive_search(PowerOracle& oracle, const Codebook& codebook,
                               const RisGeometry& geom,
                               const PhaseStateSet& states = PhaseStateSet::continuous());

/// Two-step spatial-oversampling search: one initial query under the
/// all-state-0 profile, q zenith queries with uniform columns, then p
/// azimuth queries with the composed second-stage codewords. Later ties
/// overwrite earlier ones (>= comparison). Query count is exactly 1 + q + p.
SearchResult two_step_search(PowerOracle& oracle, const RisGeometry& geom,
                             const AngleGrid& grid,
                             const PhaseStateSet& states = PhaseStateSet::continuous());

enum class GreedyGroup { element, column };

/// Coordinate descent over element or column groups: starting from
/// all-state-0, every state of every group is tried in row-major order and
/// the best is kept; `sweeps` full passes. Requires a discrete state set.
/// Query count is exactly sweeps * groups * |states|.
SearchResult greedy_search(PowerOracle& oracle, const RisGeometry& geom,
                           const PhaseStateSet& states, unsigned sweeps,
                           GreedyGroup group = GreedyGroup::column);

/// Mean of `repeats` queries of the same profile, in the dB domain; the
/// oracle counter advances by `repeats`.
double averaged_query(PowerOracle& oracle, const PhaseProfile& profile, unsigned repeats);

/// Trace CSV: header `query,power_dbm,label`, power %.4f, LF endings.
std::string trace_to_csv(const SearchResult& result);

}  // namespace risbeam

#endif
