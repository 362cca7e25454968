#include "risbeam/search.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace risbeam {

namespace {
constexpr double rad2deg = 180.0 / 3.14159265358979323846;

std::string angle_label(const char* prefix, double theta_rad, double phi_rad) {
    char buf[64];
    if (prefix && *prefix)
        std::snprintf(buf, sizeof(buf), "%s:%.2f", prefix, theta_rad * rad2deg);
    else
        std::snprintf(buf, sizeof(buf), "%.2f/%.2f", theta_rad * rad2deg, phi_rad * rad2deg);
    return buf;
}

PhaseProfile dispatch_profile(const PhaseProfile& p, const PhaseStateSet& states) {
    return states.is_discrete() ? quantize_profile(p, states) : p;
}

double guarded_query(PowerOracle& oracle, const PhaseProfile& p, SearchResult& partial) {
    try {
        return oracle.query(p);
    } catch (const std::exception& e) {
        partial.query_count = partial.trace.size();
        throw SearchAborted(std::string("oracle failure: ") + e.what(), partial);
    }
}
}  // namespace

SearchResult exhaustive_search(PowerOracle& oracle, const Codebook& codebook,
                               const RisGeometry& geom, const PhaseStateSet& states) {
    if (codebook.size() == 0)
        throw std::invalid_argument("exhaustive_search: empty codebook");
    if (!codebook.full_surface())
        throw std::invalid_argument("exhaustive_search: codebook must be full-surface");

    SearchResult result;
    std::size_t best_index = 0;
    for (std::size_t i = 0; i < codebook.size(); ++i) {
        PhaseProfile profile = dispatch_profile(codebook.profile(i, geom), states);
        double power = guarded_query(oracle, profile, result);
        result.trace.push_back({result.trace.size(), power, codebook.label_string(i)});
        if (i == 0 || power > result.best_power_dbm) {
            result.best_power_dbm = power;
            result.best_profile = std::move(profile);
            best_index = i;
        }
    }
    result.query_count = result.trace.size();
    if (codebook.kind != CodebookKind::dft)
        result.selected_angles = {{codebook.labels[best_index].a, codebook.labels[best_index].b}};
    return result;
}

SearchResult two_step_search(PowerOracle& oracle, const RisGeometry& geom,
                             const AngleGrid& grid, const PhaseStateSet& states) {
    grid.validate();
    geom.validate();

    SearchResult result;

    // Initial configuration R0: all elements in state 0 / phase 0.
    PhaseProfile r0 = states.is_discrete() ? PhaseProfile::uniform_state(geom, states, 0)
                                           : PhaseProfile::uniform(geom);
    double p_best = guarded_query(oracle, r0, result);
    result.trace.push_back({0, p_best, "R0"});
    PhaseProfile best_profile = r0;

    // Horizontal search: every column set to a_z(theta_i). The selected
    // zenith is the scan maximum (later ties overwrite earlier ones); the
    // initial feedback only competes for the returned configuration.
    std::size_t q_m = 0;
    double zenith_best = -std::numeric_limits<double>::infinity();
    const std::vector<cxd> ones_y(geom.cols_y, cxd(1.0, 0.0));
    for (std::size_t i = 0; i < grid.zeniths.size(); ++i) {
        SteeringVector columns = kronecker_compose(geom, ones_y, steering_vector_z(geom, grid.zeniths[i]));
        PhaseProfile profile = dispatch_profile(profile_from_vector(columns), states);
        double power = guarded_query(oracle, profile, result);
        result.trace.push_back(
            {result.trace.size(), power, angle_label("z", grid.zeniths[i], 0.0)});
        if (power >= zenith_best) {
            zenith_best = power;
            q_m = i;
        }
        if (power >= p_best) {
            p_best = power;
            best_profile = std::move(profile);
        }
    }
    const double theta_sel = grid.zeniths[q_m];

    // Vertical search: composed second-stage codewords at the selected zenith.
    const std::vector<cxd> a_z_sel = steering_vector_z(geom, theta_sel);
    std::size_t p_m = 0;
    double azimuth_best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < grid.azimuths.size(); ++j) {
        SteeringVector composed = kronecker_compose(
            geom, steering_vector_y(geom, theta_sel, grid.azimuths[j]), a_z_sel, theta_sel,
            grid.azimuths[j]);
        PhaseProfile profile = dispatch_profile(profile_from_vector(composed), states);
        double power = guarded_query(oracle, profile, result);
        result.trace.push_back(
            {result.trace.size(), power, angle_label(nullptr, theta_sel, grid.azimuths[j])});
        if (power >= azimuth_best) {
            azimuth_best = power;
            p_m = j;
        }
        if (power >= p_best) {
            p_best = power;
            best_profile = std::move(profile);
        }
    }

    result.best_power_dbm = p_best;
    result.best_profile = std::move(best_profile);
    result.query_count = result.trace.size();
    result.selected_angles = {{theta_sel, grid.azimuths[p_m]}};
    return result;
}

SearchResult greedy_search(PowerOracle& oracle, const RisGeometry& geom,
                           const PhaseStateSet& states, unsigned sweeps, GreedyGroup group) {
    geom.validate();
    if (!states.is_discrete())
        throw std::invalid_argument("greedy_search: discrete state set required");
    if (sweeps < 1) throw std::invalid_argument("greedy_search: sweeps must be >= 1");

    const std::size_t group_count =
        group == GreedyGroup::column ? geom.cols_y : geom.element_count();

    SearchResult result;
    PhaseProfile current = PhaseProfile::uniform_state(geom, states, 0);
    double accepted_power = no_signal_floor_dbm;

    auto set_group = [&](PhaseProfile& p, std::size_t g, std::size_t state_index) {
        const cxd value = states.states()[state_index].coefficient();
        if (group == GreedyGroup::column) {
            for (std::size_t m = 0; m < geom.rows_z; ++m) p.at(m, g) = value;
        } else {
            p.at(g / geom.cols_y, g % geom.cols_y) = value;  // row-major group order
        }
    };

    for (unsigned sweep = 0; sweep < sweeps; ++sweep) {
        for (std::size_t g = 0; g < group_count; ++g) {
            std::size_t best_state = 0;
            double best_power = 0.0;
            for (std::size_t s = 0; s < states.state_count(); ++s) {
                set_group(current, g, s);
                double power = guarded_query(oracle, current, result);
                char label[48];
                std::snprintf(label, sizeof(label), "%s%zu:s%zu",
                              group == GreedyGroup::column ? "c" : "e", g, s);
                result.trace.push_back({result.trace.size(), power, label});
                if (s == 0 || power > best_power) {
                    best_power = power;
                    best_state = s;
                }
            }
            set_group(current, g, best_state);
            accepted_power = best_power;
        }
    }

    result.best_profile = current;
    result.best_power_dbm = accepted_power;
    result.query_count = result.trace.size();
    // best_power_dbm must equal the trace maximum; with noise the last
    // accepted measurement may not be the global max, so take the max.
    for (const auto& t : result.trace)
        if (t.power_dbm > result.best_power_dbm) result.best_power_dbm = t.power_dbm;
    return result;
}

double averaged_query(PowerOracle& oracle, const PhaseProfile& profile, unsigned repeats) {
    if (repeats < 1) throw std::invalid_argument("averaged_query: repeats must be >= 1");
    double sum = 0.0;
    for (unsigned i = 0; i < repeats; ++i) sum += oracle.query(profile);
    return sum / repeats;
}

std::string trace_to_csv(const SearchResult& result) {
    std::ostringstream out;
    out << "query,power_dbm,label\n";
    char buf[32];
    for (const auto& t : result.trace) {
        std::snprintf(buf, sizeof(buf), "%.4f", t.power_dbm);
        out << t.query << ',' << buf << ',' << t.label << "\n";
    }
    return out.str();
}

}  // namespace risbeam
