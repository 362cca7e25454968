#ifndef RISBEAM_SCENARIO_IO_HPP
#define RISBEAM_SCENARIO_IO_HPP

#include <string>

#include "risbeam/channel.hpp"

namespace risbeam {

/// Raised on malformed scenario/sweep/grid files; the message names the
/// offending key.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parse a scenario JSON document. Keys mirror the Scenario fields
/// one-to-one (SI units; degrees only for antenna beamwidth); unknown keys
/// are rejected.
Scenario parse_scenario(const std::string& json_text);

/// Load and parse a scenario file.
Scenario load_scenario(const std::string& path);

/// Serialize a scenario back to JSON (deterministic key order).
std::string scenario_to_json(const Scenario& sc);

}  // namespace risbeam

#endif
