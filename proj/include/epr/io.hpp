#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "epr/bell_stats.hpp"
#include "epr/scenario.hpp"

namespace epr {

using json = nlohmann::json;

// Scenario files are JSON objects. An optional "preset" names the starting
// point; every other key overrides it. Unknown keys are rejected so typos do
// not silently fall back to defaults. See README for the full key list.
ScenarioConfig scenario_from_json(const json& j, const std::string& source = "<json>");
ScenarioConfig load_scenario_file(const std::string& path);

// {"parameter": "mean_rate", "values": [...], "scenario": {...}}
SweepSpec sweep_from_json(const json& j, const std::string& source = "<json>");
SweepSpec load_sweep_file(const std::string& path);

/// Counts files come in two flavours, picked by content:
///  - CSV `config,raw,accidental_delayed,accidental_product` with rows x, y,
///    z, Z (the format `simulate --counts-csv` writes). accidental_delayed is
///    used when present, else accidental_product; both may be left empty.
///  - JSON object with keys x, y, z, Z, optional acc_x, acc_y, acc_z, acc_Z
///    (all four or none) and optional duration_s.
/// Errors carry the offending line and field.
RunCounts parse_counts(const std::string& text, const std::string& source = "<counts>");
RunCounts load_counts_file(const std::string& path);

/// Raw and corrected statistics for a counts file.
BellReport reanalyze_counts(const std::string& path);

json to_json(const Statistic& s);
json to_json(const BellStatistics& s);
json to_json(const BellReport& r);
json to_json(const RunCounts& c);
json to_json(const ScenarioResult& r);

/// CSV `config,raw,accidental_delayed,accidental_product`, one row per
/// configuration x, y, z, Z.
void write_counts_csv(std::ostream& out, const ScenarioResult& r);

/// One row per sweep point for plotting.
void write_sweep_csv(std::ostream& out, const SweepSpec& spec,
                     const std::vector<ScenarioResult>& results);

}  // namespace epr
