#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "epr/bell_stats.hpp"
#include "epr/coincidence.hpp"
#include "epr/detection.hpp"
#include "epr/source.hpp"

namespace epr {

enum class AccidentalMethod { delayed, product };

struct ScenarioConfig {
  std::string preset = "custom";
  EmissionConfig emission;
  DetectorConfig detector_a;
  DetectorConfig detector_b;
  WindowConfig window;
  double analyzer_a = 0.0;          // rad; B sits at analyzer_a + pi/8 and + 3pi/8
  double insertion_delay_a = 0.0;   // ns, applied while A's polariser is in
  double insertion_delay_b = 0.0;
  std::vector<double> visibility_angles;  // relative B - A angles, rad
  double spectrum_lo = -50.0;             // ns
  double spectrum_hi = 150.0;
  AccidentalMethod subtraction = AccidentalMethod::delayed;
  std::uint64_t seed = 1;
  int repeats = 1;

  void validate() const;
};

/// Named starting points. Every preset uses a particle or wave detector pair
/// and the four-configuration protocol; fields can be overridden afterwards.
///   ideal          noise-free particle model, for the analytic classical values
///   aspect-like    -3..+17 ns window, 100 ns offset, 16 ns dead time, 1 ns jitter
///   freedman-like  as aspect-like but an 8 ns window
///   wave           wave detectors, fast A decay, slow B decay
ScenarioConfig preset(const std::string& name);
std::vector<std::string> preset_names();

/// Polariser arrangement of one simulated run.
struct Configuration {
  std::string name;
  PolariserSetting a;
  PolariserSetting b;
};

/// The x, y, z, Z configurations followed by one configuration per
/// visibility angle, in seed-index order.
std::vector<Configuration> scenario_configurations(const ScenarioConfig& s);

struct ConfigurationResult {
  Configuration configuration;
  std::int64_t singles_a = 0;
  std::int64_t singles_b = 0;
  std::int64_t raw = 0;                 // one-use coincidence count
  std::int64_t accidental_delayed = 0;
  double accidental_product = 0.0;
  TruthTally truth;                     // simulation only, all pairs in window
  std::int64_t true_pairs_any_delta = 0;
  std::int64_t true_pairs_in_window = 0;
  CoincidenceSpectrum spectrum;

  /// Fraction of same-emission pairs inside the window; empty without pairs.
  std::optional<double> window_inclusion() const;
};

struct ScenarioResult {
  ScenarioConfig config;
  std::vector<ConfigurationResult> configurations;  // x, y, z, Z
  std::vector<ConfigurationResult> curve;           // one per visibility angle
  RunCounts counts;                                 // with the chosen accidentals
  BellReport report;
  BellStatistics truth_statistics;  // from true-pair tallies only
  bool no_data = false;
};

/// Simulates the four configurations (and the visibility curve) for equal
/// durations, counts, estimates accidentals both ways, and computes raw and
/// corrected statistics. Pure in its argument: the same config and seed
/// give the same result.
ScenarioResult run_scenario(const ScenarioConfig& s);

/// Counts one configuration's detector streams. Exposed for the CLI
/// `spectrum` command and for tests that want the raw streams.
struct ConfigurationStreams {
  std::vector<PairEmission> emissions;
  std::vector<DetectionEvent> a;
  std::vector<DetectionEvent> b;
};
ConfigurationStreams simulate_configuration(const ScenarioConfig& s, std::uint32_t config_index,
                                            std::uint32_t repeat_index);

enum class SweepParameter { window_width, mean_rate, accidental_offset, min_gap, wave_gain };

struct SweepSpec {
  SweepParameter parameter = SweepParameter::mean_rate;
  std::vector<double> values;
  ScenarioConfig fixed;
};

/// The base config with one parameter replaced. window_width keeps
/// window_lo; min_gap = 0 selects the Poisson process, > 0 the hard-core
/// one; wave_gain sets the gain of both detectors.
ScenarioConfig apply_sweep_value(const ScenarioConfig& base, SweepParameter p, double value);

/// One run_scenario per value, seeded base seed + index. A failing point
/// aborts the sweep with an error naming the value.
std::vector<ScenarioResult> sweep(const SweepSpec& spec);

std::string to_string(SweepParameter p);
SweepParameter sweep_parameter_from_string(const std::string& s);

}  // namespace epr
