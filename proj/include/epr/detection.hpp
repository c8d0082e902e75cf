#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "epr/rng.hpp"
#include "epr/source.hpp"

namespace epr {

enum class Side { A, B };

/// A polariser in front of one detector, or none (the "infinity" setting).
struct PolariserSetting {
  bool present = false;
  double angle = 0.0;            // rad, normalized to [0, pi)
  double insertion_delay = 0.0;  // ns, extra path delay while present

  static PolariserSetting absent(double insertion_delay = 0.0) {
    return {false, 0.0, insertion_delay};
  }
  static PolariserSetting at(double angle, double insertion_delay = 0.0);
};

enum class EfficiencyFunction { constant, cosine_modulated };

struct DetectorConfig {
  DetectionModel model = DetectionModel::particle;
  double eta0 = 1.0;
  EfficiencyFunction efficiency_fn = EfficiencyFunction::constant;
  double modulation_depth = 0.0;   // cosine_modulated only
  double enhancement_factor = 1.0; // applied while a polariser is present
  double jitter_sigma = 1.0;       // ns
  double dead_time = 16.0;         // ns
  double wave_decay_tau = 5.0;     // ns
  double wave_gain = 1.0;          // hazard per unit intensity per ns
  bool allow_multiple_detections = false;
  double dark_rate = 0.0;          // independent noise clicks per second

  void validate() const;
};

/// One detector click. `source` is the index of the parent emission in its
/// stream, or -1 for a noise click. It is a simulation-only label: counting
/// code never looks at it, only the truth tally does.
struct DetectionEvent {
  double t = 0.0;  // ns
  Side side = Side::A;
  std::int64_t source = -1;
};

/// Malus-law transmission: always passes with no polariser, otherwise passes
/// iff u < cos^2(lambda - a).
bool transmit_particle(double lambda, const PolariserSetting& setting, double u);

/// Detection probability of a transmitted particle. With no polariser there
/// is no analyzer axis, so the cosine modulation is inactive.
double detection_efficiency(double lambda, const PolariserSetting& setting,
                            const DetectorConfig& config);

std::optional<DetectionEvent> detect_particle(const PairEmission& emission, Side side,
                                              const PolariserSetting& setting,
                                              const DetectorConfig& config, Rng& rng,
                                              std::int64_t source = -1);

/// Wave model: intensity I0 * exp(-t/tau) (I0 scaled by cos^2 behind a
/// polariser) drives a detection hazard wave_gain * I(t). The first click is
/// drawn by inverting the cumulative hazard; with allow_multiple_detections
/// further clicks are drawn from the hazard remaining after each dead time.
/// eta0 and the efficiency function do not enter this model.
std::vector<DetectionEvent> detect_wave(const PairEmission& emission, Side side,
                                        const PolariserSetting& setting,
                                        const DetectorConfig& config, Rng& rng,
                                        std::int64_t source = -1);

/// Greedy dead-time filter over one side's clicks: a click is kept iff it
/// comes at least dead_time after the last kept click. Throws InputError on
/// unsorted input.
std::vector<DetectionEvent> apply_dead_time(std::span<const DetectionEvent> events,
                                            double dead_time);

/// Runs one detector over a whole emission stream: per-emission detection,
/// independent dark counts over [0, duration_ns), time sort, dead time.
std::vector<DetectionEvent> detect_stream(std::span<const PairEmission> emissions, Side side,
                                          const PolariserSetting& setting,
                                          const DetectorConfig& config, double duration_ns,
                                          std::uint64_t detector_seed, std::uint64_t dark_seed);

/// CSV with header `t_ns,side`.
void write_detections_csv(std::ostream& out, std::span<const DetectionEvent> events);

}  // namespace epr
