#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace epr {

enum class EmissionProcess { poisson, min_separation };
enum class HiddenVariableMode { uniform, fixed };

/// How the detectors will read an emission. Particle emissions carry a
/// cascade delay for the B signal; wave emissions leave both signals
/// simultaneous and carry initial intensities instead.
enum class DetectionModel { particle, wave };

struct PairEmission {
  double t0 = 0.0;            // ns
  double lambda = 0.0;        // rad, [0, pi)
  double b_delay = 0.0;       // ns, particle model only
  double a_intensity0 = 1.0;  // wave model only
  double b_intensity0 = 1.0;
};

struct EmissionConfig {
  EmissionProcess process = EmissionProcess::poisson;
  double mean_rate = 1e5;             // emissions per second
  double min_gap = 0.0;               // ns, min_separation only
  double cascade_lifetime_tau = 5.0;  // ns
  double duration = 1.0;              // s
  HiddenVariableMode hidden_variable = HiddenVariableMode::uniform;
  double fixed_angle = 0.0;           // rad, used when hidden_variable == fixed

  /// Throws ConfigError when an invariant is broken.
  void validate() const;
};

/// Draws the emission stream of one run. A pure function of its arguments:
/// the same config, seed and model always give a bit-identical stream.
///
/// Poisson gaps are Exp(1/mean_rate). The hard-core process uses
/// min_gap + Exp(1/mean_rate - min_gap), which keeps the long-run rate at
/// mean_rate and never produces two emissions closer than min_gap.
std::vector<PairEmission> generate_emissions(const EmissionConfig& config, std::uint64_t seed,
                                             DetectionModel model = DetectionModel::particle);

/// CSV with header `t0_ns,lambda_rad,b_delay_ns`.
void write_emissions_csv(std::ostream& out, std::span<const PairEmission> emissions);

}  // namespace epr
