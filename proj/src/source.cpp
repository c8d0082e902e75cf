#include "epr/source.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

#include "epr/error.hpp"
#include "epr/units.hpp"

namespace epr {

void EmissionConfig::validate() const {
  if (!(mean_rate > 0.0) || !std::isfinite(mean_rate))
    throw ConfigError("emission.mean_rate must be positive");
  if (!(duration >= 0.0) || !std::isfinite(duration))
    throw ConfigError("emission.duration must be nonnegative");
  if (!(cascade_lifetime_tau >= 0.0))
    throw ConfigError("emission.cascade_lifetime_tau must be nonnegative");
  if (process == EmissionProcess::min_separation) {
    if (!(min_gap > 0.0)) throw ConfigError("emission.min_gap must be positive for min_separation");
    if (per_second_to_per_ns(mean_rate) * min_gap >= 1.0)
      throw ConfigError("emission: mean_rate * min_gap >= 1, no stationary hard-core process exists");
  }
}

std::vector<PairEmission> generate_emissions(const EmissionConfig& config, std::uint64_t seed,
                                             DetectionModel model) {
  config.validate();

  std::vector<PairEmission> out;
  const double end = seconds_to_ns(config.duration);
  if (end <= 0.0) return out;

  const double mean_gap = 1.0 / per_second_to_per_ns(config.mean_rate);
  const bool hard_core = config.process == EmissionProcess::min_separation;
  const double floor_gap = hard_core ? config.min_gap : 0.0;
  const double tail_mean = mean_gap - floor_gap;

  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> tail(1.0 / tail_mean);
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  std::exponential_distribution<double> cascade(
      config.cascade_lifetime_tau > 0.0 ? 1.0 / config.cascade_lifetime_tau : 1.0);

  out.reserve(static_cast<std::size_t>(end / mean_gap * 1.05) + 16);

  // The first emission sits one full gap after t = 0 so the stream is a
  // stationary renewal sequence from the start of the run.
  double t = 0.0;
  for (;;) {
    double gap = floor_gap + tail(rng);
    if (gap <= 0.0) gap = std::nextafter(0.0, 1.0);
    const double next = t + gap;
    if (next >= end) break;
    // Keep strict ordering even when a gap underflows relative to t.
    t = next > t ? next : std::nextafter(t, end);

    PairEmission e;
    e.t0 = t;
    e.lambda = config.hidden_variable == HiddenVariableMode::uniform
                   ? normalize_angle(angle(rng))
                   : normalize_angle(config.fixed_angle);
    if (model == DetectionModel::particle && config.cascade_lifetime_tau > 0.0)
      e.b_delay = cascade(rng);
    out.push_back(e);
  }
  return out;
}

void write_emissions_csv(std::ostream& out, std::span<const PairEmission> emissions) {
  out << "t0_ns,lambda_rad,b_delay_ns\n";
  out.precision(17);
  for (const auto& e : emissions) out << e.t0 << ',' << e.lambda << ',' << e.b_delay << '\n';
}

}  // namespace epr
