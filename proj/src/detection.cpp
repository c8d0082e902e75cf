#include "epr/detection.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "epr/error.hpp"
#include "epr/units.hpp"

namespace epr {

namespace {

double cos2(double x) {
  const double c = std::cos(x);
  return c * c;
}

double side_intensity(const PairEmission& e, Side side) {
  return side == Side::A ? e.a_intensity0 : e.b_intensity0;
}

double path_delay(const PolariserSetting& s) { return s.present ? s.insertion_delay : 0.0; }

}  // namespace

PolariserSetting PolariserSetting::at(double angle, double insertion_delay) {
  return {true, normalize_angle(angle), insertion_delay};
}

void DetectorConfig::validate() const {
  if (!(eta0 >= 0.0 && eta0 <= 1.0)) throw ConfigError("detector.eta0 must lie in [0, 1]");
  if (!(enhancement_factor >= 1.0)) throw ConfigError("detector.enhancement_factor must be >= 1");
  if (eta0 * enhancement_factor > 1.0 + 1e-12)
    throw ConfigError("detector: eta0 * enhancement_factor exceeds 1");
  if (efficiency_fn == EfficiencyFunction::cosine_modulated &&
      !(modulation_depth >= 0.0 && modulation_depth <= 1.0))
    throw ConfigError("detector.modulation_depth must lie in [0, 1]");
  if (!(jitter_sigma >= 0.0)) throw ConfigError("detector.jitter_sigma must be nonnegative");
  if (!(dead_time >= 0.0)) throw ConfigError("detector.dead_time must be nonnegative");
  if (!(dark_rate >= 0.0)) throw ConfigError("detector.dark_rate must be nonnegative");
  if (model == DetectionModel::wave) {
    if (!(wave_decay_tau > 0.0)) throw ConfigError("detector.wave_decay_tau must be positive");
    if (!(wave_gain >= 0.0)) throw ConfigError("detector.wave_gain must be nonnegative");
  }
}

bool transmit_particle(double lambda, const PolariserSetting& setting, double u) {
  if (!setting.present) return true;
  double p = cos2(lambda - setting.angle);
  // cos(pi/2) is ~6e-17 in doubles, not 0.
  if (p < 1e-15) p = 0.0;
  return u < p;
}

double detection_efficiency(double lambda, const PolariserSetting& setting,
                            const DetectorConfig& config) {
  double eta = config.eta0;
  if (setting.present) {
    if (config.efficiency_fn == EfficiencyFunction::cosine_modulated) {
      const double s = std::sin(lambda - setting.angle);
      eta *= 1.0 - config.modulation_depth * s * s;
    }
    eta *= config.enhancement_factor;
  }
  return eta;
}

std::optional<DetectionEvent> detect_particle(const PairEmission& emission, Side side,
                                              const PolariserSetting& setting,
                                              const DetectorConfig& config, Rng& rng,
                                              std::int64_t source) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  // Both draws are always consumed so the substream stays aligned across
  // settings; that keeps paired comparisons between configurations tight.
  const double u_transmit = uniform(rng);
  const double u_detect = uniform(rng);
  const double jitter =
      config.jitter_sigma > 0.0 ? std::normal_distribution<double>(0.0, config.jitter_sigma)(rng)
                                : 0.0;

  if (!transmit_particle(emission.lambda, setting, u_transmit)) return std::nullopt;
  if (!(u_detect < detection_efficiency(emission.lambda, setting, config))) return std::nullopt;

  double t = emission.t0 + path_delay(setting) + jitter;
  if (side == Side::B) t += emission.b_delay;
  return DetectionEvent{t, side, source};
}

std::vector<DetectionEvent> detect_wave(const PairEmission& emission, Side side,
                                        const PolariserSetting& setting,
                                        const DetectorConfig& config, Rng& rng,
                                        std::int64_t source) {
  std::vector<DetectionEvent> clicks;
  double intensity = side_intensity(emission, side);
  if (setting.present) intensity *= cos2(emission.lambda - setting.angle);

  const double tau = config.wave_decay_tau;
  // Hazard still available from local time `from` onward: k I0 tau e^{-from/tau}.
  const double total = config.wave_gain * intensity * tau;
  if (!(total > 0.0)) return clicks;

  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> jitter(0.0, config.jitter_sigma > 0.0 ? config.jitter_sigma : 1.0);

  double from = 0.0;
  double remaining = total;
  while (remaining > 0.0) {
    const double eps = -std::log1p(-uniform(rng));
    if (eps >= remaining) break;
    const double s = from - tau * std::log1p(-eps / remaining);
    const double noise = config.jitter_sigma > 0.0 ? jitter(rng) : 0.0;
    clicks.push_back({emission.t0 + path_delay(setting) + s + noise, side, source});
    if (!config.allow_multiple_detections) break;
    from = s + config.dead_time;
    remaining = total * std::exp(-from / tau);
  }
  return clicks;
}

std::vector<DetectionEvent> apply_dead_time(std::span<const DetectionEvent> events,
                                            double dead_time) {
  if (!(dead_time >= 0.0)) throw InputError("dead_time must be nonnegative");
  for (std::size_t i = 1; i < events.size(); ++i)
    if (events[i].t < events[i - 1].t) throw InputError("apply_dead_time: clicks not time-sorted");

  std::vector<DetectionEvent> kept;
  kept.reserve(events.size());
  for (const auto& e : events) {
    if (kept.empty() || e.t - kept.back().t >= dead_time) kept.push_back(e);
  }
  return kept;
}

std::vector<DetectionEvent> detect_stream(std::span<const PairEmission> emissions, Side side,
                                          const PolariserSetting& setting,
                                          const DetectorConfig& config, double duration_ns,
                                          std::uint64_t detector_seed, std::uint64_t dark_seed) {
  config.validate();
  Rng rng(detector_seed);
  std::vector<DetectionEvent> clicks;
  clicks.reserve(emissions.size());

  for (std::size_t i = 0; i < emissions.size(); ++i) {
    const auto source = static_cast<std::int64_t>(i);
    if (config.model == DetectionModel::particle) {
      if (auto click = detect_particle(emissions[i], side, setting, config, rng, source))
        clicks.push_back(*click);
    } else {
      for (const auto& click : detect_wave(emissions[i], side, setting, config, rng, source))
        clicks.push_back(click);
    }
  }

  if (config.dark_rate > 0.0 && duration_ns > 0.0) {
    Rng dark(dark_seed);
    std::exponential_distribution<double> gap(per_second_to_per_ns(config.dark_rate));
    for (double t = gap(dark); t < duration_ns; t += gap(dark)) clicks.push_back({t, side, -1});
  }

  std::stable_sort(clicks.begin(), clicks.end(),
                   [](const DetectionEvent& a, const DetectionEvent& b) { return a.t < b.t; });
  return apply_dead_time(clicks, config.dead_time);
}

void write_detections_csv(std::ostream& out, std::span<const DetectionEvent> events) {
  out << "t_ns,side\n";
  out.precision(17);
  for (const auto& e : events) out << e.t << ',' << (e.side == Side::A ? 'A' : 'B') << '\n';
}

}  // namespace epr
