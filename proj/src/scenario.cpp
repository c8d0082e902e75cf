#include "epr/scenario.hpp"

#include <cmath>
#include <future>
#include <numbers>
#include <sstream>

#include "epr/error.hpp"
#include "epr/rng.hpp"
#include "epr/units.hpp"

namespace epr {

namespace {

constexpr double kPi = std::numbers::pi;

void accumulate(ConfigurationResult& into, const ConfigurationResult& r) {
  into.singles_a += r.singles_a;
  into.singles_b += r.singles_b;
  into.raw += r.raw;
  into.accidental_delayed += r.accidental_delayed;
  into.accidental_product += r.accidental_product;
  into.truth.true_pairs += r.truth.true_pairs;
  into.truth.accidental_pairs += r.truth.accidental_pairs;
  into.true_pairs_any_delta += r.true_pairs_any_delta;
  into.true_pairs_in_window += r.true_pairs_in_window;
  if (into.spectrum.counts.empty()) {
    into.spectrum = r.spectrum;
  } else {
    for (std::size_t k = 0; k < into.spectrum.counts.size(); ++k)
      into.spectrum.counts[k] += r.spectrum.counts[k];
    into.spectrum.total_pairs_considered += r.spectrum.total_pairs_considered;
  }
}

ConfigurationResult analyze(const ScenarioConfig& s, const Configuration& c,
                            const ConfigurationStreams& streams) {
  ConfigurationResult r;
  r.configuration = c;
  r.singles_a = static_cast<std::int64_t>(streams.a.size());
  r.singles_b = static_cast<std::int64_t>(streams.b.size());
  r.raw = count_coincidences(streams.a, streams.b, s.window);
  r.accidental_delayed = estimate_accidentals_delayed(streams.a, streams.b, s.window);
  if (s.emission.duration > 0.0)
    r.accidental_product = estimate_accidentals_product(
        static_cast<double>(r.singles_a), static_cast<double>(r.singles_b), s.window,
        s.emission.duration);
  r.truth = tally_truth(streams.a, streams.b, s.window);
  const auto census = true_pair_census(streams.a, streams.b, s.window);
  r.true_pairs_any_delta = census.any_delta;
  r.true_pairs_in_window = census.in_window;
  r.spectrum = build_spectrum(streams.a, streams.b, s.window, s.spectrum_lo, s.spectrum_hi);
  return r;
}

ConfigurationResult run_configuration(const ScenarioConfig& s, const Configuration& c,
                                      std::uint32_t index) {
  ConfigurationResult total;
  total.configuration = c;
  for (int rep = 0; rep < s.repeats; ++rep) {
    const auto streams = simulate_configuration(s, index, static_cast<std::uint32_t>(rep));
    accumulate(total, analyze(s, c, streams));
  }
  return total;
}

double accidental_of(const ConfigurationResult& r, AccidentalMethod m) {
  return m == AccidentalMethod::delayed ? static_cast<double>(r.accidental_delayed)
                                        : r.accidental_product;
}

}  // namespace

void ScenarioConfig::validate() const {
  emission.validate();
  detector_a.validate();
  detector_b.validate();
  window.validate();
  if (detector_a.model != detector_b.model)
    throw ConfigError("scenario: both detectors must use the same model");
  if (repeats < 1) throw ConfigError("scenario.repeats must be >= 1");
  if (!(spectrum_lo < spectrum_hi)) throw ConfigError("scenario: spectrum range is empty");
  if (spectrum_lo > window.window_lo || spectrum_hi < window.window_hi)
    throw ConfigError("scenario: spectrum range must contain the coincidence window");
  if (!(insertion_delay_a >= 0.0 && insertion_delay_b >= 0.0))
    throw ConfigError("scenario: insertion delays must be nonnegative");
}

std::optional<double> ConfigurationResult::window_inclusion() const {
  if (true_pairs_any_delta == 0) return std::nullopt;
  return static_cast<double>(true_pairs_in_window) / static_cast<double>(true_pairs_any_delta);
}

ScenarioConfig preset(const std::string& name) {
  ScenarioConfig s;
  s.preset = name;

  // Common timing: 1 ns jitter and 16 ns dead time as reported for the
  // atomic-cascade apparatus; a 5 ns cascade lifetime puts about 97% of the
  // true pairs inside the -3..+17 ns window; the accidental estimate uses a
  // 100 ns delay.
  s.emission.process = EmissionProcess::poisson;
  s.emission.mean_rate = 2e5;
  s.emission.cascade_lifetime_tau = 5.0;
  s.emission.duration = 1.0;
  for (auto* d : {&s.detector_a, &s.detector_b}) {
    d->model = DetectionModel::particle;
    d->eta0 = 0.3;
    d->jitter_sigma = 1.0;
    d->dead_time = 16.0;
  }
  s.window.window_lo = -3.0;
  s.window.window_hi = 17.0;
  s.window.accidental_offset = 100.0;
  s.window.bin_width = 1.0;

  if (name == "aspect-like") return s;

  if (name == "freedman-like") {
    // 8 ns window. Where it started is not recorded; -2 ns is a knob.
    s.window.window_lo = -2.0;
    s.window.window_hi = 6.0;
    return s;
  }

  if (name == "ideal") {
    s.emission.mean_rate = 1e4;
    s.emission.duration = 100.0;
    for (auto* d : {&s.detector_a, &s.detector_b}) {
      d->eta0 = 1.0;
      d->jitter_sigma = 0.0;
      d->dead_time = 0.0;
    }
    return s;
  }

  if (name == "wave") {
    // Simultaneous emission; A decays ten times faster than B.
    s.emission.mean_rate = 1e5;
    s.emission.cascade_lifetime_tau = 0.0;
    s.detector_a.wave_decay_tau = 0.5;
    s.detector_b.wave_decay_tau = 5.0;
    for (auto* d : {&s.detector_a, &s.detector_b}) {
      d->model = DetectionModel::wave;
      d->wave_gain = 1.0;
    }
    s.visibility_angles = {0.0, kPi / 8, kPi / 4, 3 * kPi / 8, kPi / 2};
    return s;
  }

  throw ConfigError("unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() { return {"aspect-like", "freedman-like", "ideal", "wave"}; }

std::vector<Configuration> scenario_configurations(const ScenarioConfig& s) {
  const double a = s.analyzer_a;
  const double da = s.insertion_delay_a;
  const double db = s.insertion_delay_b;
  std::vector<Configuration> out = {
      {"x", PolariserSetting::at(a, da), PolariserSetting::at(a + kPi / 8, db)},
      {"y", PolariserSetting::at(a, da), PolariserSetting::at(a + 3 * kPi / 8, db)},
      // z = R(a, infinity): A keeps its polariser at analyzer_a, B's is removed.
      {"z", PolariserSetting::at(a, da), PolariserSetting::absent(db)},
      {"Z", PolariserSetting::absent(da), PolariserSetting::absent(db)},
  };
  for (double phi : s.visibility_angles) {
    std::ostringstream name;
    name << "phi=" << phi;
    out.push_back({name.str(), PolariserSetting::at(a, da), PolariserSetting::at(a + phi, db)});
  }
  return out;
}

ConfigurationStreams simulate_configuration(const ScenarioConfig& s, std::uint32_t config_index,
                                            std::uint32_t repeat_index) {
  const auto configs = scenario_configurations(s);
  if (config_index >= configs.size()) throw ConfigError("configuration index out of range");
  const auto& c = configs[config_index];

  ConfigurationStreams out;
  out.emissions = generate_emissions(
      s.emission, derive_seed(s.seed, config_index, repeat_index, Stream::emissions),
      s.detector_a.model);
  const double duration_ns = seconds_to_ns(s.emission.duration);
  out.a = detect_stream(out.emissions, Side::A, c.a, s.detector_a, duration_ns,
                        derive_seed(s.seed, config_index, repeat_index, Stream::side_a),
                        derive_seed(s.seed, config_index, repeat_index, Stream::dark_a));
  out.b = detect_stream(out.emissions, Side::B, c.b, s.detector_b, duration_ns,
                        derive_seed(s.seed, config_index, repeat_index, Stream::side_b),
                        derive_seed(s.seed, config_index, repeat_index, Stream::dark_b));
  return out;
}

ScenarioResult run_scenario(const ScenarioConfig& s) {
  s.validate();
  ScenarioResult result;
  result.config = s;

  const auto configs = scenario_configurations(s);
  std::vector<std::future<ConfigurationResult>> jobs;
  jobs.reserve(configs.size());
  for (std::uint32_t i = 0; i < configs.size(); ++i)
    jobs.push_back(std::async(std::launch::async,
                              [&s, &configs, i] { return run_configuration(s, configs[i], i); }));

  // Ordered reduce by configuration index.
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    auto r = jobs[i].get();
    (i < 4 ? result.configurations : result.curve).push_back(std::move(r));
  }

  const auto& x = result.configurations[0];
  const auto& y = result.configurations[1];
  const auto& z = result.configurations[2];
  const auto& Z = result.configurations[3];

  result.counts.x = static_cast<double>(x.raw);
  result.counts.y = static_cast<double>(y.raw);
  result.counts.z = static_cast<double>(z.raw);
  result.counts.Z = static_cast<double>(Z.raw);
  result.counts.duration = s.emission.duration * s.repeats;
  result.counts.acc = Accidentals{accidental_of(x, s.subtraction), accidental_of(y, s.subtraction),
                                  accidental_of(z, s.subtraction), accidental_of(Z, s.subtraction)};

  std::vector<std::pair<double, double>> curve;
  for (std::size_t i = 0; i < result.curve.size(); ++i)
    curve.emplace_back(s.visibility_angles[i], static_cast<double>(result.curve[i].raw));

  result.no_data = s.emission.duration <= 0.0;
  result.report = make_bell_report(result.counts, curve);

  RunCounts truth;
  truth.x = static_cast<double>(x.truth.true_pairs);
  truth.y = static_cast<double>(y.truth.true_pairs);
  truth.z = static_cast<double>(z.truth.true_pairs);
  truth.Z = static_cast<double>(Z.truth.true_pairs);
  truth.duration = result.counts.duration;
  result.truth_statistics = compute_bell_statistics(truth, Variant::raw);
  return result;
}

std::string to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::window_width: return "window_width";
    case SweepParameter::mean_rate: return "mean_rate";
    case SweepParameter::accidental_offset: return "accidental_offset";
    case SweepParameter::min_gap: return "min_gap";
    case SweepParameter::wave_gain: return "wave_gain";
  }
  return "?";
}

SweepParameter sweep_parameter_from_string(const std::string& s) {
  for (auto p : {SweepParameter::window_width, SweepParameter::mean_rate,
                 SweepParameter::accidental_offset, SweepParameter::min_gap,
                 SweepParameter::wave_gain})
    if (to_string(p) == s) return p;
  throw ConfigError("unknown sweep parameter '" + s + "'");
}

ScenarioConfig apply_sweep_value(const ScenarioConfig& base, SweepParameter p, double value) {
  ScenarioConfig s = base;
  switch (p) {
    case SweepParameter::window_width:
      s.window.window_hi = s.window.window_lo + value;
      break;
    case SweepParameter::mean_rate:
      s.emission.mean_rate = value;
      break;
    case SweepParameter::accidental_offset:
      s.window.accidental_offset = value;
      break;
    case SweepParameter::min_gap:
      if (value < 0.0) throw ConfigError("min_gap must be nonnegative");
      s.emission.process = value > 0.0 ? EmissionProcess::min_separation : EmissionProcess::poisson;
      s.emission.min_gap = value;
      break;
    case SweepParameter::wave_gain:
      s.detector_a.wave_gain = value;
      s.detector_b.wave_gain = value;
      break;
  }
  return s;
}

std::vector<ScenarioResult> sweep(const SweepSpec& spec) {
  if (spec.values.empty()) throw ConfigError("sweep: no values given");
  std::vector<ScenarioResult> out;
  out.reserve(spec.values.size());
  for (std::size_t i = 0; i < spec.values.size(); ++i) {
    const double v = spec.values[i];
    try {
      auto s = apply_sweep_value(spec.fixed, spec.parameter, v);
      s.seed = spec.fixed.seed + i;
      s.validate();
      out.push_back(run_scenario(s));
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "sweep aborted at " << to_string(spec.parameter) << " = " << v << ": " << e.what();
      throw ConfigError(msg.str());
    }
  }
  return out;
}

}  // namespace epr
