#include "epr/coincidence.hpp"

#include <cmath>
#include <ostream>
#include <unordered_map>

#include "epr/error.hpp"
#include "epr/units.hpp"

namespace epr {

namespace {

void require_sorted(std::span<const DetectionEvent> s, const char* what) {
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i].t < s[i - 1].t) throw InputError(std::string(what) + ": stream not time-sorted");
}

// Calls visit(i, j, delta) for every pair with delta in [lo, hi]. Both streams
// must be sorted. Linear in the stream sizes plus the number of pairs visited.
template <typename Visit>
void for_each_pair(std::span<const DetectionEvent> a, std::span<const DetectionEvent> b,
                   double delay, double lo, double hi, Visit&& visit) {
  std::size_t first = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ta = a[i].t;
    while (first < b.size() && b[first].t + delay - ta < lo) ++first;
    for (std::size_t j = first; j < b.size(); ++j) {
      const double delta = b[j].t + delay - ta;
      if (delta > hi) break;
      visit(i, j, delta);
    }
  }
}

std::int64_t greedy_count(std::span<const DetectionEvent> a, std::span<const DetectionEvent> b,
                          double delay, double lo, double hi) {
  // B clicks before `next` are either consumed or too early for every later
  // A click, so `next` is always the earliest usable B click.
  std::int64_t n = 0;
  std::size_t next = 0;
  for (const auto& ea : a) {
    while (next < b.size() && b[next].t + delay - ea.t < lo) ++next;
    if (next < b.size() && b[next].t + delay - ea.t <= hi) {
      ++n;
      ++next;
    }
  }
  return n;
}

}  // namespace

void WindowConfig::validate() const {
  if (!(window_lo < window_hi)) throw ConfigError("window: window_lo must be below window_hi");
  if (!(bin_width > 0.0)) throw ConfigError("window.bin_width must be positive");
  if (!(accidental_offset > width()))
    throw ConfigError("window.accidental_offset must exceed the window width");
}

std::int64_t count_coincidences(std::span<const DetectionEvent> a,
                                std::span<const DetectionEvent> b, const WindowConfig& w) {
  w.validate();
  require_sorted(a, "count_coincidences");
  require_sorted(b, "count_coincidences");
  return greedy_count(a, b, w.channel_delay, w.window_lo, w.window_hi);
}

std::int64_t count_all_pairs(std::span<const DetectionEvent> a, std::span<const DetectionEvent> b,
                             const WindowConfig& w) {
  w.validate();
  require_sorted(a, "count_all_pairs");
  require_sorted(b, "count_all_pairs");
  std::int64_t n = 0;
  for_each_pair(a, b, w.channel_delay, w.window_lo, w.window_hi,
                [&](std::size_t, std::size_t, double) { ++n; });
  return n;
}

CoincidenceSpectrum build_spectrum(std::span<const DetectionEvent> a,
                                   std::span<const DetectionEvent> b, const WindowConfig& w,
                                   double range_lo, double range_hi) {
  w.validate();
  if (!(range_lo < range_hi)) throw ConfigError("spectrum range: lo must be below hi");
  if (range_lo > w.window_lo || range_hi < w.window_hi)
    throw ConfigError("spectrum range must contain the coincidence window");
  const double nbins_real = (range_hi - range_lo) / w.bin_width;
  const auto nbins = static_cast<std::size_t>(std::llround(nbins_real));
  if (nbins == 0 || std::abs(nbins_real - static_cast<double>(nbins)) > 1e-9 * nbins_real)
    throw ConfigError("spectrum: bin_width must divide the range evenly");
  require_sorted(a, "build_spectrum");
  require_sorted(b, "build_spectrum");

  CoincidenceSpectrum s;
  s.counts.assign(nbins, 0);
  s.bin_edges.resize(nbins + 1);
  for (std::size_t k = 0; k <= nbins; ++k)
    s.bin_edges[k] = range_lo + static_cast<double>(k) * w.bin_width;

  for_each_pair(a, b, w.channel_delay, range_lo, range_hi,
                [&](std::size_t, std::size_t, double delta) {
                  auto k = static_cast<std::size_t>((delta - range_lo) / w.bin_width);
                  if (k >= nbins) k = nbins - 1;  // delta == range_hi
                  ++s.counts[k];
                  ++s.total_pairs_considered;
                });
  return s;
}

std::int64_t estimate_accidentals_delayed(std::span<const DetectionEvent> a,
                                          std::span<const DetectionEvent> b,
                                          const WindowConfig& w) {
  WindowConfig shifted = w;
  shifted.channel_delay += w.accidental_offset;
  return count_coincidences(a, b, shifted);
}

double estimate_accidentals_product(double n_a, double n_b, const WindowConfig& w,
                                    double duration_s) {
  if (!(duration_s > 0.0)) throw InputError("estimate_accidentals_product: duration must be positive");
  if (n_a < 0.0 || n_b < 0.0) throw InputError("estimate_accidentals_product: negative singles");
  return n_a * n_b * w.width() / seconds_to_ns(duration_s);
}

TruthTally tally_truth(std::span<const DetectionEvent> a, std::span<const DetectionEvent> b,
                       const WindowConfig& w) {
  w.validate();
  require_sorted(a, "tally_truth");
  require_sorted(b, "tally_truth");
  TruthTally tally;
  for_each_pair(a, b, w.channel_delay, w.window_lo, w.window_hi,
                [&](std::size_t i, std::size_t j, double) {
                  if (a[i].source >= 0 && a[i].source == b[j].source)
                    ++tally.true_pairs;
                  else
                    ++tally.accidental_pairs;
                });
  return tally;
}

TruePairCensus true_pair_census(std::span<const DetectionEvent> a,
                                std::span<const DetectionEvent> b, const WindowConfig& w) {
  std::unordered_map<std::int64_t, std::vector<double>> a_times;
  for (const auto& e : a)
    if (e.source >= 0) a_times[e.source].push_back(e.t);

  TruePairCensus census;
  for (const auto& eb : b) {
    if (eb.source < 0) continue;
    auto it = a_times.find(eb.source);
    if (it == a_times.end()) continue;
    for (double ta : it->second) {
      const double delta = eb.t + w.channel_delay - ta;
      ++census.any_delta;
      if (delta >= w.window_lo && delta <= w.window_hi) ++census.in_window;
    }
  }
  return census;
}

std::optional<double> window_inclusion(std::span<const DetectionEvent> a,
                                       std::span<const DetectionEvent> b, const WindowConfig& w) {
  const auto census = true_pair_census(a, b, w);
  if (census.any_delta == 0) return std::nullopt;
  return static_cast<double>(census.in_window) / static_cast<double>(census.any_delta);
}

std::optional<double> fit_tail_lifetime(const CoincidenceSpectrum& spectrum, double fit_lo,
                                        double fit_hi, double background_per_bin) {
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  int used = 0;
  for (std::size_t k = 0; k < spectrum.counts.size(); ++k) {
    const double lo = spectrum.bin_edges[k], hi = spectrum.bin_edges[k + 1];
    if (lo < fit_lo || hi > fit_hi) continue;
    const double c = static_cast<double>(spectrum.counts[k]);
    const double signal = c - background_per_bin;
    if (signal <= 0.0) continue;
    // var(ln signal) ~ c / signal^2
    const double weight = signal * signal / c;
    const double x = 0.5 * (lo + hi);
    const double y = std::log(signal);
    sw += weight;
    sx += weight * x;
    sy += weight * y;
    sxx += weight * x * x;
    sxy += weight * x * y;
    ++used;
  }
  if (used < 2) return std::nullopt;
  const double denom = sw * sxx - sx * sx;
  if (denom <= 0.0) return std::nullopt;
  const double slope = (sw * sxy - sx * sy) / denom;
  if (!(slope < 0.0)) return std::nullopt;
  return -1.0 / slope;
}

std::optional<double> mean_bin_count(const CoincidenceSpectrum& spectrum, double lo, double hi) {
  double sum = 0;
  int n = 0;
  for (std::size_t k = 0; k < spectrum.counts.size(); ++k) {
    if (spectrum.bin_edges[k] < lo || spectrum.bin_edges[k + 1] > hi) continue;
    sum += static_cast<double>(spectrum.counts[k]);
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

void write_spectrum_csv(std::ostream& out, const CoincidenceSpectrum& spectrum) {
  out << "bin_start_ns,count\n";
  out.precision(12);
  for (std::size_t k = 0; k < spectrum.counts.size(); ++k)
    out << spectrum.bin_edges[k] << ',' << spectrum.counts[k] << '\n';
}

}  // namespace epr
