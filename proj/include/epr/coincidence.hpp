#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "epr/detection.hpp"

namespace epr {

/// A coincidence is an (A, B) click pair whose time difference
/// delta = tB + channel_delay - tA lies in [window_lo, window_hi].
struct WindowConfig {
  double channel_delay = 0.0;       // ns, added to every B time
  double window_lo = -3.0;          // ns
  double window_hi = 17.0;          // ns
  double bin_width = 1.0;           // ns, spectra only
  double accidental_offset = 100.0; // ns, extra B delay for the delayed-channel estimate

  double width() const { return window_hi - window_lo; }
  void validate() const;
};

struct CoincidenceSpectrum {
  std::vector<double> bin_edges;  // size = counts.size() + 1
  std::vector<std::int64_t> counts;
  std::int64_t total_pairs_considered = 0;  // every pairing with delta inside the range
};

/// Simulation-only split of the all-pairs in-window count by parentage.
struct TruthTally {
  std::int64_t true_pairs = 0;        // A and B clicks from the same emission
  std::int64_t accidental_pairs = 0;  // different emissions or noise
  std::int64_t total() const { return true_pairs + accidental_pairs; }
};

/// Coincidence-circuit count: A clicks are taken in time order and each
/// consumes the earliest unused B click in its window (two-pointer sweep).
std::int64_t count_coincidences(std::span<const DetectionEvent> a,
                                std::span<const DetectionEvent> b, const WindowConfig& w);

/// Every (A, B) pairing in the window, without consumption.
std::int64_t count_all_pairs(std::span<const DetectionEvent> a, std::span<const DetectionEvent> b,
                             const WindowConfig& w);

/// Histogram of delta over [range_lo, range_hi] for all pairings. bin_width
/// must divide the range and the range must contain the window.
CoincidenceSpectrum build_spectrum(std::span<const DetectionEvent> a,
                                   std::span<const DetectionEvent> b, const WindowConfig& w,
                                   double range_lo, double range_hi);

/// count_coincidences with the B stream delayed by an extra accidental_offset.
std::int64_t estimate_accidentals_delayed(std::span<const DetectionEvent> a,
                                          std::span<const DetectionEvent> b,
                                          const WindowConfig& w);

/// Expected chance coincidences of two independent streams:
/// nA * nB * window width / duration.
double estimate_accidentals_product(double n_a, double n_b, const WindowConfig& w,
                                    double duration_s);

TruthTally tally_truth(std::span<const DetectionEvent> a, std::span<const DetectionEvent> b,
                       const WindowConfig& w);

struct TruePairCensus {
  std::int64_t any_delta = 0;  // same-emission (A, B) pairs at any time difference
  std::int64_t in_window = 0;  // of which inside the window
};

/// Simulation-only census of same-emission pairs.
TruePairCensus true_pair_census(std::span<const DetectionEvent> a,
                                std::span<const DetectionEvent> b, const WindowConfig& w);

/// Fraction of same-emission pairs (at any delta) that fall inside the
/// window. Empty when no such pair exists.
std::optional<double> window_inclusion(std::span<const DetectionEvent> a,
                                       std::span<const DetectionEvent> b, const WindowConfig& w);

/// Decay constant of the spectrum's falling edge: weighted least squares of
/// ln(count - background) against bin centre over bins inside [fit_lo, fit_hi).
/// Bins at or below the background are skipped. Empty when fewer than two
/// bins remain or the slope is not negative.
std::optional<double> fit_tail_lifetime(const CoincidenceSpectrum& spectrum, double fit_lo,
                                        double fit_hi, double background_per_bin = 0.0);

/// Mean count per bin over bins inside [lo, hi), e.g. a flat region before
/// the peak. Empty when no bin qualifies.
std::optional<double> mean_bin_count(const CoincidenceSpectrum& spectrum, double lo, double hi);

/// CSV with header `bin_start_ns,count`.
void write_spectrum_csv(std::ostream& out, const CoincidenceSpectrum& spectrum);

}  // namespace epr
