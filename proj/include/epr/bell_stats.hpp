#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace epr {

// Upper limits for rotationally invariant, factorisable experiments.
inline constexpr double kLimitStandard = 2.0;
inline constexpr double kLimitVisibility = 1.71;
inline constexpr double kLimitChsh = 0.0;
inline constexpr double kLimitFreedman = 0.25;

struct Accidentals {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double Z = 0.0;
};

/// Coincidence rates of the four-configuration protocol: x at relative angle
/// pi/8, y at 3pi/8, z with one polariser removed, Z with both removed.
/// Values are reals because published tables report averaged rates.
struct RunCounts {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double Z = 0.0;
  std::optional<Accidentals> acc;
  double duration = 0.0;  // s of live time per configuration
};

enum class Variant { raw, corrected };

/// A statistic that may be undefined (zero denominator). `violated` is
/// exactly value > limit and false when the value is undefined.
struct Statistic {
  std::optional<double> value;
  std::optional<double> sigma;  // Poisson-propagated counting error
  double limit = 0.0;
  bool violated = false;
};

struct BellStatistics {
  Statistic standard;  // 4 (x - y) / (x + y)
  Statistic chsh;      // (3x - y - 2z) / Z
  Statistic freedman;  // (x - y) / Z
  bool has_negative_counts = false;  // possible after subtraction, kept as-is
};

struct VisibilityResult {
  std::optional<double> visibility;  // (max - min) / (max + min)
  Statistic s_vis;                   // (max + min) / (max - min), limit 1.71
};

struct BellReport {
  BellStatistics raw;
  std::optional<BellStatistics> corrected;  // only when accidentals were supplied
  std::optional<VisibilityResult> visibility;
};

/// Each of x, y, z, Z reduced by its accidental estimate. Negative results
/// are preserved. Throws InputError when no accidentals are attached.
RunCounts subtract_accidentals(const RunCounts& c);

BellStatistics compute_bell_statistics(const RunCounts& c, Variant variant);

/// Needs at least two points. A flat curve gives V = 0 and an undefined
/// s_vis rather than an error.
VisibilityResult compute_visibility_statistic(std::span<const std::pair<double, double>> curve);

/// Raw statistics, corrected ones when accidentals are present, and the
/// visibility pair when a curve is given.
BellReport make_bell_report(const RunCounts& c,
                            std::span<const std::pair<double, double>> curve = {});

}  // namespace epr
