#include "epr/bell_stats.hpp"

#include <algorithm>
#include <cmath>

#include "epr/error.hpp"

namespace epr {

namespace {

Statistic make_statistic(std::optional<double> value, std::optional<double> sigma, double limit) {
  Statistic s;
  s.limit = limit;
  if (value && std::isfinite(*value)) {
    s.value = value;
    s.sigma = sigma;
    s.violated = *value > limit;
  }
  return s;
}

}  // namespace

RunCounts subtract_accidentals(const RunCounts& c) {
  if (!c.acc) throw InputError("subtract_accidentals: no accidental estimates supplied");
  RunCounts out = c;
  out.x = c.x - c.acc->x;
  out.y = c.y - c.acc->y;
  out.z = c.z - c.acc->z;
  out.Z = c.Z - c.acc->Z;
  out.acc.reset();
  return out;
}

BellStatistics compute_bell_statistics(const RunCounts& c, Variant variant) {
  for (double v : {c.x, c.y, c.z, c.Z})
    if (!std::isfinite(v) || v < 0.0) throw InputError("counts must be finite and nonnegative");

  // Counting variances: raw counts are Poisson; a subtracted estimate adds
  // its own variance.
  Accidentals var{c.x, c.y, c.z, c.Z};
  RunCounts k = c;
  if (variant == Variant::corrected) {
    k = subtract_accidentals(c);
    var.x += std::abs(c.acc->x);
    var.y += std::abs(c.acc->y);
    var.z += std::abs(c.acc->z);
    var.Z += std::abs(c.acc->Z);
  }
  const double x = k.x, y = k.y, z = k.z, Z = k.Z;

  BellStatistics out;
  out.has_negative_counts = x < 0.0 || y < 0.0 || z < 0.0 || Z < 0.0;

  const double sum = x + y;
  if (sum != 0.0) {
    const double value = 4.0 * (x - y) / sum;
    const double dx = 8.0 * y / (sum * sum);
    const double dy = -8.0 * x / (sum * sum);
    out.standard = make_statistic(value, std::sqrt(dx * dx * var.x + dy * dy * var.y),
                                  kLimitStandard);
  } else {
    out.standard = make_statistic(std::nullopt, std::nullopt, kLimitStandard);
  }

  if (Z != 0.0) {
    const double chsh = (3.0 * x - y - 2.0 * z) / Z;
    const double chsh_var =
        (9.0 * var.x + var.y + 4.0 * var.z + chsh * chsh * var.Z) / (Z * Z);
    out.chsh = make_statistic(chsh, std::sqrt(chsh_var), kLimitChsh);

    const double freedman = (x - y) / Z;
    const double freedman_var = (var.x + var.y + freedman * freedman * var.Z) / (Z * Z);
    out.freedman = make_statistic(freedman, std::sqrt(freedman_var), kLimitFreedman);
  } else {
    out.chsh = make_statistic(std::nullopt, std::nullopt, kLimitChsh);
    out.freedman = make_statistic(std::nullopt, std::nullopt, kLimitFreedman);
  }
  return out;
}

VisibilityResult compute_visibility_statistic(std::span<const std::pair<double, double>> curve) {
  if (curve.size() < 2) throw InputError("visibility: need at least two (angle, rate) points");
  auto [lo, hi] = std::minmax_element(curve.begin(), curve.end(),
                                      [](const auto& a, const auto& b) { return a.second < b.second; });
  const double mn = lo->second;
  const double mx = hi->second;

  VisibilityResult r;
  if (mx + mn != 0.0) r.visibility = (mx - mn) / (mx + mn);
  r.s_vis = make_statistic(mx != mn ? std::optional<double>((mx + mn) / (mx - mn)) : std::nullopt,
                           std::nullopt, kLimitVisibility);
  return r;
}

BellReport make_bell_report(const RunCounts& c, std::span<const std::pair<double, double>> curve) {
  BellReport r;
  r.raw = compute_bell_statistics(c, Variant::raw);
  if (c.acc) r.corrected = compute_bell_statistics(c, Variant::corrected);
  if (curve.size() >= 2) r.visibility = compute_visibility_statistic(curve);
  return r;
}

}  // namespace epr
