#pragma once

#include <cmath>
#include <numbers>

namespace epr {

// All times inside the library are nanoseconds held in doubles. Seconds only
// appear at configuration boundaries (run duration, rates).
inline constexpr double kNsPerSecond = 1e9;

inline constexpr double seconds_to_ns(double s) { return s * kNsPerSecond; }
inline constexpr double per_second_to_per_ns(double rate) { return rate / kNsPerSecond; }

/// Maps an angle onto [0, pi), the range of a linear polarization direction.
inline double normalize_angle(double a) {
  constexpr double pi = std::numbers::pi;
  double r = std::fmod(a, pi);
  if (r < 0.0) r += pi;
  if (r >= pi) r = 0.0;  // fmod rounding at the upper edge
  return r;
}

}  // namespace epr
