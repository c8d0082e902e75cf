#pragma once

// Test-only reference implementations. None of these call into the library
// code paths they are used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "epr/detection.hpp"

namespace oracle {

inline constexpr double kPi = std::numbers::pi;

/// Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// Average of f(lambda) over a uniform hidden variable on [0, pi).
inline double average_over_lambda(const std::function<double(double)>& f) {
  return simpson(f, 0.0, kPi) / kPi;
}

/// Classical particle-model coincidence rate per emission at relative angle
/// phi, both polarisers present, by quadrature.
inline double classical_rate(double phi) {
  return average_over_lambda([phi](double l) {
    const double a = std::cos(l), b = std::cos(l - phi);
    return a * a * b * b;
  });
}

/// Upper chi-square critical value at significance alpha.
inline double chi2_critical(double dof, double alpha) {
  boost::math::chi_squared dist(dof);
  return boost::math::quantile(boost::math::complement(dist, alpha));
}

/// O(n^2) one-use matcher: each A in time order takes the earliest unused B
/// whose delta lies in [lo, hi].
inline std::int64_t brute_force_coincidences(const std::vector<double>& a,
                                             const std::vector<double>& b, double delay, double lo,
                                             double hi) {
  std::vector<bool> used(b.size(), false);
  std::int64_t n = 0;
  for (double ta : a) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double d = b[j] + delay - ta;
      if (!used[j] && d >= lo && d <= hi) {
        used[j] = true;
        ++n;
        break;
      }
    }
  }
  return n;
}

inline std::int64_t brute_force_all_pairs(const std::vector<double>& a, const std::vector<double>& b,
                                          double delay, double lo, double hi) {
  std::int64_t n = 0;
  for (double ta : a)
    for (double tb : b) {
      const double d = tb + delay - ta;
      if (d >= lo && d <= hi) ++n;
    }
  return n;
}

/// Quadratic dead-time reference: a click survives iff no earlier surviving
/// click lies within dead_time before it.
inline std::vector<double> brute_force_dead_time(const std::vector<double>& t, double dead_time) {
  std::vector<double> kept;
  for (std::size_t i = 0; i < t.size(); ++i) {
    bool blocked = false;
    for (double k : kept)
      if (t[i] - k < dead_time) blocked = true;
    if (!blocked) kept.push_back(t[i]);
  }
  return kept;
}

inline std::vector<double> poisson_times(double rate_per_ns, double duration_ns, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> gap(rate_per_ns);
  std::vector<double> t;
  for (double x = gap(rng); x < duration_ns; x += gap(rng)) t.push_back(x);
  return t;
}

inline std::vector<epr::DetectionEvent> events(const std::vector<double>& t, epr::Side side,
                                               std::int64_t source0 = -1) {
  std::vector<epr::DetectionEvent> out;
  std::int64_t s = source0;
  for (double x : t) out.push_back({x, side, source0 >= 0 ? s++ : -1});
  return out;
}

inline std::vector<double> times(const std::vector<epr::DetectionEvent>& e) {
  std::vector<double> t;
  for (const auto& x : e) t.push_back(x.t);
  return t;
}

}  // namespace oracle
