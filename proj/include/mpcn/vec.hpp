#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace mpcn {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double norm_sq(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc;
}

// log(||x||^2), finite for ||x|| up to ~1e300 where the plain sum of squares
// overflows; rescales by the largest coordinate in that case.
inline double log_norm_sq(std::span<const double> x) {
  const double plain = norm_sq(x);
  if (std::isfinite(plain) && plain > 0.0) return std::log(plain);
  double amax = 0.0;
  for (double v : x) amax = std::max(amax, std::abs(v));
  if (amax == 0.0) return -std::numeric_limits<double>::infinity();
  double acc = 0.0;
  for (double v : x) {
    const double t = v / amax;
    acc += t * t;
  }
  return 2.0 * std::log(amax) + std::log(acc);
}

}  // namespace mpcn
