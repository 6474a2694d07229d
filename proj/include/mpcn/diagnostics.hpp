#pragma once

// Scalar chain functionals and statistical summaries: the radial statistic,
// empirical autocorrelation, integrated autocorrelation time (IAT), stuck
// statistics and log-log scaling slopes.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "mpcn/vec.hpp"

namespace mpcn {

enum class RadialMode {
  gaussian_centered,  // (2d)^(-1/2) (||x||^2 - d)
  plain               // ||x||^2 / d
};

inline double radial_stat(std::span<const double> x, RadialMode mode) {
  const double d = static_cast<double>(x.size());
  const double nsq = norm_sq(x);
  if (mode == RadialMode::gaussian_centered)
    return (nsq - d) / std::sqrt(2.0 * d);
  return nsq / d;
}

// Empirical autocorrelation rho(0..max_lag), biased (divide-by-M)
// autocovariance normalization; this keeps |rho(k)| <= 1 and stabilizes IAT
// sums. Direct O(M * max_lag) evaluation.
inline std::vector<double> autocorrelation(std::span<const double> series,
                                           long max_lag) {
  const long n = static_cast<long>(series.size());
  if (max_lag < 0) throw std::invalid_argument("autocorrelation: max_lag < 0");
  if (n <= max_lag)
    throw std::invalid_argument("autocorrelation: series shorter than max_lag");
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> c(static_cast<std::size_t>(max_lag) + 1, 0.0);
  for (long k = 0; k <= max_lag; ++k) {
    double acc = 0.0;
    for (long t = 0; t + k < n; ++t)
      acc += (series[t] - mean) * (series[t + k] - mean);
    c[k] = acc / static_cast<double>(n);
  }
  if (!(c[0] > 0.0))
    throw std::domain_error("autocorrelation: series has zero variance");
  std::vector<double> rho(c.size());
  rho[0] = 1.0;
  for (std::size_t k = 1; k < c.size(); ++k) rho[k] = c[k] / c[0];
  return rho;
}

struct IatResult {
  double iat = 1.0;
  long truncation_lag = 0;  // last lag included in the sum
  bool window_limited = false;  // pair sums stayed positive up to the window
};

// IAT = 1 + 2 sum rho(k), truncated by the initial-positive-sequence rule:
// adjacent-pair sums rho(2m) + rho(2m+1) are accumulated while positive.
// Autocovariances are evaluated lazily, one lag at a time, so short
// truncation windows cost O(M * truncation_lag) rather than O(M * max_lag).
inline IatResult integrated_autocorr_time_detail(std::span<const double> series,
                                                 long max_lag = 2000) {
  if (series.size() < 10)
    throw std::invalid_argument("integrated_autocorr_time: series too short");
  const long n = static_cast<long>(series.size());
  const long window = std::min<long>(max_lag, n - 1);
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);
  const auto cov = [&](long k) {
    double acc = 0.0;
    for (long t = 0; t + k < n; ++t)
      acc += (series[t] - mean) * (series[t + k] - mean);
    return acc / static_cast<double>(n);
  };
  const double c0 = cov(0);
  if (!(c0 > 0.0))
    throw std::domain_error("integrated_autocorr_time: zero-variance series");
  IatResult r;
  double tau = -1.0;
  long k = 0;
  while (k + 1 <= window) {
    const double pair = (k == 0 ? c0 : cov(k)) + cov(k + 1);
    if (pair <= 0.0) break;
    tau += 2.0 * pair / c0;
    k += 2;
  }
  r.window_limited = k + 1 > window;
  r.truncation_lag = k > 0 ? k - 1 : 0;
  r.iat = k == 0 ? 1.0 : tau;
  return r;
}

inline double integrated_autocorr_time(std::span<const double> series,
                                       long max_lag = 2000) {
  return integrated_autocorr_time_detail(series, max_lag).iat;
}

struct IatEstimate {
  double iat = 1.0;
  long thin = 1;
  bool reliable = true;
};

namespace detail {

// True when the autocorrelation at half the window is still so high that the
// pair-sum truncation cannot have terminated inside the window; lets the
// thinning ladder skip a full O(len * max_lag) scan on hopeless levels.
inline bool clearly_window_limited(std::span<const double> series, long window) {
  const long n = static_cast<long>(series.size());
  const long k = window / 2;
  if (k < 1 || n <= k + 1) return false;
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);
  double c0 = 0.0, ck = 0.0;
  for (long t = 0; t < n; ++t) {
    const double a = series[t] - mean;
    c0 += a * a;
    if (t + k < n) ck += a * (series[t + k] - mean);
  }
  if (!(c0 > 0.0)) return false;
  return ck / c0 > 0.25;
}

}  // namespace detail

// IAT estimation for series whose autocorrelation time may exceed the direct
// window: the series is thinned by doubling strides until the truncation rule
// terminates inside the window, and the thinned IAT is scaled back. A
// zero-variance (fully stuck) series yields iat = NaN, flagged unreliable.
inline IatEstimate iat_with_thinning(std::span<const double> series,
                                     long max_lag = 2000) {
  std::vector<double> buf;
  IatEstimate best{std::numeric_limits<double>::quiet_NaN(), 1, false};
  for (long thin = 1;; thin *= 2) {
    std::span<const double> view = series;
    if (thin > 1) {
      buf.clear();
      for (std::size_t i = 0; i < series.size(); i += static_cast<std::size_t>(thin))
        buf.push_back(series[i]);
      view = buf;
    }
    if (view.size() < 10) return best;
    const long window =
        std::min<long>(max_lag, static_cast<long>(view.size()) - 1);
    if (view.size() >= 64 && detail::clearly_window_limited(view, window))
      continue;  // no estimate at this level; the ladder keeps thinning
    IatResult r;
    try {
      r = integrated_autocorr_time_detail(view, max_lag);
    } catch (const std::domain_error&) {
      return best;  // constant series
    }
    best = {static_cast<double>(thin) * r.iat, thin, false};
    if (!r.window_limited || view.size() < 64) {
      best.reliable = !r.window_limited;
      return best;
    }
  }
}

struct StuckStats {
  double acceptance_rate = 0.0;
  long longest_reject_run = 0;
};

inline StuckStats stuck_statistics(std::span<const std::uint8_t> accepted) {
  if (accepted.empty())
    throw std::invalid_argument("stuck_statistics: empty series");
  StuckStats s;
  long n_acc = 0, run = 0, longest = 0;
  for (std::uint8_t a : accepted) {
    if (a) {
      ++n_acc;
      run = 0;
    } else {
      ++run;
      if (run > longest) longest = run;
    }
  }
  s.acceptance_rate =
      static_cast<double>(n_acc) / static_cast<double>(accepted.size());
  s.longest_reject_run = longest;
  return s;
}

struct SlopeFit {
  double slope = 0.0;
  double r_squared = 1.0;
};

// Least-squares slope of log(iat) against log(d).
inline SlopeFit scaling_slope(std::span<const double> dims,
                              std::span<const double> iats) {
  if (dims.size() != iats.size() || dims.size() < 3)
    throw std::domain_error("scaling_slope: need >= 3 matched points");
  const std::size_t n = dims.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(dims[i] > 0.0) || !(iats[i] > 0.0))
      throw std::domain_error("scaling_slope: inputs must be positive");
    lx[i] = std::log(dims[i]);
    ly[i] = std::log(iats[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  SlopeFit f;
  f.slope = sxy / sxx;
  const double ss_res = syy - f.slope * sxy;
  f.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return f;
}

}  // namespace mpcn
