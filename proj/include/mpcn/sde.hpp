#pragma once

// The limiting radial diffusion of the MpCN chain on a scale mixture target:
// closed-form drift and squared diffusion
//   a(y) = 2 (2y + (log q)'(y) y^2) (1 - rho),   b(y) = 4 y^2 (1 - rho),
// an Euler-Maruyama stepper, and the binned estimator of the d-scaled one-step
// radial moments that checks a chain against this limit. One chain step
// corresponds to dt = 1/d of diffusion time, hence the factor d on each
// moment.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "mpcn/chain.hpp"
#include "mpcn/mixing.hpp"
#include "mpcn/rng.hpp"
#include "mpcn/targets.hpp"

namespace mpcn {

struct DiffusionSpec {
  std::function<double(double)> a;  // drift
  std::function<double(double)> b;  // squared diffusion coefficient
  double rho = 0.0;
  MixingInfo mixing;
};

inline DiffusionSpec diffusion_from_target(const Target& target, double rho) {
  if (!target.mixing)
    throw std::invalid_argument(
        "diffusion_from_target: target carries no mixing info");
  if (!(rho > 0.0 && rho < 1.0))
    throw std::invalid_argument("diffusion_from_target: rho must be in (0,1)");
  DiffusionSpec spec;
  spec.rho = rho;
  spec.mixing = *target.mixing;
  spec.a = [dq = spec.mixing.dlog_q, rho](double y) {
    return 2.0 * (2.0 * y + dq(y) * y * y) * (1.0 - rho);
  };
  spec.b = [rho](double y) { return 4.0 * y * y * (1.0 - rho); };
  return spec;
}

// Euler-Maruyama path of length steps+1 (initial value included). The true
// diffusion stays positive; a nonpositive Euler step is reflected, which at
// small dt perturbs the law negligibly (discretization artifact, documented).
inline std::vector<double> euler_maruyama(const DiffusionSpec& spec, double y0,
                                          double dt, long steps,
                                          RngStream& rng) {
  if (!(y0 > 0.0)) throw std::invalid_argument("euler_maruyama: y0 must be > 0");
  if (!(dt > 0.0)) throw std::invalid_argument("euler_maruyama: dt must be > 0");
  std::vector<double> path;
  path.reserve(steps + 1);
  path.push_back(y0);
  const double root_dt = std::sqrt(dt);
  double y = y0;
  for (long i = 0; i < steps; ++i) {
    const double bv = spec.b(y);
    y = y + spec.a(y) * dt + std::sqrt(bv) * root_dt * rng.normal();
    if (y <= 0.0) y = std::abs(y);
    path.push_back(y);
  }
  return path;
}

struct TripletBins {
  int n_bins = 30;
  double lo_quantile = 0.05;
  double hi_quantile = 0.95;
  long min_count = 200;  // bins with fewer transitions are suppressed
};

struct TripletEstimate {
  std::vector<double> bin_centers;  // mean source radial value per bin
  std::vector<double> a_hat;
  std::vector<double> b_hat;
  std::vector<double> c_hat;
  std::vector<long> counts;
  int suppressed_bins = 0;
};

// Binned estimates of the d-scaled conditional radial increment moments
//   a_d(y) = d E_y[dR],  b_d(y) = d E_y[dR^2],  c_d(y) = d E_y[dR^4]
// over transitions grouped by their source radial value. Bins are
// equal-probability between the stated quantiles of the radial series;
// heavy tails make equal-width bins degenerate.
//
// When the trace carries the per-step proposal radial and acceptance
// probability, the first moment is estimated with the rejection events
// integrated out and the exact conditional proposal mean
//   E[R* - R | R] = 2 (1 - rho) R / (d - 2)
// used as a control variate:
//   a_hat = d * mean( 2(1-rho) R/(d-2) - (R* - R)(1 - alpha) ).
// This is the same estimand with the dominant Monte Carlo noise removed;
// without those series the plain d * mean(dR) is used.
inline TripletEstimate empirical_triplet(const ChainTrace& trace, int d,
                                         const TripletBins& bins = {}) {
  const auto& radial = trace.radial;
  const long m = static_cast<long>(radial.size());
  if (m < 2) throw std::invalid_argument("empirical_triplet: trace too short");
  if (bins.n_bins < 1) throw std::invalid_argument("empirical_triplet: n_bins");
  const bool variance_reduced =
      trace.proposal_radial.size() == radial.size() &&
      trace.alpha.size() == radial.size() && d > 2;
  const double rho = trace.meta.rho_or_sigma;

  std::vector<double> sorted(radial.begin(), radial.end());
  std::sort(sorted.begin(), sorted.end());
  const auto quantile = [&](double p) {
    const double idx = p * static_cast<double>(m - 1);
    const long lo = static_cast<long>(idx);
    const double frac = idx - static_cast<double>(lo);
    const long hi = std::min(lo + 1, m - 1);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
  };
  std::vector<double> edges(bins.n_bins + 1);
  for (int j = 0; j <= bins.n_bins; ++j) {
    const double p = bins.lo_quantile +
                     (bins.hi_quantile - bins.lo_quantile) * j / bins.n_bins;
    edges[j] = quantile(p);
  }

  struct Acc {
    double sum_r = 0, sum_a = 0, sum_b = 0, sum_c = 0;
    long n = 0;
  };
  std::vector<Acc> acc(bins.n_bins);
  const double dd = static_cast<double>(d);
  for (long t = 0; t < m; ++t) {
    const double source = t == 0 ? trace.initial_radial : radial[t - 1];
    if (!(source >= edges.front() && source < edges.back())) continue;
    const auto it = std::upper_bound(edges.begin(), edges.end(), source);
    const int b = static_cast<int>(it - edges.begin()) - 1;
    if (b < 0 || b >= bins.n_bins) continue;
    const double dr = radial[t] - source;
    Acc& a = acc[b];
    a.sum_r += source;
    if (variance_reduced) {
      const double prop_dr = trace.proposal_radial[t] - source;
      a.sum_a += 2.0 * (1.0 - rho) * source / (dd - 2.0) -
                 prop_dr * (1.0 - trace.alpha[t]);
    } else {
      a.sum_a += dr;
    }
    a.sum_b += dr * dr;
    a.sum_c += dr * dr * dr * dr;
    a.n += 1;
  }

  TripletEstimate est;
  for (const Acc& a : acc) {
    if (a.n < bins.min_count) {
      est.suppressed_bins += 1;
      continue;
    }
    const double n = static_cast<double>(a.n);
    est.bin_centers.push_back(a.sum_r / n);
    est.a_hat.push_back(dd * a.sum_a / n);
    est.b_hat.push_back(dd * a.sum_b / n);
    est.c_hat.push_back(dd * a.sum_c / n);
    est.counts.push_back(a.n);
  }
  return est;
}

}  // namespace mpcn
