#pragma once

// Parameter types, samplers and log-densities for the distributions used by
// the samplers and their tests.
//
// Gamma(shape, rate) has density proportional to x^(shape-1) exp(-rate x);
// the second parameter is a rate throughout this library. InvGamma(shape,
// scale) has density scale^shape / Gamma(shape) * z^(-shape-1) exp(-scale/z).

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>

#include "mpcn/rng.hpp"
#include "mpcn/vec.hpp"

namespace mpcn {

struct GammaParams {
  double shape;
  double rate;
  GammaParams(double shape_, double rate_) : shape(shape_), rate(rate_) {
    if (!(shape > 0.0) || !(rate > 0.0))
      throw std::invalid_argument("GammaParams: shape and rate must be > 0");
  }
};

struct InvGammaParams {
  double shape;
  double scale;
  InvGammaParams(double shape_, double scale_) : shape(shape_), scale(scale_) {
    if (!(shape > 0.0) || !(scale > 0.0))
      throw std::invalid_argument("InvGammaParams: shape and scale must be > 0");
  }
};

inline double sample_gamma(const GammaParams& p, RngStream& rng) {
  return rng.gamma(p.shape) / p.rate;
}

// InvGamma(shape, scale) as scale over a unit-rate gamma draw.
inline double sample_inv_gamma(const InvGammaParams& p, RngStream& rng) {
  return p.scale / rng.gamma(p.shape);
}

inline double log_density_gamma(double x, const GammaParams& p) {
  if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
  return p.shape * std::log(p.rate) - std::lgamma(p.shape) +
         (p.shape - 1.0) * std::log(x) - p.rate * x;
}

inline double log_density_inv_gamma(double z, const InvGammaParams& p) {
  if (!(z > 0.0)) return -std::numeric_limits<double>::infinity();
  return p.shape * std::log(p.scale) - std::lgamma(p.shape) -
         (p.shape + 1.0) * std::log(z) - p.scale / z;
}

// Log-density of N_d(mean, var * I_d).
inline double log_density_normal_vec(std::span<const double> x,
                                     std::span<const double> mean,
                                     double var) {
  if (x.size() != mean.size())
    throw std::invalid_argument("log_density_normal_vec: dimension mismatch");
  if (!(var > 0.0))
    throw std::invalid_argument("log_density_normal_vec: var must be > 0");
  const double d = static_cast<double>(x.size());
  double q = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = x[i] - mean[i];
    q += t * t;
  }
  return -0.5 * d * std::log(2.0 * std::numbers::pi * var) - 0.5 * q / var;
}

// E[(chi2_d / d)^k] = (2/d)^k Gamma(d/2 + k) / Gamma(d/2), for d/2 + k > 0.
// Evaluated through log-gamma so large d and negative k stay stable.
inline double chi2_scaled_moment(int d, int k) {
  if (d < 1) throw std::domain_error("chi2_scaled_moment: d must be >= 1");
  const double half_d = 0.5 * static_cast<double>(d);
  if (!(half_d + k > 0.0))
    throw std::domain_error("chi2_scaled_moment: requires d/2 + k > 0");
  return std::exp(k * std::log(2.0 / d) + std::lgamma(half_d + k) -
                  std::lgamma(half_d));
}

}  // namespace mpcn
