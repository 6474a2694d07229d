#pragma once

// Radial mixing metadata for scale mixtures of normals: the law of X with
// X|Z ~ N_d(0, Z I_d), Z ~ Q. MixingInfo carries the mixing density q in log
// form together with its exact log-derivative; the derivative feeds the
// closed-form coefficients of the limiting radial diffusion, so it is
// analytic, never a runtime finite difference.

#include <cmath>
#include <functional>
#include <stdexcept>

#include "mpcn/distributions.hpp"
#include "mpcn/quadrature.hpp"
#include "mpcn/rng.hpp"

namespace mpcn {

struct MixingInfo {
  // log q(z) on z > 0 (normalized).
  std::function<double(double)> log_q;
  // (log q)'(z).
  std::function<double(double)> dlog_q;
  // (log q~)'(z) for q~(z) = z q(z); always 1/z + dlog_q(z).
  std::function<double(double)> dlog_qtilde;
  // Draw Z ~ Q; empty when exact sampling is unavailable.
  std::function<double(RngStream&)> sample;
  // log q_d(r): density of ||X||^2/d at dimension d. Empty -> quadrature.
  std::function<double(int, double)> log_radial_density;
  // log of the mixture density at squared norm nsq (normalized). Empty ->
  // quadrature.
  std::function<double(int, double)> log_marginal_density;
};

inline MixingInfo make_mixing(std::function<double(double)> log_q,
                              std::function<double(double)> dlog_q,
                              std::function<double(RngStream&)> sample = {}) {
  MixingInfo m;
  m.log_q = std::move(log_q);
  m.dlog_q = std::move(dlog_q);
  m.dlog_qtilde = [dq = m.dlog_q](double y) { return 1.0 / y + dq(y); };
  m.sample = std::move(sample);
  return m;
}

// Q = InvGamma(shape, scale). Conjugacy with the normal scale gives closed
// forms for both the mixture density and the radial density:
//   p_d(x)  = C1 * (||x||^2/2 + scale)^-(d/2 + shape)
//   q_d(r)  = C2 * r^(d/2-1) * (d r/2 + scale)^-(d/2 + shape)
inline MixingInfo inverse_gamma_mixing(double shape, double scale) {
  const InvGammaParams p(shape, scale);
  MixingInfo m = make_mixing(
      [p](double z) { return log_density_inv_gamma(z, p); },
      [p](double z) { return -(p.shape + 1.0) / z + p.scale / (z * z); },
      [p](RngStream& rng) { return sample_inv_gamma(p, rng); });
  m.log_radial_density = [p](int d, double r) {
    if (!(r > 0.0)) return -std::numeric_limits<double>::infinity();
    const double hd = 0.5 * d;
    const double c = std::lgamma(hd + p.shape) - std::lgamma(hd) -
                     std::lgamma(p.shape) + hd * std::log(hd) +
                     p.shape * std::log(p.scale);
    return c + (hd - 1.0) * std::log(r) -
           (hd + p.shape) * std::log(hd * r + p.scale);
  };
  m.log_marginal_density = [p](int d, double nsq) {
    const double hd = 0.5 * d;
    const double c = -hd * std::log(2.0 * std::numbers::pi) +
                     p.shape * std::log(p.scale) - std::lgamma(p.shape) +
                     std::lgamma(hd + p.shape);
    return c - (hd + p.shape) * std::log(0.5 * nsq + p.scale);
  };
  return m;
}

// log q_d(r) for any mixing: closed form when available, otherwise the
// scale-mixture integral of the Gamma(d/2, rate d/(2z)) radial kernel.
inline double log_radial_density(const MixingInfo& m, int d, double r) {
  if (m.log_radial_density) return m.log_radial_density(d, r);
  if (!(r > 0.0)) return -std::numeric_limits<double>::infinity();
  const double hd = 0.5 * d;
  return log_integrate_scale([&, hd, r](double z) {
    const double rate = hd / z;
    return hd * std::log(rate) - std::lgamma(hd) + (hd - 1.0) * std::log(r) -
           rate * r + m.log_q(z);
  });
}

// log integral of phi_d(x; 0, z I_d) q(z) dz at squared norm nsq.
inline double log_scale_mixture_density(const MixingInfo& m, int d,
                                        double nsq) {
  if (m.log_marginal_density) return m.log_marginal_density(d, nsq);
  const double hd = 0.5 * d;
  return log_integrate_scale([&, hd, nsq](double z) {
    return -hd * std::log(2.0 * std::numbers::pi * z) - 0.5 * nsq / z +
           m.log_q(z);
  });
}

}  // namespace mpcn
