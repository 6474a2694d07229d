#pragma once

// Numerical reversibility checks for Markov kernels.
//
// The MpCN proposal kernel is reversible with respect to the sigma-finite
// measure ||x||^(-d) dx: integrating its inverse-gamma scale out, the joint
// density of (x, y) under that measure is proportional to the symmetric
// function (||x||^2 - 2 sqrt(rho) <x,y> + ||y||^2)^(-d). Both an adaptive
// quadrature route and the closed form are provided so each can check the
// other.
//
// detailed_balance_statistic estimates E[f(X0) g(X1)] - E[g(X0) f(X1)] over
// stationary one-step transitions; reversibility makes it zero for any f, g.

#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "mpcn/chain.hpp"
#include "mpcn/distributions.hpp"
#include "mpcn/kernels.hpp"
#include "mpcn/quadrature.hpp"
#include "mpcn/rng.hpp"
#include "mpcn/targets.hpp"

namespace mpcn {

// log r_d(x -> y) by quadrature over the mixing scale z:
// integral of InvGamma(z; d/2, ||x||^2/2) * phi_d(y; sqrt(rho) x, (1-rho) z).
inline double mpcn_proposal_log_density_quadrature(std::span<const double> x,
                                                   std::span<const double> y,
                                                   double rho) {
  if (x.size() != y.size())
    throw std::invalid_argument("proposal density: dimension mismatch");
  const int d = static_cast<int>(x.size());
  const InvGammaParams mix(0.5 * d, 0.5 * norm_sq(x));
  std::vector<double> mean(x.size());
  const double root_rho = std::sqrt(rho);
  for (std::size_t i = 0; i < x.size(); ++i) mean[i] = root_rho * x[i];
  return log_integrate_scale([&](double z) {
    return log_density_inv_gamma(z, mix) +
           log_density_normal_vec(y, mean, (1.0 - rho) * z);
  });
}

// Same quantity in closed form: the scale integral is a gamma integral.
inline double mpcn_proposal_log_density_closed(std::span<const double> x,
                                               std::span<const double> y,
                                               double rho) {
  if (x.size() != y.size())
    throw std::invalid_argument("proposal density: dimension mismatch");
  const double d = static_cast<double>(x.size());
  const double nsq_x = norm_sq(x);
  const double quad =
      (nsq_x + norm_sq(y) - 2.0 * std::sqrt(rho) * dot(x, y)) / (1.0 - rho);
  return 0.5 * d * std::log(0.5 * nsq_x) - std::lgamma(0.5 * d) -
         0.5 * d * std::log(2.0 * std::numbers::pi * (1.0 - rho)) +
         std::lgamma(d) - d * std::log(0.5 * quad);
}

// Asymmetry of log[ r_d(x,y) ||x||^(-d) ] under swapping x and y, evaluated by
// quadrature. Zero for a reversible proposal.
inline double mpcn_proposal_asymmetry(std::span<const double> x,
                                      std::span<const double> y, double rho) {
  const double d = static_cast<double>(x.size());
  const double fwd =
      mpcn_proposal_log_density_quadrature(x, y, rho) - 0.5 * d * log_norm_sq(x);
  const double bwd =
      mpcn_proposal_log_density_quadrature(y, x, rho) - 0.5 * d * log_norm_sq(y);
  return std::abs(fwd - bwd);
}

struct DbStatistic {
  double estimate = 0.0;
  double std_error = 0.0;
};

// Monte Carlo estimate of E[f(X0)g(X1)] - E[g(X0)f(X1)] over n independent
// stationary transitions (X0 drawn exactly from the target).
inline DbStatistic detailed_balance_statistic(
    const ProposalKernel& kernel, const Target& target, long n,
    const std::function<double(std::span<const double>)>& f,
    const std::function<double(std::span<const double>)>& g, RngStream& rng) {
  if (!target.sample_exact)
    throw std::invalid_argument(
        "detailed_balance_statistic: target has no exact sampler");
  if (n < 2) throw std::invalid_argument("detailed_balance_statistic: n < 2");
  std::vector<double> x0(target.dim);
  std::vector<double> y;
  double mean = 0.0, m2 = 0.0;
  for (long i = 0; i < n; ++i) {
    target.sample_exact(rng, x0);
    ChainState state = make_state(x0, target);
    const double f0 = f(state.x);
    const double g0 = g(state.x);
    detail::mh_step_inplace(state, kernel, target, rng, y);
    const double h = f0 * g(state.x) - g0 * f(state.x);
    // Welford running moments.
    const double delta = h - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (h - mean);
  }
  DbStatistic s;
  s.estimate = mean;
  s.std_error = std::sqrt(m2 / static_cast<double>(n - 1) /
                          static_cast<double>(n));
  return s;
}

}  // namespace mpcn
