#pragma once

// Target distributions as unnormalized log-densities. Normalizing constants
// never appear: Metropolis-Hastings only consumes ratios. Targets are
// immutable after construction and evaluation is pure, so they can be shared
// across threads.

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mpcn/mixing.hpp"
#include "mpcn/rng.hpp"
#include "mpcn/vec.hpp"

namespace mpcn {

struct Target {
  int dim = 0;
  std::string name;
  std::function<double(std::span<const double>)> log_density_unnorm;
  std::optional<MixingInfo> mixing;
  // Draw exactly from the target; empty when unavailable.
  std::function<void(RngStream&, std::span<double>)> sample_exact;
};

// N_d(0, sigma^2 I). No MixingInfo: the mixing law is a point mass, which the
// diffusion-limit machinery cannot use.
inline Target target_gaussian(int d, double sigma) {
  if (d < 1) throw std::invalid_argument("target_gaussian: d must be >= 1");
  if (!(sigma > 0.0))
    throw std::invalid_argument("target_gaussian: sigma must be > 0");
  Target t;
  t.dim = d;
  t.name = "gaussian";
  t.log_density_unnorm = [sigma](std::span<const double> x) {
    double acc = 0.0;
    for (double v : x) {
      const double s = v / sigma;
      acc += s * s;
    }
    return -0.5 * acc;
  };
  t.sample_exact = [sigma](RngStream& rng, std::span<double> out) {
    for (double& v : out) v = sigma * rng.normal();
  };
  return t;
}

// Multivariate t with nu degrees of freedom, location mu (empty = origin) and
// scale sigma. Equivalently the scale mixture around mu with
// Q = InvGamma(nu/2, nu sigma^2 / 2); the MixingInfo is attached only for
// mu = 0, where the spherical symmetry the radial theory needs holds.
inline Target target_student_t(int d, double nu, std::vector<double> mu,
                               double sigma) {
  if (d < 1) throw std::invalid_argument("target_student_t: d must be >= 1");
  if (!(nu > 0.0)) throw std::invalid_argument("target_student_t: nu must be > 0");
  if (!(sigma > 0.0))
    throw std::invalid_argument("target_student_t: sigma must be > 0");
  if (!mu.empty() && static_cast<int>(mu.size()) != d)
    throw std::invalid_argument("target_student_t: mu dimension mismatch");
  bool centered = true;
  for (double v : mu) centered = centered && v == 0.0;

  Target t;
  t.dim = d;
  t.name = "student_t";
  const double expo = 0.5 * (nu + d);
  t.log_density_unnorm = [nu, sigma, expo,
                          mu](std::span<const double> x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double s = ((mu.empty() ? x[i] : x[i] - mu[i])) / sigma;
      acc += s * s;
    }
    if (std::isfinite(acc)) return -expo * std::log1p(acc / nu);
    // Rescaled pass for coordinates large enough to overflow the square sum.
    double amax = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      amax = std::max(amax, std::abs(mu.empty() ? x[i] : x[i] - mu[i]));
    double scaled = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double s = (mu.empty() ? x[i] : x[i] - mu[i]) / amax;
      scaled += s * s;
    }
    const double log_acc =
        2.0 * (std::log(amax) - std::log(sigma)) + std::log(scaled);
    return -expo * (log_acc - std::log(nu));
  };
  const InvGammaParams q(0.5 * nu, 0.5 * nu * sigma * sigma);
  if (centered) t.mixing = inverse_gamma_mixing(q.shape, q.scale);
  t.sample_exact = [q, mu](RngStream& rng, std::span<double> out) {
    const double z = sample_inv_gamma(q, rng);
    const double root_z = std::sqrt(z);
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = (mu.empty() ? 0.0 : mu[i]) + root_z * rng.normal();
  };
  return t;
}

inline Target target_student_t(int d, double nu, double sigma) {
  return target_student_t(d, nu, std::vector<double>{}, sigma);
}

// A fixed non-spherical perturbation of the t-distribution in R^20:
//   p(x) propto (1 + sum((x_i-1)/5)^2 + |x_1| + sin(x_2)/2)^-12.
// Not a scale mixture; no MixingInfo, no exact sampler. The inner expression
// is bounded below by 1/2, so the log-density is finite everywhere (though
// not differentiable at x_1 = 0).
inline Target target_perturbed_t() {
  Target t;
  t.dim = 20;
  t.name = "perturbed_t";
  t.log_density_unnorm = [](std::span<const double> x) {
    double acc = 0.0;
    for (double v : x) {
      const double s = (v - 1.0) / 5.0;
      acc += s * s;
    }
    const double inner = 1.0 + acc + std::abs(x[0]) + 0.5 * std::sin(x[1]);
    return -12.0 * std::log(inner);
  };
  return t;
}

// Translate the base target by xi along the all-ones direction. The shift
// breaks spherical symmetry, so any MixingInfo of the base is dropped.
inline Target target_shifted(Target base, double xi) {
  Target t;
  t.dim = base.dim;
  t.name = base.name + "_shifted";
  t.log_density_unnorm = [base_f = base.log_density_unnorm,
                          xi](std::span<const double> x) {
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - xi;
    return base_f(y);
  };
  if (base.sample_exact) {
    t.sample_exact = [base_s = base.sample_exact, xi](RngStream& rng,
                                                      std::span<double> out) {
      base_s(rng, out);
      for (double& v : out) v += xi;
    };
  }
  return t;
}

// Generic scale mixture of normals for a given mixing law. The log-density is
// the mixture integral, evaluated in closed form when the mixing provides one
// and by log-domain quadrature otherwise. Intended for theory checks at small
// d rather than hot sampling loops.
inline Target target_scale_mixture(int d, MixingInfo mixing) {
  if (d < 1) throw std::invalid_argument("target_scale_mixture: d must be >= 1");
  if (!mixing.log_q)
    throw std::invalid_argument("target_scale_mixture: mixing.log_q required");
  Target t;
  t.dim = d;
  t.name = "scale_mixture";
  t.mixing = mixing;
  t.log_density_unnorm = [mixing, d](std::span<const double> x) {
    return log_scale_mixture_density(mixing, d, norm_sq(x));
  };
  if (mixing.sample) {
    t.sample_exact = [mixing](RngStream& rng, std::span<double> out) {
      const double z = mixing.sample(rng);
      const double root_z = std::sqrt(z);
      for (double& v : out) v = root_z * rng.normal();
    };
  }
  return t;
}

}  // namespace mpcn
