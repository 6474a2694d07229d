#pragma once

// Adaptive 1-D quadrature on a Gauss-Kronrod 7-15 pair.
//
// Two entry points: integrate() for ordinary integrands on a finite interval,
// and log_integrate() / log_integrate_scale() for strictly positive
// integrands supplied in log form. The log variants accumulate through
// log-sum-exp, so mixture densities far below the double underflow threshold
// integrate cleanly. log_integrate_scale() handles (0, inf) via z = exp(u).

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace mpcn {

namespace detail {

// Kronrod abscissae on [0,1] side of [-1,1] and the matching weights. Even
// indices of the Kronrod nodes are the embedded Gauss-7 nodes.
inline constexpr double kKronrodNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
inline constexpr double kKronrodWeights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
inline constexpr double kGaussWeights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct Segment {
  double a, b;
  int depth;
};

inline double log_sum_exp(const double* v, const double* w, int n) {
  double m = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double t = v[i] + std::log(w[i]);
    if (t > m) m = t;
  }
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += std::exp(v[i] + std::log(w[i]) - m);
  return m + std::log(acc);
}

}  // namespace detail

// Adaptive integral of f over [a,b]; per-segment acceptance when the
// Gauss/Kronrod discrepancy is below tol relative to the running magnitude.
inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double rel_tol = 1e-10,
                        double abs_tol = 1e-300, int max_depth = 48) {
  std::vector<detail::Segment> stack{{a, b, 0}};
  double total = 0.0;
  while (!stack.empty()) {
    const auto seg = stack.back();
    stack.pop_back();
    const double mid = 0.5 * (seg.a + seg.b);
    const double half = 0.5 * (seg.b - seg.a);
    double kron = 0.0, gauss = 0.0;
    for (int i = 0; i < 8; ++i) {
      const double node = detail::kKronrodNodes[i];
      double fv;
      if (i == 7) {
        fv = f(mid);
        kron += detail::kKronrodWeights[i] * fv;
        gauss += detail::kGaussWeights[3] * fv;
      } else {
        const double f1 = f(mid - half * node);
        const double f2 = f(mid + half * node);
        kron += detail::kKronrodWeights[i] * (f1 + f2);
        if (i % 2 == 1) gauss += detail::kGaussWeights[i / 2] * (f1 + f2);
      }
    }
    kron *= half;
    gauss *= half;
    const double err = std::abs(kron - gauss);
    if (err <= rel_tol * std::abs(kron) + abs_tol) {
      total += kron;
    } else if (seg.depth >= max_depth) {
      throw std::runtime_error("integrate: failed to converge (max depth)");
    } else {
      stack.push_back({seg.a, mid, seg.depth + 1});
      stack.push_back({mid, seg.b, seg.depth + 1});
    }
  }
  return total;
}

// log of the integral of exp(log_f) over [a,b].
inline double log_integrate(const std::function<double(double)>& log_f,
                            double a, double b, double rel_tol = 1e-9,
                            int max_depth = 48) {
  std::vector<detail::Segment> stack{{a, b, 0}};
  std::vector<double> accepted;
  while (!stack.empty()) {
    const auto seg = stack.back();
    stack.pop_back();
    const double mid = 0.5 * (seg.a + seg.b);
    const double half = 0.5 * (seg.b - seg.a);
    double lv[15], kw[15];
    double gv[7], gw[7];
    int ng = 0;
    for (int i = 0; i < 8; ++i) {
      const double node = detail::kKronrodNodes[i];
      if (i == 7) {
        lv[14] = log_f(mid);
        kw[14] = detail::kKronrodWeights[i];
        gv[ng] = lv[14];
        gw[ng++] = detail::kGaussWeights[3];
      } else {
        lv[2 * i] = log_f(mid - half * node);
        lv[2 * i + 1] = log_f(mid + half * node);
        kw[2 * i] = kw[2 * i + 1] = detail::kKronrodWeights[i];
        if (i % 2 == 1) {
          gv[ng] = lv[2 * i];
          gw[ng++] = detail::kGaussWeights[i / 2];
          gv[ng] = lv[2 * i + 1];
          gw[ng++] = detail::kGaussWeights[i / 2];
        }
      }
    }
    const double log_kron = detail::log_sum_exp(lv, kw, 15) + std::log(half);
    const double log_gauss = detail::log_sum_exp(gv, gw, 7) + std::log(half);
    if (!std::isfinite(log_kron)) continue;  // segment numerically empty
    const double rel_err = std::abs(std::expm1(log_gauss - log_kron));
    if (rel_err <= rel_tol) {
      accepted.push_back(log_kron);
    } else if (seg.depth >= max_depth) {
      throw std::runtime_error("log_integrate: failed to converge (max depth)");
    } else {
      stack.push_back({seg.a, mid, seg.depth + 1});
      stack.push_back({mid, seg.b, seg.depth + 1});
    }
  }
  if (accepted.empty()) return -std::numeric_limits<double>::infinity();
  double m = accepted[0];
  for (double v : accepted) m = std::max(m, v);
  double acc = 0.0;
  for (double v : accepted) acc += std::exp(v - m);
  return m + std::log(acc);
}

// log of the integral of exp(log_f(z)) dz over z in (0, inf), through the
// substitution z = exp(u). The window in u is located by a coarse scan for
// the integrand peak and widened until the endpoints are negligible.
inline double log_integrate_scale(const std::function<double(double)>& log_f_z,
                                  double rel_tol = 1e-9) {
  const auto g = [&](double u) { return log_f_z(std::exp(u)) + u; };
  constexpr double kScanLim = 340.0;
  constexpr double kScanStep = 0.5;
  double best_u = 0.0;
  double best = -std::numeric_limits<double>::infinity();
  for (double u = -kScanLim; u <= kScanLim; u += kScanStep) {
    const double v = g(u);
    if (v > best) {
      best = v;
      best_u = u;
    }
  }
  if (!std::isfinite(best))
    throw std::runtime_error(
        "log_integrate_scale: integrand is nowhere finite on the scan grid");
  const double drop = 80.0;
  double lo = best_u, hi = best_u;
  while (lo > -kScanLim - 4.0 && g(lo) > best - drop) lo -= 1.0;
  while (hi < kScanLim + 4.0 && g(hi) > best - drop) hi += 1.0;
  return log_integrate(g, lo, hi, rel_tol);
}

}  // namespace mpcn
