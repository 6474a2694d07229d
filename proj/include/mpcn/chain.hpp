#pragma once

// The Metropolis-Hastings step and chain driver. A chain is single-threaded
// by contract; run several chains in parallel by giving each its own
// RngStream. Kernel and target objects are shared read-only.

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mpcn/diagnostics.hpp"
#include "mpcn/kernels.hpp"
#include "mpcn/rng.hpp"
#include "mpcn/targets.hpp"

namespace mpcn {

struct StepOutcome {
  ChainState state;
  std::vector<double> proposed;
  bool accepted = false;
  double log_alpha = 0.0;  // min(0, .) or -inf on a non-finite proposal
};

namespace detail {

struct StepResult {
  bool accepted;
  double log_alpha;
  bool nonfinite;
};

// One MH transition. The proposal buffer y is filled by the kernel; on
// acceptance state.x and y are swapped and the caches refreshed. The uniform
// acceptance variate is always drawn after log_alpha so that alpha = 1 steps
// consume exactly the same randomness as alpha < 1 steps.
inline StepResult mh_step_inplace(ChainState& state, const ProposalKernel& k,
                                  const Target& target, RngStream& rng,
                                  std::vector<double>& y) {
  const double log_correction = propose_into(k, state.x, rng, y);
  const double log_target_y = target.log_density_unnorm(y);
  double log_alpha;
  bool nonfinite = false;
  if (!std::isfinite(log_target_y) || !std::isfinite(log_correction)) {
    // Off-support or overflowed proposal: reject, never crash.
    log_alpha = -std::numeric_limits<double>::infinity();
    nonfinite = true;
  } else {
    log_alpha =
        std::min(0.0, (log_target_y - state.log_target) + log_correction);
  }
  const double u = rng.uniform01();
  const bool accepted = std::log(u) < log_alpha;
  if (accepted) {
    state.x.swap(y);
    state.log_target = log_target_y;
    state.log_radial =
        0.5 * static_cast<double>(state.x.size()) * log_norm_sq(state.x);
  }
  return {accepted, log_alpha, nonfinite};
}

}  // namespace detail

inline StepOutcome mh_step(const ChainState& state, const ProposalKernel& k,
                           const Target& target, RngStream& rng) {
  StepOutcome out;
  out.state = state;
  std::vector<double> y;
  const auto r = detail::mh_step_inplace(out.state, k, target, rng, y);
  out.accepted = r.accepted;
  out.log_alpha = r.log_alpha;
  // On acceptance the pre-step position was swapped into y.
  out.proposed = r.accepted ? out.state.x : y;
  return out;
}

struct RecordSpec {
  RadialMode radial_mode = RadialMode::plain;
  bool radial = true;
  bool coord1 = true;
  bool accepted = true;
  bool proposal_radial = false;  // plain radial of every proposed point
  bool alpha = false;            // acceptance probability of every step
  bool full_path = false;
  // Radial statistics are computed on x - center (empty center = origin).
  std::vector<double> center;
  // Added to the recorded first coordinate (reporting frame offset).
  double coord_offset = 0.0;
};

struct ChainMeta {
  int d = 0;
  std::string kernel;
  std::string target;
  double rho_or_sigma = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  long steps = 0;
  long accepted_count = 0;
  long nonfinite_proposals = 0;
};

struct ChainTrace {
  std::vector<double> radial;
  std::vector<double> coord1;
  std::vector<double> proposal_radial;
  std::vector<double> alpha;
  std::vector<std::uint8_t> accepted;
  std::vector<std::vector<double>> path;
  double initial_radial = 0.0;  // radial statistic of x0, same mode/center
  std::vector<double> final_state;
  ChainMeta meta;
};

namespace detail {

inline double recentered_radial(std::span<const double> x,
                                std::span<const double> center,
                                RadialMode mode, std::vector<double>& scratch) {
  if (center.empty()) return radial_stat(x, mode);
  scratch.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) scratch[i] = x[i] - center[i];
  return radial_stat(scratch, mode);
}

}  // namespace detail

// Drive M Metropolis-Hastings steps, streaming the recorded functionals.
// Only the requested series are stored; full d-dimensional paths are kept
// only when asked.
inline ChainTrace run_chain(std::vector<double> x0, const ProposalKernel& k,
                            const Target& target, long steps, RngStream& rng,
                            const RecordSpec& rec = {}) {
  if (steps < 0) throw std::invalid_argument("run_chain: steps must be >= 0");
  if (!rec.center.empty() &&
      rec.center.size() != static_cast<std::size_t>(target.dim))
    throw std::invalid_argument("run_chain: center dimension mismatch");
  ChainState state = make_state(std::move(x0), target);
  if ((k.kind == KernelKind::mpcn ||
       (k.kind == KernelKind::mpcn_general && k.nu_bar == 0.0)) &&
      !(norm_sq(state.x) > 0.0))
    throw std::domain_error("run_chain: mpcn chain must not start at 0");
  if (!std::isfinite(state.log_target))
    throw std::domain_error("run_chain: x0 outside the target support");

  ChainTrace trace;
  trace.meta.d = target.dim;
  trace.meta.kernel = kernel_kind_name(k.kind);
  trace.meta.target = target.name;
  trace.meta.rho_or_sigma =
      (k.kind == KernelKind::rwm_gauss || k.kind == KernelKind::rwm_t)
          ? k.sigma_d
          : k.rho;
  trace.meta.seed = rng.seed();
  trace.meta.stream = rng.stream_id();
  trace.meta.steps = steps;

  std::vector<double> scratch;
  trace.initial_radial =
      detail::recentered_radial(state.x, rec.center, rec.radial_mode, scratch);
  if (rec.radial) trace.radial.reserve(steps);
  if (rec.coord1) trace.coord1.reserve(steps);
  if (rec.accepted) trace.accepted.reserve(steps);
  if (rec.proposal_radial) trace.proposal_radial.reserve(steps);
  if (rec.alpha) trace.alpha.reserve(steps);

  std::vector<double> y;
  for (long m = 0; m < steps; ++m) {
    const auto r = detail::mh_step_inplace(state, k, target, rng, y);
    trace.meta.accepted_count += r.accepted ? 1 : 0;
    trace.meta.nonfinite_proposals += r.nonfinite ? 1 : 0;
    if (rec.radial)
      trace.radial.push_back(detail::recentered_radial(
          state.x, rec.center, rec.radial_mode, scratch));
    if (rec.coord1) trace.coord1.push_back(state.x[0] + rec.coord_offset);
    if (rec.accepted) trace.accepted.push_back(r.accepted ? 1 : 0);
    if (rec.proposal_radial) {
      // On acceptance the proposal now lives in state.x.
      std::span<const double> prop = r.accepted ? state.x : y;
      trace.proposal_radial.push_back(detail::recentered_radial(
          prop, rec.center, RadialMode::plain, scratch));
    }
    if (rec.alpha || rec.full_path) {
      if (rec.alpha) trace.alpha.push_back(std::exp(r.log_alpha));
      if (rec.full_path) trace.path.emplace_back(state.x.begin(), state.x.end());
    }
  }
  trace.final_state = state.x;
  return trace;
}

}  // namespace mpcn
