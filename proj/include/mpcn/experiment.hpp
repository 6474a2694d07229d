#pragma once

// Config-driven experiment harness: single runs with CSV emission, the
// shift-sensitivity study with optional pilot peak estimation, the
// dimension-scaling study, and the diffusion-limit comparison. Every emitted
// CSV embeds the full configuration as a header comment and re-running with
// an identical configuration reproduces the file body byte for byte.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mpcn/chain.hpp"
#include "mpcn/csv.hpp"
#include "mpcn/diagnostics.hpp"
#include "mpcn/kernels.hpp"
#include "mpcn/sde.hpp"
#include "mpcn/targets.hpp"

namespace mpcn {

struct ConfigError : std::runtime_error {
  std::string field;
  ConfigError(std::string field_, const std::string& msg)
      : std::runtime_error("config error in '" + field_ + "': " + msg),
        field(std::move(field_)) {}
};

struct ExperimentConfig {
  std::string algorithm = "mpcn";  // rwm_gauss | rwm_t | pcn | mpcn | mpcn_general
  double rho = 0.8;
  double sigma_d = 0.0;  // random-walk step scale; 0 -> 1/sqrt(d)
  double df = 2.0;       // rwm_t proposal degrees of freedom
  double nu_bar = 1.0;   // mpcn_general
  std::string target = "student_t";  // gaussian | student_t | perturbed_t
  double sigma = 1.0;
  double nu = 2.0;
  int d = 20;
  long steps = 100000;
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
  std::string init = "std_normal";  // std_normal | exact_target | explicit
  std::vector<double> init_x;
  bool record_radial = true;
  bool record_coord1 = true;
  bool record_path = false;
  double xi = 0.0;        // target shift along the all-ones direction
  long pilot_steps = 0;   // > 0 enables pilot peak estimation
  long max_lag = 2000;
  std::string output_dir = ".";
  std::string label = "run";
};

namespace detail {

inline std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_double(v[i]);
  }
  return s;
}

inline std::vector<double> split_doubles(const std::string& s,
                                         const std::string& field) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t end = s.find(',', pos);
    if (end == std::string::npos) end = s.size();
    const std::string tok = s.substr(pos, end - pos);
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{}) throw ConfigError(field, "bad number '" + tok + "'");
    out.push_back(v);
    pos = end + 1;
  }
  return out;
}

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  std::size_t b = s.find_last_not_of(" \t\r");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

}  // namespace detail

inline std::vector<std::pair<std::string, std::string>> config_kv(
    const ExperimentConfig& c) {
  return {
      {"algorithm", c.algorithm},
      {"rho", format_double(c.rho)},
      {"sigma_d", format_double(c.sigma_d)},
      {"df", format_double(c.df)},
      {"nu_bar", format_double(c.nu_bar)},
      {"target", c.target},
      {"sigma", format_double(c.sigma)},
      {"nu", format_double(c.nu)},
      {"d", std::to_string(c.d)},
      {"steps", std::to_string(c.steps)},
      {"seed", std::to_string(c.seed)},
      {"stream", std::to_string(c.stream)},
      {"init", c.init},
      {"init_x", detail::join_doubles(c.init_x)},
      {"record_radial", c.record_radial ? "true" : "false"},
      {"record_coord1", c.record_coord1 ? "true" : "false"},
      {"record_path", c.record_path ? "true" : "false"},
      {"xi", format_double(c.xi)},
      {"pilot_steps", std::to_string(c.pilot_steps)},
      {"max_lag", std::to_string(c.max_lag)},
      {"output_dir", c.output_dir},
      {"label", c.label},
  };
}

inline std::string serialize_config(const ExperimentConfig& c) {
  std::string out;
  for (const auto& [k, v] : config_kv(c)) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  }
  return out;
}

inline void apply_config_entry(ExperimentConfig& c, const std::string& key,
                               const std::string& value) {
  const auto as_double = [&](const char* f) {
    double v = 0.0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
      throw ConfigError(f, "bad number '" + value + "'");
    return v;
  };
  const auto as_long = [&](const char* f) {
    long v = 0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
      throw ConfigError(f, "bad integer '" + value + "'");
    return v;
  };
  const auto as_u64 = [&](const char* f) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
      throw ConfigError(f, "bad integer '" + value + "'");
    return v;
  };
  const auto as_bool = [&](const char* f) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError(f, "bad boolean '" + value + "'");
  };
  if (key == "algorithm") c.algorithm = value;
  else if (key == "rho") c.rho = as_double("rho");
  else if (key == "sigma_d") c.sigma_d = as_double("sigma_d");
  else if (key == "df") c.df = as_double("df");
  else if (key == "nu_bar") c.nu_bar = as_double("nu_bar");
  else if (key == "target") c.target = value;
  else if (key == "sigma") c.sigma = as_double("sigma");
  else if (key == "nu") c.nu = as_double("nu");
  else if (key == "d") c.d = static_cast<int>(as_long("d"));
  else if (key == "steps") c.steps = as_long("steps");
  else if (key == "seed") c.seed = as_u64("seed");
  else if (key == "stream") c.stream = as_u64("stream");
  else if (key == "init") c.init = value;
  else if (key == "init_x") c.init_x = detail::split_doubles(value, "init_x");
  else if (key == "record_radial") c.record_radial = as_bool("record_radial");
  else if (key == "record_coord1") c.record_coord1 = as_bool("record_coord1");
  else if (key == "record_path") c.record_path = as_bool("record_path");
  else if (key == "xi") c.xi = as_double("xi");
  else if (key == "pilot_steps") c.pilot_steps = as_long("pilot_steps");
  else if (key == "max_lag") c.max_lag = as_long("max_lag");
  else if (key == "output_dir") c.output_dir = value;
  else if (key == "label") c.label = value;
  else throw ConfigError(key, "unknown key");
}

// Parse "key = value" lines. A single leading '#' is stripped, so embedded
// CSV headers parse directly; lines starting with "##" are annotations and
// are skipped. Round-trips serialize_config losslessly.
inline ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') line = line.substr(1);
    line = detail::trim(line);
    if (!line.empty() && line[0] == '#') continue;
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) continue;
    apply_config_entry(c, key, value);
  }
  return c;
}

inline ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config", "cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

inline void validate_config(const ExperimentConfig& c) {
  static const std::vector<std::string> kAlgorithms{
      "rwm_gauss", "rwm_t", "pcn", "mpcn", "mpcn_general"};
  static const std::vector<std::string> kTargets{"gaussian", "student_t",
                                                 "perturbed_t"};
  if (std::find(kAlgorithms.begin(), kAlgorithms.end(), c.algorithm) ==
      kAlgorithms.end())
    throw ConfigError("algorithm", "unknown algorithm '" + c.algorithm + "'");
  if (std::find(kTargets.begin(), kTargets.end(), c.target) == kTargets.end())
    throw ConfigError("target", "unknown target '" + c.target + "'");
  if (c.d < 1) throw ConfigError("d", "must be >= 1");
  if (c.target == "perturbed_t" && c.d != 20)
    throw ConfigError("d", "perturbed_t is defined for d = 20");
  if (c.steps < 0) throw ConfigError("steps", "must be >= 0");
  if (!(c.rho > 0.0 && c.rho < 1.0)) throw ConfigError("rho", "must be in (0,1)");
  if (c.sigma_d < 0.0) throw ConfigError("sigma_d", "must be >= 0");
  if (!(c.df > 0.0)) throw ConfigError("df", "must be > 0");
  if (c.nu_bar < 0.0) throw ConfigError("nu_bar", "must be >= 0");
  if (!(c.sigma > 0.0)) throw ConfigError("sigma", "must be > 0");
  if (!(c.nu > 0.0)) throw ConfigError("nu", "must be > 0");
  if (c.pilot_steps < 0) throw ConfigError("pilot_steps", "must be >= 0");
  if (c.max_lag < 1) throw ConfigError("max_lag", "must be >= 1");
  if (c.init != "std_normal" && c.init != "exact_target" && c.init != "explicit")
    throw ConfigError("init", "unknown init '" + c.init + "'");
  if (c.init == "explicit" && static_cast<int>(c.init_x.size()) != c.d)
    throw ConfigError("init_x", "explicit init needs exactly d values");
  if (c.init == "exact_target" && c.target == "perturbed_t")
    throw ConfigError("init", "perturbed_t has no exact sampler");
}

inline Target build_base_target(const ExperimentConfig& c) {
  validate_config(c);
  if (c.target == "gaussian") return target_gaussian(c.d, c.sigma);
  if (c.target == "student_t") return target_student_t(c.d, c.nu, c.sigma);
  return target_perturbed_t();
}

// The target the chain actually runs on: base target, shifted by xi, then
// recentered by the pilot estimate xi_hat (empty = no peak bookkeeping).
inline Target build_run_target(const ExperimentConfig& c,
                               const std::vector<double>& xi_hat) {
  Target t = build_base_target(c);
  if (c.xi != 0.0) t = target_shifted(std::move(t), c.xi);
  if (xi_hat.empty()) return t;
  if (xi_hat.size() != static_cast<std::size_t>(c.d))
    throw ConfigError("pilot_steps", "xi_hat dimension mismatch");
  Target r;
  r.dim = t.dim;
  r.name = t.name;
  r.log_density_unnorm = [base_f = t.log_density_unnorm,
                          xi_hat](std::span<const double> x) {
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + xi_hat[i];
    return base_f(y);
  };
  if (t.sample_exact) {
    r.sample_exact = [base_s = t.sample_exact, xi_hat](RngStream& rng,
                                                       std::span<double> out) {
      base_s(rng, out);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] -= xi_hat[i];
    };
  }
  return r;
}

inline ProposalKernel build_kernel(const ExperimentConfig& c) {
  validate_config(c);
  const double sigma_d =
      c.sigma_d > 0.0 ? c.sigma_d : 1.0 / std::sqrt(static_cast<double>(c.d));
  if (c.algorithm == "rwm_gauss") return ProposalKernel::rwm_gauss(sigma_d);
  if (c.algorithm == "rwm_t") return ProposalKernel::rwm_t(sigma_d, c.df);
  if (c.algorithm == "pcn") return ProposalKernel::pcn(c.rho);
  if (c.algorithm == "mpcn") return ProposalKernel::mpcn(c.rho);
  return ProposalKernel::mpcn_general(c.rho, c.nu_bar);
}

namespace detail {

inline std::uint64_t pilot_stream_id(std::uint64_t stream) {
  return stream ^ 0x8000000000000000ULL;
}

inline std::vector<double> initial_point(const ExperimentConfig& c,
                                         const Target& run_target,
                                         RngStream& rng) {
  if (c.init == "explicit") return c.init_x;
  if (c.init == "exact_target") {
    if (!run_target.sample_exact)
      throw ConfigError("init", "target has no exact sampler");
    std::vector<double> x(c.d);
    run_target.sample_exact(rng, x);
    return x;
  }
  return sample_std_normal_vec(c.d, rng);
}

}  // namespace detail

// Pilot-run peak estimate within a total budget of pilot_steps MCMC steps.
//
// The pilot always uses the MpCN kernel (its scale-adapting proposal reaches
// a displaced high-probability region quickly, where a pCN pilot stalls
// partway) and refines in two half-length stages: a first chain-average
// locates the peak roughly, a second chain on the recentered target, where
// the sampler already mixes at its unshifted rate, measures the remainder.
// Each stage averages the second half of its trajectory so the approach
// transient from the N(0, I) start does not bias the estimate. The main run
// then targets the recentered density and reports in original coordinates.
inline std::vector<double> estimate_peak(const ExperimentConfig& cfg,
                                         long pilot_steps) {
  if (pilot_steps < 1) throw ConfigError("pilot_steps", "must be >= 1");
  const ProposalKernel kernel = ProposalKernel::mpcn(cfg.rho);
  RngStream rng(cfg.seed, detail::pilot_stream_id(cfg.stream));
  std::vector<double> xi_hat(cfg.d, 0.0);
  bool recentered = false;
  const long stage_steps[2] = {pilot_steps / 2, pilot_steps - pilot_steps / 2};
  std::vector<double> y;
  for (int stage = 0; stage < 2; ++stage) {
    const long steps = stage_steps[stage];
    if (steps < 1) continue;
    const Target t = build_run_target(
        cfg, recentered ? xi_hat : std::vector<double>{});
    ChainState state = make_state(sample_std_normal_vec(cfg.d, rng), t);
    std::vector<double> sum(cfg.d, 0.0);
    const long burn = steps / 2;
    for (long m = 0; m < steps; ++m) {
      if (m >= burn)
        for (int i = 0; i < cfg.d; ++i) sum[i] += state.x[i];
      detail::mh_step_inplace(state, kernel, t, rng, y);
    }
    for (int i = 0; i < cfg.d; ++i)
      xi_hat[i] += sum[i] / static_cast<double>(steps - burn);
    recentered = true;
  }
  return xi_hat;
}

struct RunSummary {
  double acceptance_rate = 0.0;
  double iat_radial = 0.0;
  double iat_coord1 = 0.0;
  long longest_reject_run = 0;
  bool iat_reliable = true;
  std::vector<double> xi_hat;  // empty when peak estimation was off
};

struct RunResult {
  ChainTrace trace;
  RunSummary summary;
  std::filesystem::path summary_path;
  std::filesystem::path acf_path;
};

// Core run: chain + diagnostics + CSV emission. xi_hat empty means no peak
// bookkeeping; a zero vector applies the bookkeeping with a null estimate
// (the two must report identical statistics).
inline RunResult run_experiment_core(const ExperimentConfig& cfg,
                                     const std::vector<double>& xi_hat,
                                     bool write_files) {
  const Target run_target = build_run_target(cfg, xi_hat);
  const ProposalKernel kernel = build_kernel(cfg);
  RngStream rng(cfg.seed, cfg.stream);

  RecordSpec rec;
  rec.radial_mode = cfg.target == "gaussian" ? RadialMode::gaussian_centered
                                             : RadialMode::plain;
  rec.radial = cfg.record_radial;
  rec.coord1 = cfg.record_coord1;
  rec.full_path = cfg.record_path;
  // Radial statistics are taken about the true shift, in chain coordinates.
  if (cfg.xi != 0.0 || !xi_hat.empty()) {
    rec.center.assign(cfg.d, 0.0);
    for (int i = 0; i < cfg.d; ++i)
      rec.center[i] = cfg.xi - (xi_hat.empty() ? 0.0 : xi_hat[i]);
    bool all_zero = true;
    for (double v : rec.center) all_zero = all_zero && v == 0.0;
    if (all_zero) rec.center.clear();
    rec.coord_offset = xi_hat.empty() ? 0.0 : xi_hat[0];
  }

  RunResult out;
  const std::vector<double> x0 = detail::initial_point(cfg, run_target, rng);
  out.trace = run_chain(x0, kernel, run_target, cfg.steps, rng, rec);
  out.trace.meta.target = cfg.target;
  out.summary.xi_hat = xi_hat;

  if (cfg.steps > 0) {
    const auto stuck = stuck_statistics(out.trace.accepted);
    out.summary.acceptance_rate = stuck.acceptance_rate;
    out.summary.longest_reject_run = stuck.longest_reject_run;
    bool reliable = true;
    if (cfg.record_radial && cfg.steps >= 10) {
      const auto iat = iat_with_thinning(out.trace.radial, cfg.max_lag);
      out.summary.iat_radial = iat.iat;
      reliable = reliable && iat.reliable && iat.iat <= cfg.steps / 50.0;
    }
    if (cfg.record_coord1 && cfg.steps >= 10) {
      const auto iat = iat_with_thinning(out.trace.coord1, cfg.max_lag);
      out.summary.iat_coord1 = iat.iat;
      reliable = reliable && iat.reliable && iat.iat <= cfg.steps / 50.0;
    }
    out.summary.iat_reliable = reliable;
  }

  if (write_files) {
    const std::filesystem::path dir(cfg.output_dir);
    std::filesystem::create_directories(dir);
    const auto config_lines = [&](CsvBuilder& b) {
      for (const auto& [k, v] : config_kv(cfg)) b.comment(k + " = " + v);
    };

    CsvBuilder summary;
    config_lines(summary);
    summary.raw_line(
        "algorithm,target,d,rho_or_sigma,M,seed,acceptance_rate,iat_radial,"
        "iat_coord1,longest_reject_run");
    summary.row(cfg.algorithm, cfg.target, cfg.d,
                out.trace.meta.rho_or_sigma, cfg.steps, cfg.seed,
                out.summary.acceptance_rate, out.summary.iat_radial,
                out.summary.iat_coord1, out.summary.longest_reject_run);
    out.summary_path = dir / (cfg.label + "_summary.csv");
    summary.write(out.summary_path);

    if (cfg.record_radial && cfg.record_coord1 && cfg.steps >= 2) {
      try {
        const long lag = std::min(cfg.max_lag, cfg.steps - 1);
        const auto acf_r = autocorrelation(out.trace.radial, lag);
        const auto acf_c = autocorrelation(out.trace.coord1, lag);
        CsvBuilder acf;
        config_lines(acf);
        acf.raw_line("lag,acf_radial,acf_coord1");
        for (long k = 0; k <= lag; ++k) acf.row(k, acf_r[k], acf_c[k]);
        out.acf_path = dir / (cfg.label + "_acf.csv");
        acf.write(out.acf_path);
      } catch (const std::domain_error&) {
        // A fully stuck chain has constant series; there is no ACF to emit.
      }
    }
  }
  return out;
}

inline RunResult run_experiment(const ExperimentConfig& cfg,
                                bool write_files = true) {
  validate_config(cfg);
  std::vector<double> xi_hat;
  if (cfg.pilot_steps > 0) xi_hat = estimate_peak(cfg, cfg.pilot_steps);
  return run_experiment_core(cfg, xi_hat, write_files);
}

// ---------------------------------------------------------------------------
// Shift-sensitivity study
// ---------------------------------------------------------------------------

struct ShiftStudyRow {
  std::string algorithm;
  double xi = 0.0;
  bool peak_estimation = false;
  double acceptance_rate = 0.0;
  double iat_radial = 0.0;
  double iat_coord1 = 0.0;
  long longest_reject_run = 0;
};

struct ShiftStudyResult {
  std::vector<ShiftStudyRow> rows;
  std::filesystem::path table_path;
};

// For each shift xi, run pCN and MpCN with and without pilot peak estimation
// and tabulate the IATs. Streams are derived per cell from the base stream.
inline ShiftStudyResult run_shift_study(const ExperimentConfig& base,
                                        const std::vector<double>& xis,
                                        bool write_files = true) {
  validate_config(base);
  if (base.target != "gaussian" && base.target != "student_t")
    throw ConfigError("target", "shift study needs gaussian or student_t");
  if (xis.empty()) throw ConfigError("xi", "no shift values given");
  const long pilot = base.pilot_steps > 0 ? base.pilot_steps : 1000;

  ShiftStudyResult out;
  std::uint64_t cell = 0;
  for (const std::string& alg : {std::string("pcn"), std::string("mpcn")}) {
    for (const bool peak : {false, true}) {
      for (const double xi : xis) {
        ExperimentConfig cfg = base;
        cfg.algorithm = alg;
        cfg.xi = xi;
        cfg.pilot_steps = peak ? pilot : 0;
        cfg.stream = base.stream + cell;
        ++cell;
        const RunResult r = run_experiment(cfg, /*write_files=*/false);
        out.rows.push_back({alg, xi, peak, r.summary.acceptance_rate,
                            r.summary.iat_radial, r.summary.iat_coord1,
                            r.summary.longest_reject_run});
      }
    }
  }

  if (write_files) {
    CsvBuilder b;
    for (const auto& [k, v] : config_kv(base)) b.comment(k + " = " + v);
    b.comment("# xis = " + detail::join_doubles(xis));
    b.comment("# pilot_steps_effective = " + std::to_string(pilot));
    b.raw_line(
        "algorithm,xi,peak_estimation,acceptance_rate,iat_radial,iat_coord1,"
        "longest_reject_run");
    for (const auto& r : out.rows)
      b.row(r.algorithm, r.xi, r.peak_estimation ? "true" : "false",
            r.acceptance_rate, r.iat_radial, r.iat_coord1,
            r.longest_reject_run);
    out.table_path =
        std::filesystem::path(base.output_dir) / (base.label + "_shift_iat.csv");
    b.write(out.table_path);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dimension-scaling study
// ---------------------------------------------------------------------------

struct ScalingConfig {
  std::vector<std::string> algorithms{"mpcn", "rwm_gauss", "pcn"};
  std::string target = "student_t";
  double sigma = 5.0;
  double nu = 2.0;
  double rho = 0.8;
  double sigma_d = 0.0;  // 0 -> 1/sqrt(d)
  double df = 2.0;
  std::vector<int> dims{8, 16, 32, 64};
  long steps_base = 4000;  // steps at dimension d: steps_base * d^(3/2)
  // Extra budget factor for the random-walk algorithms, whose radial IATs on
  // the heavy-tailed target run two orders of magnitude above MpCN's; without
  // it every rwm cell trips the steps/50 reliability gate.
  double rwm_steps_factor = 25.0;
  int replications = 5;
  std::uint64_t seed = 1;
  long max_lag = 2000;
  std::string output_dir = ".";
  std::string label = "scaling";
};

inline long scaling_steps_at(const ScalingConfig& c, const std::string& algorithm,
                             int d) {
  double steps = static_cast<double>(c.steps_base) *
                 std::pow(static_cast<double>(d), 1.5);
  if (algorithm.rfind("rwm", 0) == 0) steps *= c.rwm_steps_factor;
  return static_cast<long>(std::lround(steps));
}

struct ScalingCell {
  std::string algorithm;
  int d = 0;
  int replication = 0;
  double iat = 0.0;
  bool reliable = true;
  double acceptance_rate = 0.0;
  long longest_reject_run = 0;
};

struct ScalingAlgorithmSummary {
  std::string algorithm;
  std::vector<double> median_iat;  // per dim
  SlopeFit fit;
  double loo_max_delta = 0.0;  // leave-one-replication-out slope stability
  bool stable = true;
  int unreliable_cells = 0;
};

struct ScalingResult {
  std::vector<ScalingCell> cells;
  std::vector<ScalingAlgorithmSummary> summaries;
  std::filesystem::path scaling_path, slopes_path, stuck_path;
};

namespace detail {

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

// Median radial-statistic IAT per (algorithm, d) over independent
// replications, log-log slope per algorithm, and stuck statistics. Cells
// whose IAT exceeds steps/50 are flagged unreliable: their IAT is written as
// nan and they are excluded from the medians.
inline ScalingResult run_scaling_study(const ScalingConfig& cfg,
                                       bool write_files = true) {
  if (cfg.dims.size() < 3) throw ConfigError("dims", "need >= 3 dimensions");
  if (cfg.replications < 3)
    throw ConfigError("replications", "need >= 3 replications");
  ScalingResult out;

  std::uint64_t stream = 0;
  for (const std::string& alg : cfg.algorithms) {
    std::vector<std::vector<double>> iats_by_dim(cfg.dims.size());
    std::vector<std::vector<double>> iats_by_dim_rep(cfg.dims.size());
    int unreliable = 0;
    for (std::size_t di = 0; di < cfg.dims.size(); ++di) {
      const int d = cfg.dims[di];
      const long steps = scaling_steps_at(cfg, alg, d);
      iats_by_dim_rep[di].assign(cfg.replications,
                                 std::numeric_limits<double>::quiet_NaN());
      for (int rep = 0; rep < cfg.replications; ++rep) {
        ExperimentConfig e;
        e.algorithm = alg;
        e.target = cfg.target;
        e.sigma = cfg.sigma;
        e.nu = cfg.nu;
        e.rho = cfg.rho;
        e.sigma_d = cfg.sigma_d;
        e.df = cfg.df;
        e.d = d;
        e.steps = steps;
        e.seed = cfg.seed;
        e.stream = stream++;
        e.record_coord1 = false;
        e.max_lag = cfg.max_lag;
        const RunResult r = run_experiment(e, /*write_files=*/false);
        ScalingCell cell;
        cell.algorithm = alg;
        cell.d = d;
        cell.replication = rep;
        cell.acceptance_rate = r.summary.acceptance_rate;
        cell.longest_reject_run = r.summary.longest_reject_run;
        // iat_reliable covers both the steps/50 bound and the estimator's own
        // window-termination flag.
        cell.reliable = r.summary.iat_reliable;
        cell.iat = cell.reliable ? r.summary.iat_radial
                                 : std::numeric_limits<double>::quiet_NaN();
        out.cells.push_back(cell);
        if (cell.reliable) {
          iats_by_dim[di].push_back(r.summary.iat_radial);
          iats_by_dim_rep[di][rep] = r.summary.iat_radial;
        } else {
          ++unreliable;
        }
      }
    }

    ScalingAlgorithmSummary s;
    s.algorithm = alg;
    s.unreliable_cells = unreliable;
    bool fit_ok = true;
    std::vector<double> dims_d;
    for (std::size_t di = 0; di < cfg.dims.size(); ++di) {
      if (iats_by_dim[di].empty()) {
        fit_ok = false;
        continue;
      }
      dims_d.push_back(static_cast<double>(cfg.dims[di]));
      s.median_iat.push_back(detail::median(iats_by_dim[di]));
    }
    if (fit_ok && dims_d.size() >= 3) {
      s.fit = scaling_slope(dims_d, s.median_iat);
      // Stability gate: removing any single replication must move the slope
      // by less than 0.2.
      for (int rep = 0; rep < cfg.replications; ++rep) {
        std::vector<double> med, dd;
        for (std::size_t di = 0; di < cfg.dims.size(); ++di) {
          std::vector<double> v;
          for (int r2 = 0; r2 < cfg.replications; ++r2) {
            if (r2 == rep) continue;
            const double val = iats_by_dim_rep[di][r2];
            if (!std::isnan(val)) v.push_back(val);
          }
          if (v.empty()) continue;
          dd.push_back(static_cast<double>(cfg.dims[di]));
          med.push_back(detail::median(v));
        }
        if (dd.size() >= 3) {
          const auto f = scaling_slope(dd, med);
          s.loo_max_delta =
              std::max(s.loo_max_delta, std::abs(f.slope - s.fit.slope));
        }
      }
      s.stable = s.loo_max_delta < 0.2;
    } else {
      s.stable = false;
    }
    out.summaries.push_back(std::move(s));
  }

  if (write_files) {
    const std::filesystem::path dir(cfg.output_dir);
    const auto study_header = [&](CsvBuilder& b) {
      std::string algs;
      for (std::size_t i = 0; i < cfg.algorithms.size(); ++i)
        algs += (i ? "," : "") + cfg.algorithms[i];
      std::string dims;
      for (std::size_t i = 0; i < cfg.dims.size(); ++i)
        dims += (i ? "," : "") + std::to_string(cfg.dims[i]);
      b.comment("algorithms = " + algs);
      b.comment("target = " + cfg.target);
      b.comment("sigma = " + format_double(cfg.sigma));
      b.comment("nu = " + format_double(cfg.nu));
      b.comment("rho = " + format_double(cfg.rho));
      b.comment("sigma_d = " + format_double(cfg.sigma_d));
      b.comment("df = " + format_double(cfg.df));
      b.comment("dims = " + dims);
      b.comment("steps_base = " + std::to_string(cfg.steps_base));
      b.comment("rwm_steps_factor = " + format_double(cfg.rwm_steps_factor));
      b.comment("replications = " + std::to_string(cfg.replications));
      b.comment("seed = " + std::to_string(cfg.seed));
      b.comment("max_lag = " + std::to_string(cfg.max_lag));
      b.comment("label = " + cfg.label);
    };

    CsvBuilder scaling;
    study_header(scaling);
    scaling.raw_line("algorithm,d,replication,iat");
    for (const auto& c : out.cells)
      scaling.row(c.algorithm, c.d, c.replication, c.iat);
    out.scaling_path = dir / (cfg.label + ".csv");
    scaling.write(out.scaling_path);

    CsvBuilder slopes;
    study_header(slopes);
    slopes.raw_line("algorithm,slope,r_squared,loo_max_delta,stable,unreliable_cells");
    for (const auto& s : out.summaries)
      slopes.row(s.algorithm, s.fit.slope, s.fit.r_squared, s.loo_max_delta,
                 s.stable ? "true" : "false", s.unreliable_cells);
    out.slopes_path = dir / (cfg.label + "_slopes.csv");
    slopes.write(out.slopes_path);

    CsvBuilder stuck;
    study_header(stuck);
    stuck.raw_line("algorithm,d,replication,acceptance_rate,longest_reject_run");
    for (const auto& c : out.cells)
      stuck.row(c.algorithm, c.d, c.replication, c.acceptance_rate,
                c.longest_reject_run);
    out.stuck_path = dir / (cfg.label + "_stuck.csv");
    stuck.write(out.stuck_path);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Diffusion-limit comparison
// ---------------------------------------------------------------------------

struct SdeCompareConfig {
  double nu = 2.0;
  double sigma = 5.0;
  double rho = 0.8;
  int d = 100;
  long steps = 1000000;
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
  double dt = 1e-3;
  long em_steps = 10000000;
  int n_bins = 30;
  long min_count = 200;
  std::string output_dir = ".";
  std::string label = "sde";
};

struct SdeCompareResult {
  TripletEstimate triplet;
  std::vector<double> a_closed, b_closed;
  double em_median = 0.0;
  std::filesystem::path triplet_path, summary_path;
};

// Stationary-start MpCN run on the t scale mixture, binned radial increment
// moments against the closed-form diffusion coefficients, and the long-run
// Euler-Maruyama median of that diffusion.
inline SdeCompareResult sde_compare(const SdeCompareConfig& cfg,
                                    bool write_files = true) {
  if (cfg.d < 3) throw ConfigError("d", "need d >= 3");
  const Target target = target_student_t(cfg.d, cfg.nu, cfg.sigma);
  const DiffusionSpec spec = diffusion_from_target(target, cfg.rho);
  RngStream rng(cfg.seed, cfg.stream);

  RecordSpec rec;
  rec.radial_mode = RadialMode::plain;
  rec.coord1 = false;
  rec.proposal_radial = true;
  rec.alpha = true;
  std::vector<double> x0(cfg.d);
  target.sample_exact(rng, x0);
  const ChainTrace trace = run_chain(x0, ProposalKernel::mpcn(cfg.rho), target,
                                     cfg.steps, rng, rec);

  SdeCompareResult out;
  TripletBins bins;
  bins.n_bins = cfg.n_bins;
  bins.min_count = cfg.min_count;
  out.triplet = empirical_triplet(trace, cfg.d, bins);
  for (double y : out.triplet.bin_centers) {
    out.a_closed.push_back(spec.a(y));
    out.b_closed.push_back(spec.b(y));
  }

  RngStream em_rng(cfg.seed, cfg.stream + 1);
  const double y0 = target.mixing->sample(em_rng);
  std::vector<double> path =
      euler_maruyama(spec, y0, cfg.dt, cfg.em_steps, em_rng);
  out.em_median = detail::median(std::move(path));

  if (write_files) {
    const std::filesystem::path dir(cfg.output_dir);
    const auto header = [&](CsvBuilder& b) {
      b.comment("nu = " + format_double(cfg.nu));
      b.comment("sigma = " + format_double(cfg.sigma));
      b.comment("rho = " + format_double(cfg.rho));
      b.comment("d = " + std::to_string(cfg.d));
      b.comment("steps = " + std::to_string(cfg.steps));
      b.comment("seed = " + std::to_string(cfg.seed));
      b.comment("stream = " + std::to_string(cfg.stream));
      b.comment("dt = " + format_double(cfg.dt));
      b.comment("em_steps = " + std::to_string(cfg.em_steps));
      b.comment("n_bins = " + std::to_string(cfg.n_bins));
      b.comment("min_count = " + std::to_string(cfg.min_count));
      b.comment("label = " + cfg.label);
    };
    CsvBuilder t;
    header(t);
    t.raw_line("bin_center,count,a_hat,a_closed,b_hat,b_closed,c_hat");
    for (std::size_t i = 0; i < out.triplet.bin_centers.size(); ++i)
      t.row(out.triplet.bin_centers[i], out.triplet.counts[i],
            out.triplet.a_hat[i], out.a_closed[i], out.triplet.b_hat[i],
            out.b_closed[i], out.triplet.c_hat[i]);
    out.triplet_path = dir / (cfg.label + "_triplet.csv");
    t.write(out.triplet_path);

    CsvBuilder s;
    header(s);
    s.raw_line("d,steps,dt,em_steps,em_median");
    s.row(cfg.d, cfg.steps, cfg.dt, cfg.em_steps, out.em_median);
    out.summary_path = dir / (cfg.label + "_em_summary.csv");
    s.write(out.summary_path);
  }
  return out;
}

}  // namespace mpcn
