// Command-line experiment harness for the MpCN / pCN / random-walk Metropolis
// sampler library. Subcommands:
//
//   run            one experiment -> summary + autocorrelation CSVs
//   shift-study    pCN/MpCN IAT across target shifts, with and without pilot
//                  peak estimation
//   scaling-study  median IAT per dimension and log-log slopes per algorithm
//   sde-compare    binned radial increment moments of an MpCN chain against
//                  the closed-form limit diffusion, plus an Euler-Maruyama run
//   selftest       fast property checks, one PASS/FAIL line each
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mpcn/experiment.hpp"
#include "mpcn/reversibility.hpp"

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t end = s.find(',', pos);
    if (end == std::string::npos) end = s.size();
    const std::string tok = s.substr(pos, end - pos);
    if (!tok.empty()) out.push_back(tok);
    pos = end + 1;
  }
  return out;
}

std::vector<int> split_ints(const std::string& s, const char* field) {
  std::vector<int> out;
  for (const auto& tok : split_list(s)) {
    try {
      out.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      throw mpcn::ConfigError(field, "bad integer '" + tok + "'");
    }
  }
  return out;
}

// Experiment options are bound to a staging config; after parsing, a config
// file (if any) is loaded first and explicitly-set flags override it. The
// config file format is the same "key = value" block every emitted CSV embeds
// as its header, so a CSV can be replayed directly with --config.
struct ExperimentCli {
  mpcn::ExperimentConfig staged;
  std::string init_x_raw;
  std::string config_path;
  std::vector<std::pair<std::string, CLI::Option*>> options;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path,
                    "key = value file (an emitted CSV header works)");
    const auto opt = [&](const std::string& key, auto& field,
                         const std::string& help) {
      options.emplace_back(key, cmd->add_option("--" + key, field, help));
    };
    opt("algorithm", staged.algorithm,
        "rwm_gauss | rwm_t | pcn | mpcn | mpcn_general");
    opt("rho", staged.rho, "pCN/MpCN autoregression parameter");
    opt("sigma_d", staged.sigma_d, "random-walk step scale (0 = 1/sqrt(d))");
    opt("df", staged.df, "rwm_t proposal degrees of freedom");
    opt("nu_bar", staged.nu_bar, "mpcn_general mixing parameter");
    opt("target", staged.target, "gaussian | student_t | perturbed_t");
    opt("sigma", staged.sigma, "target scale");
    opt("nu", staged.nu, "student_t degrees of freedom");
    opt("d", staged.d, "dimension");
    options.emplace_back(
        "steps", cmd->add_option("--steps,--M", staged.steps, "chain length"));
    opt("seed", staged.seed, "master seed");
    opt("stream", staged.stream, "RNG stream id");
    opt("init", staged.init, "std_normal | exact_target | explicit");
    options.emplace_back("init_x",
                         cmd->add_option("--init_x", init_x_raw,
                                         "comma-separated explicit start"));
    opt("record_radial", staged.record_radial, "record radial series");
    opt("record_coord1", staged.record_coord1, "record first-coordinate series");
    opt("record_path", staged.record_path, "record full paths");
    opt("xi", staged.xi, "target shift along the all-ones direction");
    opt("pilot_steps", staged.pilot_steps,
        "pilot length for peak estimation (0 = off)");
    opt("max_lag", staged.max_lag, "autocorrelation window");
    opt("output_dir", staged.output_dir, "output directory");
    opt("label", staged.label, "output file prefix");
  }

  mpcn::ExperimentConfig resolve() {
    if (!init_x_raw.empty())
      staged.init_x = mpcn::detail::split_doubles(init_x_raw, "init_x");
    if (config_path.empty()) return staged;
    mpcn::ExperimentConfig cfg = mpcn::parse_config_file(config_path);
    const auto staged_kv = mpcn::config_kv(staged);
    for (const auto& [key, option] : options) {
      if (option->count() == 0) continue;
      for (const auto& [k, v] : staged_kv)
        if (k == key) mpcn::apply_config_entry(cfg, k, v);
    }
    return cfg;
  }
};

int run_selftest() {
  using namespace mpcn;
  int failures = 0;
  const auto report = [&](const char* name, bool ok, const std::string& info) {
    std::printf("[%s] %s%s%s\n", ok ? "PASS" : "FAIL", name,
                info.empty() ? "" : " - ", info.c_str());
    failures += ok ? 0 : 1;
  };

  {  // Determinism: identical configs give identical summaries.
    ExperimentConfig c;
    c.target = "student_t";
    c.sigma = 5.0;
    c.d = 10;
    c.steps = 20000;
    c.seed = 101;
    const auto a = run_experiment(c, false);
    const auto b = run_experiment(c, false);
    report("determinism", a.trace.radial == b.trace.radial &&
                              a.trace.accepted == b.trace.accepted,
           "");
  }
  {  // pCN on the standard normal accepts every proposal.
    ExperimentConfig c;
    c.algorithm = "pcn";
    c.target = "gaussian";
    c.sigma = 1.0;
    c.d = 20;
    c.steps = 20000;
    c.seed = 102;
    c.init = "exact_target";
    const auto r = run_experiment(c, false);
    report("pcn_gaussian_always_accepts", r.summary.acceptance_rate == 1.0,
           "acceptance_rate = " + format_double(r.summary.acceptance_rate));
  }
  {  // MpCN acceptance ratio: generic route vs scale-mixture route.
    const auto target = target_student_t(20, 2.0, 5.0);
    RngStream rng(103, 0);
    std::vector<double> x0(20);
    target.sample_exact(rng, x0);
    ChainState s = make_state(x0, target);
    double worst = 0.0;
    for (int i = 0; i < 2000; ++i) {
      const auto p = propose_mpcn(s, 0.8, rng);
      const double lt = target.log_density_unnorm(p.y);
      const double generic = (lt - s.log_target) + p.log_correction;
      const double mixing = mpcn_log_alpha_mixing_form(
          target, radial_stat(s.x, RadialMode::plain),
          radial_stat(p.y, RadialMode::plain));
      worst = std::max(worst, std::abs(generic - mixing));
      if (i % 2 == 0) {
        s.x = p.y;
        s.log_target = lt;
      }
    }
    report("acceptance_ratio_identity", worst < 1e-10,
           "max |difference| = " + format_double(worst));
  }
  {  // Chi-squared scaled-moment identity.
    const double v = chi2_scaled_moment(20, -1);
    report("chi2_scaled_moment", std::abs(v - 10.0 / 9.0) < 1e-12,
           "E[(chi2_20/20)^-1] = " + format_double(v));
  }
  {  // Reversibility statistic and its broken-kernel negative control.
    const auto target = target_student_t(2, 2.0, 5.0);
    const auto f = [](std::span<const double> x) {
      return std::atan(norm_sq(x) / 2.0);
    };
    const auto g = [](std::span<const double> x) {
      return std::atan(norm_sq(x) / 4.0);
    };
    RngStream rng(104, 0);
    const auto ok = detailed_balance_statistic(ProposalKernel::mpcn(0.8),
                                               target, 100000, f, g, rng);
    report("detailed_balance_zero", std::abs(ok.estimate) < 3.0 * ok.std_error,
           "estimate/se = " + format_double(ok.estimate / ok.std_error));
    auto broken = ProposalKernel::mpcn(0.8);
    broken.drop_correction = true;
    RngStream rng2(105, 0);
    const auto bad =
        detailed_balance_statistic(broken, target, 100000, f, g, rng2);
    report("detailed_balance_negative_control",
           std::abs(bad.estimate) > 5.0 * bad.std_error,
           "estimate/se = " + format_double(bad.estimate / bad.std_error));
  }
  {  // Gamma / inverse-gamma duality.
    RngStream rng(106, 0);
    const std::size_t n = 50000;
    std::vector<double> recip(n), direct(n);
    for (auto& v : recip) v = 1.0 / sample_gamma(GammaParams(2.5, 3.0), rng);
    for (auto& v : direct)
      v = sample_inv_gamma(InvGammaParams(2.5, 3.0), rng);
    std::sort(recip.begin(), recip.end());
    std::sort(direct.begin(), direct.end());
    double dstat = 0.0;
    std::size_t i = 0, j = 0;
    while (i < n && j < n) {
      if (recip[i] <= direct[j]) ++i;
      else ++j;
      dstat = std::max(dstat, std::abs(static_cast<double>(i) -
                                       static_cast<double>(j)) /
                                  static_cast<double>(n));
    }
    const double crit = 1.628 * std::sqrt(2.0 / static_cast<double>(n));
    report("gamma_invgamma_duality", dstat < crit,
           "ks = " + format_double(dstat) + ", crit = " + format_double(crit));
  }
  if (failures) std::printf("%d selftest check(s) failed\n", failures);
  return failures ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MpCN sampler experiment harness"};
  app.require_subcommand(1);

  ExperimentCli run_cli;
  auto* run_cmd = app.add_subcommand("run", "Run one experiment");
  run_cli.attach(run_cmd);

  ExperimentCli shift_cli;
  std::string xis_raw = "0,1,2,3,4";
  auto* shift_cmd =
      app.add_subcommand("shift-study", "IAT across target shifts");
  shift_cli.attach(shift_cmd);
  shift_cmd->add_option("--xis", xis_raw, "comma-separated shift values");

  mpcn::ScalingConfig scal_cfg;
  std::string algorithms_raw = "mpcn,rwm_gauss,pcn";
  std::string dims_raw = "8,16,32,64";
  auto* scal_cmd =
      app.add_subcommand("scaling-study", "IAT scaling across dimensions");
  scal_cmd->add_option("--algorithms", algorithms_raw, "comma-separated list");
  scal_cmd->add_option("--target", scal_cfg.target, "gaussian | student_t");
  scal_cmd->add_option("--sigma", scal_cfg.sigma, "target scale");
  scal_cmd->add_option("--nu", scal_cfg.nu, "student_t degrees of freedom");
  scal_cmd->add_option("--rho", scal_cfg.rho, "pCN/MpCN parameter");
  scal_cmd->add_option("--sigma_d", scal_cfg.sigma_d,
                       "random-walk step scale (0 = 1/sqrt(d))");
  scal_cmd->add_option("--dims", dims_raw, "comma-separated dimensions");
  scal_cmd->add_option("--steps_base", scal_cfg.steps_base,
                       "steps at dimension d: steps_base * d^1.5");
  scal_cmd->add_option("--rwm_steps_factor", scal_cfg.rwm_steps_factor,
                       "extra step budget factor for rwm algorithms");
  scal_cmd->add_option("--replications", scal_cfg.replications);
  scal_cmd->add_option("--seed", scal_cfg.seed);
  scal_cmd->add_option("--max_lag", scal_cfg.max_lag);
  scal_cmd->add_option("--output_dir", scal_cfg.output_dir);
  scal_cmd->add_option("--label", scal_cfg.label);

  mpcn::SdeCompareConfig sde_cfg;
  auto* sde_cmd = app.add_subcommand(
      "sde-compare", "Radial increment moments vs the limit diffusion");
  sde_cmd->add_option("--nu", sde_cfg.nu);
  sde_cmd->add_option("--sigma", sde_cfg.sigma);
  sde_cmd->add_option("--rho", sde_cfg.rho);
  sde_cmd->add_option("--d", sde_cfg.d);
  sde_cmd->add_option("--steps,--M", sde_cfg.steps);
  sde_cmd->add_option("--seed", sde_cfg.seed);
  sde_cmd->add_option("--stream", sde_cfg.stream);
  sde_cmd->add_option("--dt", sde_cfg.dt);
  sde_cmd->add_option("--em_steps", sde_cfg.em_steps);
  sde_cmd->add_option("--n_bins", sde_cfg.n_bins);
  sde_cmd->add_option("--min_count", sde_cfg.min_count);
  sde_cmd->add_option("--output_dir", sde_cfg.output_dir);
  sde_cmd->add_option("--label", sde_cfg.label);

  auto* selftest_cmd =
      app.add_subcommand("selftest", "Fast property checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (run_cmd->parsed()) {
      const auto r = mpcn::run_experiment(run_cli.resolve());
      std::printf("wrote %s\n", r.summary_path.string().c_str());
      if (!r.acf_path.empty())
        std::printf("wrote %s\n", r.acf_path.string().c_str());
      std::printf(
          "acceptance_rate=%s iat_radial=%s iat_coord1=%s longest_reject_run=%ld\n",
          mpcn::format_double(r.summary.acceptance_rate).c_str(),
          mpcn::format_double(r.summary.iat_radial).c_str(),
          mpcn::format_double(r.summary.iat_coord1).c_str(),
          r.summary.longest_reject_run);
    } else if (shift_cmd->parsed()) {
      std::vector<double> xis;
      for (const auto& tok : split_list(xis_raw))
        xis.push_back(std::stod(tok));
      const auto res = mpcn::run_shift_study(shift_cli.resolve(), xis);
      std::printf("wrote %s (%zu rows)\n", res.table_path.string().c_str(),
                  res.rows.size());
    } else if (scal_cmd->parsed()) {
      scal_cfg.algorithms = split_list(algorithms_raw);
      scal_cfg.dims = split_ints(dims_raw, "dims");
      const auto res = mpcn::run_scaling_study(scal_cfg);
      std::printf("wrote %s\n", res.scaling_path.string().c_str());
      std::printf("wrote %s\n", res.slopes_path.string().c_str());
      std::printf("wrote %s\n", res.stuck_path.string().c_str());
      for (const auto& s : res.summaries)
        std::printf("%s: slope=%s r2=%s stable=%s\n", s.algorithm.c_str(),
                    mpcn::format_double(s.fit.slope).c_str(),
                    mpcn::format_double(s.fit.r_squared).c_str(),
                    s.stable ? "true" : "false");
    } else if (sde_cmd->parsed()) {
      const auto res = mpcn::sde_compare(sde_cfg);
      std::printf("wrote %s\n", res.triplet_path.string().c_str());
      std::printf("wrote %s\n", res.summary_path.string().c_str());
      std::printf("em_median=%s (bins reported: %zu)\n",
                  mpcn::format_double(res.em_median).c_str(),
                  res.triplet.bin_centers.size());
    } else if (selftest_cmd->parsed()) {
      return run_selftest();
    }
  } catch (const mpcn::ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
