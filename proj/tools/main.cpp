// iterblue command line: Monte Carlo sweeps, convergence curves, and single
// estimate traces, written as plot-ready CSV. Uses only the public C API.

#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include <iterblue/iterblue.h>

namespace {

enum ExitCode {
  kOk = 0,
  kUsage = 1,
  kParseError = 2,
  kNumericError = 3,
  kDivergence = 4,
  kIoError = 5,
};

constexpr double kMaxDivergenceRate = 1e-3;

int exit_code_for(ib_status status) {
  switch (status) {
    case IB_OK:
      return kOk;
    case IB_ERR_PARSE:
      return kParseError;
    case IB_ERR_DIMENSION:
    case IB_ERR_CONTRACT:
    case IB_ERR_RANK:
      return kNumericError;
    case IB_ERR_DIVERGENCE:
      return kDivergence;
    case IB_ERR_IO:
      return kIoError;
    default:
      return kUsage;
  }
}

int fail(ib_status status) {
  std::fprintf(stderr, "iterblue: %s\n", ib_last_error());
  return exit_code_for(status);
}

struct CommonOpts {
  std::string config_path;
  std::string out_path;
  bool deterministic = false;
  int threads = 0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::uint64_t n_iter = 0;
  bool has_trials = false;
  bool has_seed = false;
  bool has_n_iter = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool campaign) {
  cmd->add_option("--config", opts.config_path, "experiment config file")
      ->required();
  cmd->add_option("--out", opts.out_path, "output CSV path (default stdout)");
  cmd->add_flag("--deterministic", opts.deterministic,
                "omit the timestamp line (byte-stable output)");
  cmd->add_option("--seed", opts.seed, "override the config seed");
  if (campaign) {
    cmd->add_option("--threads", opts.threads,
                    "worker threads (0 = hardware concurrency)");
    cmd->add_option("--trials", opts.trials, "override the trial count");
    cmd->add_option("--n-iter", opts.n_iter, "override the iteration count");
  }
}

ib_status apply_overrides(ib_config* cfg, const CommonOpts& opts) {
  ib_status s = IB_OK;
  if (opts.has_trials) s = ib_config_set_u64(cfg, "trials", opts.trials);
  if (s == IB_OK && opts.has_seed) s = ib_config_set_u64(cfg, "seed", opts.seed);
  if (s == IB_OK && opts.has_n_iter)
    s = ib_config_set_u64(cfg, "n_iter", opts.n_iter);
  return s;
}

int run_campaign(const CommonOpts& opts, bool converge, bool has_sigma,
                 double sigma) {
  ib_config* cfg = nullptr;
  ib_status s = ib_config_load(opts.config_path.c_str(), &cfg);
  if (s != IB_OK) return fail(s);

  s = apply_overrides(cfg, opts);
  if (s == IB_OK && has_sigma) s = ib_config_set_f64(cfg, "sigma_n_sq", sigma);

  ib_report* report = nullptr;
  if (s == IB_OK) {
    s = converge ? ib_run_converge(cfg, opts.threads, &report)
                 : ib_run_sweep(cfg, opts.threads, &report);
  }
  if (s == IB_OK) {
    s = ib_report_write_csv(report,
                            opts.out_path.empty() ? nullptr
                                                  : opts.out_path.c_str(),
                            opts.deterministic ? 1 : 0);
  }

  int code = s == IB_OK ? kOk : fail(s);
  if (code == kOk && ib_report_divergence_rate(report) > kMaxDivergenceRate) {
    std::fprintf(stderr,
                 "iterblue: divergence rate %.3g exceeds %.3g; report written "
                 "but campaign rejected\n",
                 ib_report_divergence_rate(report), kMaxDivergenceRate);
    code = kDivergence;
  }
  ib_report_free(report);
  ib_config_free(cfg);
  return code;
}

int run_estimate(const CommonOpts& opts, bool has_sigma, double sigma) {
  ib_config* cfg = nullptr;
  ib_status s = ib_config_load(opts.config_path.c_str(), &cfg);
  if (s != IB_OK) return fail(s);

  s = apply_overrides(cfg, opts);
  if (s == IB_OK && has_sigma) s = ib_config_set_f64(cfg, "sigma_n_sq", sigma);

  ib_trace* trace = nullptr;
  if (s == IB_OK) s = ib_run_estimate(cfg, &trace);
  if (s == IB_OK) {
    s = ib_trace_write_csv(trace,
                           opts.out_path.empty() ? nullptr
                                                 : opts.out_path.c_str(),
                           opts.deterministic ? 1 : 0);
  }

  const int code = s == IB_OK ? kOk : fail(s);
  ib_trace_free(trace);
  ib_config_free(cfg);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"estimation under measurement-matrix uncertainty: Monte Carlo "
               "MSE campaigns and single-scenario traces"};
  app.require_subcommand(1);

  CommonOpts sweep_opts;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "average MSE per estimator over the noise-variance grid");
  add_common(sweep, sweep_opts, true);

  CommonOpts conv_opts;
  double conv_sigma = 0.0;
  CLI::App* converge = app.add_subcommand(
      "converge", "average MSE per iteration at one noise variance");
  add_common(converge, conv_opts, true);
  converge->add_option("--sigma", conv_sigma, "noise variance sigma_n^2")
      ->required();

  CommonOpts est_opts;
  double est_sigma = 0.0;
  CLI::App* estimate = app.add_subcommand(
      "estimate", "iterate trace for one drawn scenario (debug aid)");
  add_common(estimate, est_opts, false);
  CLI::Option* est_sigma_opt =
      estimate->add_option("--sigma", est_sigma, "noise variance sigma_n^2");

  CLI11_PARSE(app, argc, argv);

  // CLI11 stores values eagerly; track which overrides were actually given
  sweep_opts.has_trials = sweep->count("--trials") > 0;
  sweep_opts.has_seed = sweep->count("--seed") > 0;
  sweep_opts.has_n_iter = sweep->count("--n-iter") > 0;
  conv_opts.has_trials = converge->count("--trials") > 0;
  conv_opts.has_seed = converge->count("--seed") > 0;
  conv_opts.has_n_iter = converge->count("--n-iter") > 0;
  est_opts.has_seed = estimate->count("--seed") > 0;

  if (sweep->parsed()) return run_campaign(sweep_opts, false, false, 0.0);
  if (converge->parsed()) return run_campaign(conv_opts, true, true, conv_sigma);
  if (estimate->parsed()) {
    return run_estimate(est_opts, est_sigma_opt->count() > 0, est_sigma);
  }
  return kUsage;
}
