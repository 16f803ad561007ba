#include "iterblue/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>

#include "iterblue/linalg.hpp"
#include "iterblue/rng.hpp"

namespace iterblue {

namespace {

// Runs fn(i) for i in [0, n) on up to `threads` workers over disjoint index
// blocks. The first exception is captured and rethrown after join.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn) {
  std::size_t workers = threads <= 0
                            ? std::max(1u, std::thread::hardware_concurrency())
                            : static_cast<std::size_t>(threads);
  workers = std::min(workers, std::max<std::size_t>(n, 1));

  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }

  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto worker = [&](std::size_t begin, std::size_t end) {
    try {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = n * w / workers;
    const std::size_t end = n * (w + 1) / workers;
    pool.emplace_back(worker, begin, end);
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

Vector squared_error(const Vector& estimate, const Vector& truth) {
  Vector out(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double d = estimate[i] - truth[i];
    out[i] = d * d;
  }
  return out;
}

Matrix true_overall_cov(const Scenario& s) {
  return overall_noise_cov(s.problem.uncertainty, s.x_true, s.problem.c_nn);
}

// Aggregates per-trial mean squared errors into one report cell.
MseCell aggregate_cell(const std::string& estimator, double key,
                       const std::vector<std::optional<Vector>>& trial_sq_err) {
  MseCell cell;
  cell.estimator = estimator;
  cell.key = key;

  std::size_t n_x = 1;
  for (const auto& t : trial_sq_err) {
    if (t.has_value()) {
      n_x = t->size();
      break;
    }
  }

  Vector comp_sum(n_x);
  double mean_sum = 0.0;
  double mean_sq_sum = 0.0;
  std::uint64_t included = 0;
  std::uint64_t divergent = 0;

  for (const auto& t : trial_sq_err) {
    if (!t.has_value()) {
      ++divergent;
      continue;
    }
    double trial_mean = 0.0;
    for (std::size_t j = 0; j < n_x; ++j) {
      comp_sum[j] += (*t)[j];
      trial_mean += (*t)[j];
    }
    trial_mean /= static_cast<double>(n_x);
    mean_sum += trial_mean;
    mean_sq_sum += trial_mean * trial_mean;
    ++included;
  }

  cell.trials = included;
  cell.divergent = divergent;
  cell.per_component = Vector(n_x);
  if (included > 0) {
    const double n = static_cast<double>(included);
    cell.mse = mean_sum / n;
    for (std::size_t j = 0; j < n_x; ++j)
      cell.per_component[j] = comp_sum[j] / n;
    if (included > 1) {
      const double var =
          std::max(0.0, (mean_sq_sum - n * cell.mse * cell.mse) / (n - 1.0));
      cell.mc_stderr = std::sqrt(var / n);
    }
  }
  return cell;
}

}  // namespace

void ScenarioConfig::validate() const {
  if (n_h == 0 || n_x == 0) {
    throw ContractError("ScenarioConfig: n_h and n_x must be >= 1");
  }
  if (n_h < 2) {
    throw ContractError("ScenarioConfig: n_h must be >= 2 (n_y > n_x)");
  }
  if (x_true.size() != n_x) {
    throw ContractError("ScenarioConfig: x_true length != n_x");
  }
  if (h_mean.size() != n_h) {
    throw ContractError("ScenarioConfig: h_mean length != n_h");
  }
  if (c_hh.rows() != n_h || c_hh.cols() != n_h) {
    throw ContractError("ScenarioConfig: c_hh must be n_h x n_h");
  }
  if (c_ee.rows() != n_h || c_ee.cols() != n_h) {
    throw ContractError("ScenarioConfig: c_ee must be n_h x n_h");
  }
  if (!(sigma_n_sq >= 0.0) || !std::isfinite(sigma_n_sq)) {
    throw ContractError("ScenarioConfig: sigma_n_sq must be >= 0 and finite");
  }
}

Scenario gen_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const Matrix hh_sqrt = psd_sqrt(cfg.c_hh);
  const Matrix ee_sqrt = psd_sqrt(cfg.c_ee);
  const std::size_t n_y = cfg.n_h + cfg.n_x - 1;

  NormalSampler rng(cfg.seed);
  const Vector h_true = add(cfg.h_mean, mat_vec(hh_sqrt, rng.vector(cfg.n_h)));
  const Vector e = mat_vec(ee_sqrt, rng.vector(cfg.n_h));
  Vector noise(n_y);
  const double noise_sd = std::sqrt(cfg.sigma_n_sq);
  for (std::size_t i = 0; i < n_y; ++i) noise[i] = noise_sd * rng.next();

  const Vector h_hat = sub(h_true, e);
  Matrix H_true = conv_matrix(h_true, cfg.n_x);
  Matrix H_hat = conv_matrix(h_hat, cfg.n_x);
  Vector y = add(mat_vec(H_true, cfg.x_true), noise);

  LinearProblem problem(std::move(y), H_hat,
                        Matrix::scaled_identity(n_y, cfg.sigma_n_sq),
                        Convolution(cfg.c_ee, cfg.n_x));
  return Scenario{h_true,           h_hat, std::move(H_true), std::move(H_hat),
                  std::move(problem), cfg.x_true};
}

const EstimatorRegistry& default_registry() {
  static const EstimatorRegistry registry = [] {
    EstimatorRegistry r;
    r[kEstimatorLs] = {[](const Scenario& s, const IterationConfig&) {
                         return std::vector<Vector>{
                             ls_estimate(s.problem.h_hat, s.problem.y)};
                       },
                       false};
    r[kEstimatorProposed] = {[](const Scenario& s, const IterationConfig& cfg) {
                               return iterative_blue(s.problem, cfg).estimates;
                             },
                             true};
    r[kEstimatorOracleModel] = {
        [](const Scenario& s, const IterationConfig&) {
          return std::vector<Vector>{
              oracle_blue_perfect_model(s.H_true, s.problem.c_nn, s.problem.y)};
        },
        false};
    r[kEstimatorOracleCww] = {
        [](const Scenario& s, const IterationConfig&) {
          return std::vector<Vector>{oracle_blue_perfect_cww(
              s.problem.h_hat, true_overall_cov(s), s.problem.y)};
        },
        false};
    return r;
  }();
  return registry;
}

std::map<std::string, TrialOutcome> run_trial(
    const Scenario& scenario, const std::vector<std::string>& estimators,
    const IterationConfig& config, const EstimatorRegistry& registry) {
  std::map<std::string, TrialOutcome> out;
  for (const auto& name : estimators) {
    const auto it = registry.find(name);
    if (it == registry.end()) {
      throw ContractError("run_trial: unknown estimator '" + name + "'");
    }
    TrialOutcome outcome;
    try {
      const std::vector<Vector> estimates = it->second.fn(scenario, config);
      outcome.sq_err = squared_error(estimates.back(), scenario.x_true);
      if (it->second.trace) {
        outcome.iter_sq_err.reserve(estimates.size());
        for (const Vector& est : estimates) {
          outcome.iter_sq_err.push_back(squared_error(est, scenario.x_true));
        }
      }
    } catch (const DivergenceError&) {
      outcome.divergent = true;
    }
    out.emplace(name, std::move(outcome));
  }
  return out;
}

void SweepConfig::validate() const {
  ScenarioConfig check = base;
  check.sigma_n_sq = sigma_grid.empty() ? base.sigma_n_sq : sigma_grid.front();
  check.validate();
  for (std::size_t i = 0; i < sigma_grid.size(); ++i) {
    if (!(sigma_grid[i] > 0.0) || !std::isfinite(sigma_grid[i])) {
      throw ContractError("SweepConfig: sigma_grid values must be positive");
    }
    if (i > 0 && sigma_grid[i] <= sigma_grid[i - 1]) {
      throw ContractError("SweepConfig: sigma_grid must be strictly increasing");
    }
  }
  if (trials == 0) throw ContractError("SweepConfig: trials must be >= 1");
  if (estimators.empty()) {
    throw ContractError("SweepConfig: estimator list must not be empty");
  }
}

MseReport mse_sweep(const SweepConfig& cfg, int threads,
                    const EstimatorRegistry& registry) {
  cfg.validate();
  for (const auto& name : cfg.estimators) {
    if (registry.find(name) == registry.end()) {
      throw ContractError("mse_sweep: unknown estimator '" + name + "'");
    }
  }
  const IterationConfig iter_cfg{cfg.n_iter, cfg.stop_tol};

  MseReport report;
  report.seed = cfg.base.seed;

  for (const double sigma : cfg.sigma_grid) {
    std::vector<std::map<std::string, TrialOutcome>> outcomes(cfg.trials);
    parallel_for(cfg.trials, threads, [&](std::size_t t) {
      ScenarioConfig scen = cfg.base;
      scen.sigma_n_sq = sigma;
      scen.seed = trial_seed(cfg.base.seed, sigma, t);
      outcomes[t] =
          run_trial(gen_scenario(scen), cfg.estimators, iter_cfg, registry);
    });

    for (const auto& name : cfg.estimators) {
      std::vector<std::optional<Vector>> trial_sq_err;
      trial_sq_err.reserve(cfg.trials);
      for (auto& o : outcomes) trial_sq_err.push_back(o.at(name).sq_err);
      MseCell cell = aggregate_cell(name, sigma, trial_sq_err);
      report.trials_attempted += cfg.trials;
      report.trials_divergent += cell.divergent;
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

MseReport convergence_curve(const SweepConfig& cfg, int threads,
                            const EstimatorRegistry& registry) {
  cfg.validate();
  if (cfg.sigma_grid.size() != 1) {
    throw ContractError(
        "convergence_curve: sigma_grid must hold exactly one value");
  }
  for (const auto& name : cfg.estimators) {
    if (registry.find(name) == registry.end()) {
      throw ContractError("convergence_curve: unknown estimator '" + name +
                          "'");
    }
  }
  const double sigma = cfg.sigma_grid.front();
  const IterationConfig iter_cfg{cfg.n_iter, cfg.stop_tol};

  std::vector<std::map<std::string, TrialOutcome>> outcomes(cfg.trials);
  parallel_for(cfg.trials, threads, [&](std::size_t t) {
    ScenarioConfig scen = cfg.base;
    scen.sigma_n_sq = sigma;
    scen.seed = trial_seed(cfg.base.seed, sigma, t);
    outcomes[t] =
        run_trial(gen_scenario(scen), cfg.estimators, iter_cfg, registry);
  });

  MseReport report;
  report.seed = cfg.base.seed;

  for (const auto& name : cfg.estimators) {
    if (!registry.at(name).trace) continue;

    for (std::size_t k = 0; k <= cfg.n_iter; ++k) {
      std::vector<std::optional<Vector>> trial_sq_err;
      trial_sq_err.reserve(cfg.trials);
      for (const auto& o : outcomes) {
        const TrialOutcome& outcome = o.at(name);
        if (outcome.divergent) {
          trial_sq_err.push_back(std::nullopt);
          continue;
        }
        // traces shortened by early stopping hold their last estimate
        const std::size_t idx = std::min(k, outcome.iter_sq_err.size() - 1);
        trial_sq_err.push_back(outcome.iter_sq_err[idx]);
      }
      MseCell cell =
          aggregate_cell(name, static_cast<double>(k), trial_sq_err);
      if (k == 0) {
        report.trials_attempted += cfg.trials;
        report.trials_divergent += cell.divergent;
      }
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

}  // namespace iterblue
