#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "iterblue/estimators.hpp"

namespace iterblue {

/// Randomized convolution scenario: true impulse response drawn from
/// N(h_mean, c_hh), estimation error e from N(0, c_ee), measurement noise
/// from N(0, sigma_n_sq I).
struct ScenarioConfig {
  std::size_t n_h = 5;
  std::size_t n_x = 3;
  Vector x_true{1.0, 0.5, 0.25};
  Vector h_mean{0.0, 0.0, 0.0, 0.0, 0.0};
  Matrix c_hh = Matrix::identity(5);
  Matrix c_ee = Matrix::diagonal(Vector{1e-4, 1e-5, 1e-6, 1e-6, 1e-6});
  double sigma_n_sq = 1e-6;
  std::uint64_t seed = 1;

  void validate() const;
};

/// One drawn scenario. The impulse responses are present for scenarios
/// produced by gen_scenario; hand-built unstructured scenarios omit them.
struct Scenario {
  std::optional<Vector> h_true;
  std::optional<Vector> h_hat;
  Matrix H_true;
  Matrix H_hat;
  LinearProblem problem;
  Vector x_true;
};

/// Deterministically (from cfg.seed) draws one scenario: h ~ N(h_mean, c_hh),
/// h_hat = h - e with e ~ N(0, c_ee), y = H x_true + n with
/// n ~ N(0, sigma_n_sq I).
Scenario gen_scenario(const ScenarioConfig& cfg);

/// Estimator under benchmark: maps a scenario (including oracle context such
/// as the true matrix and true parameters) to one or more estimates; trace
/// producers return every iterate, others a single final estimate.
using EstimatorFn =
    std::function<std::vector<Vector>(const Scenario&, const IterationConfig&)>;

struct Estimator {
  EstimatorFn fn;
  bool trace = false;  // returns every iterate rather than one estimate
};
using EstimatorRegistry = std::map<std::string, Estimator>;

inline constexpr const char* kEstimatorLs = "ls";
inline constexpr const char* kEstimatorProposed = "proposed";
inline constexpr const char* kEstimatorOracleModel = "oracle_model";
inline constexpr const char* kEstimatorOracleCww = "oracle_cww";

/// Built-in estimators: ls, proposed (iterative BLUE, full trace),
/// oracle_model (BLUE on the true matrix), oracle_cww (BLUE with the
/// overall-noise covariance built from the true parameters).
const EstimatorRegistry& default_registry();

/// Per-estimator outcome of a single trial.
struct TrialOutcome {
  std::optional<Vector> sq_err;           // |x_hat - x_true|^2 per component
  std::vector<Vector> iter_sq_err;        // per iterate, trace producers only
  bool divergent = false;
};

/// Runs each named estimator on the scenario. A divergence marks that
/// estimator's outcome divergent; other solver errors propagate.
std::map<std::string, TrialOutcome> run_trial(
    const Scenario& scenario, const std::vector<std::string>& estimators,
    const IterationConfig& config,
    const EstimatorRegistry& registry = default_registry());

/// Monte Carlo campaign over a noise-variance grid.
struct SweepConfig {
  ScenarioConfig base;
  std::vector<double> sigma_grid;
  std::size_t trials = 10000;
  std::size_t n_iter = 10;
  double stop_tol = 0.0;
  std::vector<std::string> estimators{kEstimatorLs, kEstimatorProposed,
                                      kEstimatorOracleModel,
                                      kEstimatorOracleCww};

  void validate() const;
};

/// One aggregated report row: MSE of an estimator at a grid key (noise
/// variance for sweeps, iteration index for convergence curves).
struct MseCell {
  std::string estimator;
  double key = 0.0;
  double mse = 0.0;        // mean over trials and components
  double mc_stderr = 0.0;  // sample std of per-trial means / sqrt(trials)
  std::uint64_t trials = 0;     // trials entering the mean
  std::uint64_t divergent = 0;  // excluded trials
  Vector per_component{0.0};    // per-component MSE
};

struct MseReport {
  std::vector<MseCell> cells;
  std::uint64_t seed = 0;
  std::uint64_t trials_attempted = 0;  // per (estimator, grid cell) trials
  std::uint64_t trials_divergent = 0;
  std::vector<std::pair<std::string, std::string>> meta;

  double divergence_rate() const {
    return trials_attempted == 0
               ? 0.0
               : static_cast<double>(trials_divergent) /
                     static_cast<double>(trials_attempted);
  }
};

/// Average MSE per (estimator, sigma). Trials run concurrently on up to
/// `threads` workers (0 = hardware concurrency); aggregation is a
/// deterministic reduction in trial order, so results do not depend on the
/// thread count. Estimators beyond the built-ins can be benchmarked by
/// passing an extended registry.
MseReport mse_sweep(const SweepConfig& cfg, int threads = 0,
                    const EstimatorRegistry& registry = default_registry());

/// Per-iteration average MSE of the trace-producing estimators at a single
/// noise variance (cfg.sigma_grid must hold exactly one value); row key is
/// the iteration index, iteration 0 being the LS initialization.
MseReport convergence_curve(const SweepConfig& cfg, int threads = 0,
                            const EstimatorRegistry& registry = default_registry());

}  // namespace iterblue
