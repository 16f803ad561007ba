#include <doctest.h>

#include <cmath>
#include <cstring>
#include <sstream>

#include "iterblue/linalg.hpp"
#include "iterblue/report.hpp"
#include "iterblue/rng.hpp"
#include "iterblue/simulate.hpp"
#include "test_util.hpp"

using namespace iterblue;

TEST_CASE("gen_scenario") {
  ScenarioConfig cfg;  // reference experiment defaults

  SUBCASE("degenerate noiseless draw") {
    cfg.c_ee = Matrix(5, 5);
    cfg.sigma_n_sq = 0.0;
    const Scenario s = gen_scenario(cfg);
    CHECK(*s.h_hat == *s.h_true);
    CHECK(max_abs_diff(s.problem.y, mat_vec(s.H_true, cfg.x_true)) == 0.0);
  }

  SUBCASE("same seed reproduces the scenario bit for bit") {
    cfg.seed = 42;
    const Scenario a = gen_scenario(cfg);
    const Scenario b = gen_scenario(cfg);
    CHECK(a.problem.y == b.problem.y);
    CHECK(a.H_true == b.H_true);
    CHECK(a.H_hat == b.H_hat);
    CHECK(*a.h_true == *b.h_true);
  }

  SUBCASE("scenario wiring: H matrices come from the drawn responses") {
    cfg.seed = 43;
    const Scenario s = gen_scenario(cfg);
    CHECK(s.H_true == conv_matrix(*s.h_true, cfg.n_x));
    CHECK(s.H_hat == conv_matrix(*s.h_hat, cfg.n_x));
    CHECK(s.H_hat == s.problem.h_hat);
  }

  SUBCASE("estimation-error sample covariance matches c_ee") {
    // sampling-distribution oracle over many seeded draws
    const std::size_t draws = 100000;
    Matrix sum_sq(5, 5);
    for (std::size_t d = 0; d < draws; ++d) {
      cfg.seed = 1000 + d;
      const Scenario s = gen_scenario(cfg);
      const Vector err = sub(*s.h_true, *s.h_hat);
      for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) sum_sq(i, j) += err[i] * err[j];
    }
    for (std::size_t i = 0; i < 5; ++i) {
      for (std::size_t j = 0; j < 5; ++j) {
        const double sample = sum_sq(i, j) / static_cast<double>(draws);
        const double expected = cfg.c_ee(i, j);
        const double se =
            std::sqrt((cfg.c_ee(i, i) * cfg.c_ee(j, j) + expected * expected) /
                      static_cast<double>(draws));
        REQUIRE(std::fabs(sample - expected) <= 5.0 * se);
      }
    }
  }

  SUBCASE("invalid configs rejected") {
    cfg.x_true = Vector{1.0};
    CHECK_THROWS_AS(gen_scenario(cfg), ContractError);
  }
}

TEST_CASE("run_trial") {
  ScenarioConfig cfg;
  const IterationConfig iter_cfg{10, 0.0};
  const std::vector<std::string> all{kEstimatorLs, kEstimatorProposed,
                                     kEstimatorOracleModel, kEstimatorOracleCww};

  SUBCASE("fully degenerate scenario: all estimators are exact") {
    cfg.c_ee = Matrix(5, 5);
    cfg.sigma_n_sq = 0.0;
    const Scenario s = gen_scenario(cfg);
    const auto outcomes = run_trial(s, all, iter_cfg);
    for (const auto& [name, outcome] : outcomes) {
      REQUIRE_FALSE(outcome.divergent);
      REQUIRE(max_abs(*outcome.sq_err) <= 1e-18);
    }
  }

  SUBCASE("oracle_model wiring equals a direct blue call bit for bit") {
    cfg.seed = 7;
    const Scenario s = gen_scenario(cfg);
    const auto outcomes = run_trial(s, {kEstimatorOracleModel}, iter_cfg);
    const Vector direct = blue(s.H_true, s.problem.c_nn, s.problem.y);
    Vector expected(3);
    for (std::size_t j = 0; j < 3; ++j) {
      const double d = direct[j] - s.x_true[j];
      expected[j] = d * d;
    }
    CHECK(*outcomes.at(kEstimatorOracleModel).sq_err == expected);
  }

  SUBCASE("ls squared error matches the normal-equations oracle") {
    cfg.seed = 8;
    const Scenario s = gen_scenario(cfg);
    const auto outcomes = run_trial(s, {kEstimatorLs}, iter_cfg);
    const Vector oracle = testutil::normal_equations_ls(s.problem.h_hat,
                                                        s.problem.y);
    for (std::size_t j = 0; j < 3; ++j) {
      const double d = oracle[j] - s.x_true[j];
      REQUIRE((*outcomes.at(kEstimatorLs).sq_err)[j] ==
              doctest::Approx(d * d).epsilon(1e-9));
    }
  }

  SUBCASE("unknown estimator rejected") {
    const Scenario s = gen_scenario(cfg);
    CHECK_THROWS_AS(run_trial(s, {"nope"}, iter_cfg), ContractError);
  }

  SUBCASE("a divergence marks only that estimator's outcome") {
    EstimatorRegistry registry = default_registry();
    registry["always_diverges"] = {
        [](const Scenario&, const IterationConfig&) -> std::vector<Vector> {
          throw DivergenceError("synthetic", EstimateTrace{});
        },
        false};
    const Scenario s = gen_scenario(cfg);
    const auto outcomes = run_trial(s, {kEstimatorLs, "always_diverges"},
                                    iter_cfg, registry);
    CHECK(outcomes.at("always_diverges").divergent);
    CHECK_FALSE(outcomes.at("always_diverges").sq_err.has_value());
    CHECK_FALSE(outcomes.at(kEstimatorLs).divergent);
    CHECK(outcomes.at(kEstimatorLs).sq_err.has_value());
  }

  SUBCASE("proposed trace yields per-iteration errors") {
    cfg.seed = 9;
    const Scenario s = gen_scenario(cfg);
    const auto outcomes = run_trial(s, {kEstimatorProposed}, iter_cfg);
    CHECK(outcomes.at(kEstimatorProposed).iter_sq_err.size() == 11);
  }

  SUBCASE("unstructured scenarios run through the same machinery") {
    std::mt19937_64 rng(91);
    Matrix v(6, 2);
    for (auto i = 0u; i < 6; ++i)
      for (auto j = 0u; j < 2; ++j) v(i, j) = 1e-4 * (1.0 + (i + j) % 3);
    const Matrix h_true_mat = testutil::random_matrix(rng, 6, 2);
    Matrix b(6, 2);
    NormalSampler normals(17);
    for (auto i = 0u; i < 6; ++i)
      for (auto j = 0u; j < 2; ++j)
        b(i, j) = std::sqrt(v(i, j)) * normals.next();
    const Matrix h_hat = sub(h_true_mat, b);
    const Vector x_true{1.0, -0.5};
    Vector y = mat_vec(h_true_mat, x_true);
    for (auto i = 0u; i < 6; ++i) y[i] += 1e-3 * normals.next();

    const Scenario s{std::nullopt,
                     std::nullopt,
                     h_true_mat,
                     h_hat,
                     LinearProblem(y, h_hat, Matrix::scaled_identity(6, 1e-6),
                                   Unstructured(v)),
                     x_true};
    const auto outcomes = run_trial(s, all, iter_cfg);
    for (const auto& [name, outcome] : outcomes) {
      REQUIRE_FALSE(outcome.divergent);
      REQUIRE(outcome.sq_err.has_value());
    }
  }
}

TEST_CASE("trial seeds decouple grid cells and trials") {
  CHECK(trial_seed(1, 1e-6, 0) != trial_seed(1, 1e-6, 1));
  CHECK(trial_seed(1, 1e-6, 0) != trial_seed(1, 1e-5, 0));
  CHECK(trial_seed(1, 1e-6, 5) != trial_seed(2, 1e-6, 5));
  // value-keyed: independent of grid shape by construction
  CHECK(trial_seed(9, 1e-4, 7) == trial_seed(9, 1e-4, 7));
}

TEST_CASE("mse_sweep") {
  SweepConfig cfg;
  cfg.trials = 60;
  cfg.sigma_grid = {1e-7, 1e-5};
  cfg.base.seed = 2024;

  SUBCASE("single trial equals the run_trial aggregation") {
    SweepConfig one = cfg;
    one.trials = 1;
    one.sigma_grid = {1e-6};
    const MseReport report = mse_sweep(one, 1);
    REQUIRE(report.cells.size() == one.estimators.size());

    ScenarioConfig scen = one.base;
    scen.sigma_n_sq = 1e-6;
    scen.seed = trial_seed(one.base.seed, 1e-6, 0);
    const auto outcomes = run_trial(gen_scenario(scen), one.estimators,
                                    IterationConfig{one.n_iter, 0.0});
    for (const MseCell& cell : report.cells) {
      const Vector& sq = *outcomes.at(cell.estimator).sq_err;
      double mean = 0.0;
      for (std::size_t j = 0; j < sq.size(); ++j) mean += sq[j];
      mean /= static_cast<double>(sq.size());
      REQUIRE(cell.mse == doctest::Approx(mean).epsilon(1e-15));
      REQUIRE(cell.trials == 1);
      REQUIRE(cell.mc_stderr == 0.0);
    }
  }

  SUBCASE("report layout and basic sanity") {
    const MseReport report = mse_sweep(cfg, 1);
    REQUIRE(report.cells.size() == cfg.estimators.size() * 2);
    for (const MseCell& cell : report.cells) {
      REQUIRE(cell.mse >= 0.0);
      REQUIRE(std::isfinite(cell.mse));
      REQUIRE(cell.trials + cell.divergent == cfg.trials);
      REQUIRE(cell.per_component.size() == 3);
    }
    CHECK(report.trials_attempted == cfg.estimators.size() * 2 * cfg.trials);
  }

  SUBCASE("bit-identical results across thread counts") {
    const MseReport a = mse_sweep(cfg, 1);
    const MseReport b = mse_sweep(cfg, 4);
    REQUIRE(a.cells.size() == b.cells.size());
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
      REQUIRE(a.cells[i].estimator == b.cells[i].estimator);
      REQUIRE(a.cells[i].mse == b.cells[i].mse);
      REQUIRE(a.cells[i].mc_stderr == b.cells[i].mc_stderr);
      REQUIRE(a.cells[i].per_component == b.cells[i].per_component);
    }
  }

  SUBCASE("perfect-model oracle lower-bounds every estimator") {
    const MseReport report = mse_sweep(cfg, 0);
    for (const double sigma : cfg.sigma_grid) {
      double mse_model = 0.0, se_model = 0.0;
      for (const MseCell& cell : report.cells) {
        if (cell.key == sigma && cell.estimator == kEstimatorOracleModel) {
          mse_model = cell.mse;
          se_model = cell.mc_stderr;
        }
      }
      for (const MseCell& cell : report.cells) {
        if (cell.key != sigma || cell.estimator == kEstimatorOracleModel)
          continue;
        REQUIRE(mse_model <=
                cell.mse + 3.0 * std::sqrt(se_model * se_model +
                                           cell.mc_stderr * cell.mc_stderr));
      }
    }
  }

  SUBCASE("divergent trials are excluded from the mean and counted") {
    EstimatorRegistry registry = default_registry();
    registry["fail_even_seeds"] = {
        [](const Scenario& s, const IterationConfig& c) -> std::vector<Vector> {
          if (s.problem.y[0] > 0.0) {
            throw DivergenceError("synthetic", EstimateTrace{});
          }
          return default_registry().at(kEstimatorLs).fn(s, c);
        },
        false};
    SweepConfig custom = cfg;
    custom.sigma_grid = {1e-6};
    custom.estimators = {kEstimatorLs, "fail_even_seeds"};
    const MseReport report = mse_sweep(custom, 1, registry);
    REQUIRE(report.cells.size() == 2);
    const MseCell& flaky = report.cells[1];
    CHECK(flaky.estimator == "fail_even_seeds");
    CHECK(flaky.divergent > 0);
    CHECK(flaky.trials + flaky.divergent == custom.trials);
    CHECK(report.trials_divergent == flaky.divergent);
    CHECK(std::isfinite(flaky.mse));
  }

  SUBCASE("disjoint trial halves agree within 4 combined standard errors") {
    // statistical independence of trials: batch means over the two halves
    SweepConfig half = cfg;
    half.sigma_grid = {1e-6};
    half.trials = 400;
    const double sigma = 1e-6;
    const IterationConfig iter_cfg{half.n_iter, 0.0};

    double mean[2] = {0.0, 0.0};
    double sq_mean[2] = {0.0, 0.0};
    for (std::size_t t = 0; t < half.trials; ++t) {
      ScenarioConfig scen = half.base;
      scen.sigma_n_sq = sigma;
      scen.seed = trial_seed(half.base.seed, sigma, t);
      const auto outcomes =
          run_trial(gen_scenario(scen), {kEstimatorProposed}, iter_cfg);
      const Vector& sq = *outcomes.at(kEstimatorProposed).sq_err;
      double m = 0.0;
      for (std::size_t j = 0; j < sq.size(); ++j) m += sq[j];
      m /= static_cast<double>(sq.size());
      const int bucket = t < half.trials / 2 ? 0 : 1;
      mean[bucket] += m;
      sq_mean[bucket] += m * m;
    }
    const double n = static_cast<double>(half.trials / 2);
    double se_sq = 0.0;
    for (int b = 0; b < 2; ++b) {
      mean[b] /= n;
      const double var = std::max(0.0, sq_mean[b] / n - mean[b] * mean[b]);
      se_sq += var / n;
    }
    REQUIRE(std::fabs(mean[0] - mean[1]) <= 4.0 * std::sqrt(se_sq));
  }
}

TEST_CASE("convergence_curve") {
  SweepConfig cfg;
  cfg.trials = 50;
  cfg.sigma_grid = {1e-6};
  cfg.base.seed = 77;

  SUBCASE("requires a single grid value") {
    SweepConfig bad = cfg;
    bad.sigma_grid = {1e-7, 1e-6};
    CHECK_THROWS_AS(convergence_curve(bad, 1), ContractError);
  }

  SUBCASE("n_iter = 0 gives a single row equal to the LS MSE") {
    SweepConfig zero = cfg;
    zero.n_iter = 0;
    const MseReport conv = convergence_curve(zero, 1);
    REQUIRE(conv.cells.size() == 1);
    CHECK(conv.cells[0].key == 0.0);

    SweepConfig ls_sweep = cfg;
    ls_sweep.estimators = {kEstimatorLs};
    const MseReport sweep = mse_sweep(ls_sweep, 1);
    CHECK(conv.cells[0].mse == doctest::Approx(sweep.cells[0].mse).epsilon(1e-15));
  }

  SUBCASE("rows keyed 0..n_iter for the trace producer only") {
    const MseReport conv = convergence_curve(cfg, 1);
    REQUIRE(conv.cells.size() == cfg.n_iter + 1);
    for (std::size_t k = 0; k <= cfg.n_iter; ++k) {
      REQUIRE(conv.cells[k].estimator == kEstimatorProposed);
      REQUIRE(conv.cells[k].key == static_cast<double>(k));
    }
  }

  SUBCASE("iteration 0 equals the LS row of a sweep at the same sigma") {
    const MseReport conv = convergence_curve(cfg, 1);
    SweepConfig sweep_cfg = cfg;
    sweep_cfg.estimators = {kEstimatorLs};
    const MseReport sweep = mse_sweep(sweep_cfg, 1);
    CHECK(conv.cells[0].mse ==
          doctest::Approx(sweep.cells[0].mse).epsilon(1e-15));
  }
}

TEST_CASE("emit_report CSV") {
  SUBCASE("empty report: comment block and header only") {
    MseReport report;
    report.meta = {{"command", "sweep"}, {"trials", "0"}};
    std::ostringstream out;
    emit_report(report, out);
    CHECK(out.str() ==
          "# command = sweep\n# trials = 0\n"
          "estimator,sigma_n_sq_or_iter,mse,mc_stderr,trials,divergent\n");
  }

  SUBCASE("single cell renders one data row that re-parses exactly") {
    MseReport report;
    MseCell cell;
    cell.estimator = "ls";
    cell.key = 1e-6;
    cell.mse = 0.123456789012345678;
    cell.mc_stderr = 3.25e-9;
    cell.trials = 10;
    cell.divergent = 1;
    report.cells.push_back(cell);

    std::ostringstream out;
    emit_report(report, out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);  // header
    CHECK(line == "estimator,sigma_n_sq_or_iter,mse,mc_stderr,trials,divergent");
    std::getline(in, line);
    // generic CSV split
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    REQUIRE(fields.size() == 6);
    CHECK(fields[0] == "ls");
    CHECK(std::stod(fields[1]) == cell.key);
    CHECK(std::stod(fields[2]) == cell.mse);
    CHECK(std::stod(fields[3]) == cell.mc_stderr);
    CHECK(std::stoull(fields[4]) == cell.trials);
    CHECK(std::stoull(fields[5]) == cell.divergent);
  }
}
