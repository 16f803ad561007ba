#include <doctest.h>

#include <random>

#include "iterblue/config.hpp"
#include "test_util.hpp"

using namespace iterblue;

TEST_CASE("empty config yields the default experiment") {
  const SweepConfig cfg = parse_config("");
  CHECK(cfg.base.n_h == 5);
  CHECK(cfg.base.n_x == 3);
  CHECK(cfg.base.x_true == Vector{1.0, 0.5, 0.25});
  CHECK(cfg.base.h_mean == Vector(5));
  CHECK(cfg.base.c_hh == Matrix::identity(5));
  CHECK(cfg.base.c_ee ==
        Matrix::diagonal(Vector{1e-4, 1e-5, 1e-6, 1e-6, 1e-6}));
  CHECK(cfg.trials == 10000);
  CHECK(cfg.n_iter == 10);
  CHECK(cfg.stop_tol == 0.0);
  REQUIRE(cfg.sigma_grid.size() == 31);
  CHECK(cfg.sigma_grid.front() == doctest::Approx(1e-8).epsilon(1e-12));
  CHECK(cfg.sigma_grid.back() == doctest::Approx(1e-3).epsilon(1e-12));
  for (std::size_t i = 1; i < cfg.sigma_grid.size(); ++i) {
    CHECK(cfg.sigma_grid[i] > cfg.sigma_grid[i - 1]);
  }
  CHECK(cfg.estimators ==
        std::vector<std::string>{"ls", "proposed", "oracle_model", "oracle_cww"});
}

TEST_CASE("key parsing") {
  SUBCASE("values, comments, and whitespace") {
    const SweepConfig cfg = parse_config(
        "# experiment\n"
        "trials = 250   # still a comment\n"
        "\n"
        "seed=99\n"
        "x_true = [2, 1, 0.5]\n"
        "c_ee = diag(1e-4, 1e-4, 1e-4, 1e-4, 1e-4)\n"
        "sigma_grid = [1e-7, 1e-6, 1e-5]\n"
        "estimators = [ls, proposed]\n");
    CHECK(cfg.trials == 250);
    CHECK(cfg.base.seed == 99);
    CHECK(cfg.base.x_true == Vector{2.0, 1.0, 0.5});
    CHECK(cfg.sigma_grid == std::vector<double>{1e-7, 1e-6, 1e-5});
    CHECK(cfg.estimators == std::vector<std::string>{"ls", "proposed"});
  }

  SUBCASE("full matrices") {
    const SweepConfig cfg = parse_config(
        "n_h = 2\n"
        "n_x = 2\n"
        "x_true = [1, 1]\n"
        "h_mean = [0, 0]\n"
        "c_hh = [[2, 0.5], [0.5, 1]]\n"
        "c_ee = [[1e-4, 0], [0, 1e-5]]\n");
    CHECK(cfg.base.c_hh == Matrix::from_rows({{2.0, 0.5}, {0.5, 1.0}}));
  }

  SUBCASE("grid generation keys") {
    const SweepConfig cfg = parse_config(
        "grid_min = 1e-6\ngrid_max = 1e-4\ngrid_points_per_decade = 2\n");
    REQUIRE(cfg.sigma_grid.size() == 5);
    CHECK(cfg.sigma_grid.front() == doctest::Approx(1e-6).epsilon(1e-12));
    CHECK(cfg.sigma_grid.back() == doctest::Approx(1e-4).epsilon(1e-12));
  }
}

TEST_CASE("parse errors name the key and line") {
  auto expect_error = [](const char* text, const char* key, std::size_t line) {
    try {
      parse_config(text);
      FAIL_CHECK("expected ParseError for: " << text);
    } catch (const ParseError& err) {
      CHECK(err.key() == key);
      CHECK(err.line() == line);
    }
  };

  expect_error("trials = 0\n", "trials", 1);
  expect_error("seed = 1\nwhatever = 3\n", "whatever", 2);
  expect_error("trials = twelve\n", "trials", 1);
  expect_error("x_true = [1, 2\n", "x_true", 1);
  expect_error("sigma_grid = [1e-5, 1e-6]\n", "sigma_grid", 1);
  expect_error("sigma_grid = [1e-5]\ngrid_min = 1e-6\n", "sigma_grid", 1);
  expect_error("n_x = 4\n", "n_x", 1);  // inconsistent with default x_true
  expect_error("estimators = [ls, bogus]\n", "estimators", 1);
  expect_error("c_ee = [[1, 2], [3, 4]]\nn_h = 2\nx_true = [1, 1]\nn_x = 2\n"
               "h_mean = [0, 0]\nc_hh = [[1, 0], [0, 1]]\n",
               "c_ee", 1);  // asymmetric
  expect_error("trials = 5 = 6\n", "trials", 1);
  expect_error("no equals sign here\n", "", 1);
  expect_error("trials = 10\ntrials = 20\n", "trials", 2);
}

TEST_CASE("serialize/parse round trip") {
  SUBCASE("defaults") {
    const SweepConfig cfg = parse_config("");
    const std::string text = serialize_config(cfg);
    const SweepConfig back = parse_config(text);
    CHECK(back.base.x_true == cfg.base.x_true);
    CHECK(back.base.c_hh == cfg.base.c_hh);
    CHECK(back.base.c_ee == cfg.base.c_ee);
    CHECK(back.sigma_grid == cfg.sigma_grid);
    CHECK(back.trials == cfg.trials);
    CHECK(back.estimators == cfg.estimators);
    CHECK(serialize_config(back) == text);  // canonical form is a fixed point
  }

  SUBCASE("randomized configs") {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> unif(0.1, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
      SweepConfig cfg;
      cfg.base.seed = rng();
      cfg.trials = 1 + rng() % 10000;
      cfg.n_iter = rng() % 20;
      cfg.stop_tol = trial % 2 ? 0.0 : unif(rng) * 1e-6;
      cfg.base.x_true = testutil::random_vector(rng, 3, 2.0);
      cfg.base.h_mean = testutil::random_vector(rng, 5, 1.0);
      Vector diag(5);
      for (std::size_t i = 0; i < 5; ++i) diag[i] = unif(rng) * 1e-4;
      cfg.base.c_ee = Matrix::diagonal(diag);
      const Matrix half = testutil::random_matrix(rng, 5, 5);
      cfg.base.c_hh = mat_mul(half, transpose(half));
      cfg.sigma_grid.clear();
      double sigma = 1e-8 * unif(rng);
      for (int g = 0; g < 4; ++g) {
        cfg.sigma_grid.push_back(sigma);
        sigma *= 10.0 * unif(rng) + 1.1;
      }

      const SweepConfig back = parse_config(serialize_config(cfg));
      REQUIRE(back.base.x_true == cfg.base.x_true);
      REQUIRE(back.base.h_mean == cfg.base.h_mean);
      REQUIRE(back.base.c_hh == cfg.base.c_hh);
      REQUIRE(back.base.c_ee == cfg.base.c_ee);
      REQUIRE(back.base.seed == cfg.base.seed);
      REQUIRE(back.sigma_grid == cfg.sigma_grid);
      REQUIRE(back.trials == cfg.trials);
      REQUIRE(back.n_iter == cfg.n_iter);
      REQUIRE(back.stop_tol == cfg.stop_tol);
      REQUIRE(serialize_config(back) == serialize_config(cfg));
    }
  }
}
