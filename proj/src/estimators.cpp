#include "iterblue/estimators.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "iterblue/linalg.hpp"

namespace iterblue {

LinearProblem::LinearProblem(Vector y_in, Matrix h_hat_in, Matrix c_nn_in,
                             UncertaintyModel uncertainty_in)
    : y(std::move(y_in)),
      h_hat(std::move(h_hat_in)),
      c_nn(std::move(c_nn_in)),
      uncertainty(std::move(uncertainty_in)) {
  const ModelDims d = model_dims(uncertainty, y.size());
  if (h_hat.rows() != d.n_y || h_hat.cols() != d.n_x) {
    throw DimensionError("LinearProblem: h_hat must be " +
                         std::to_string(d.n_y) + "x" + std::to_string(d.n_x) +
                         ", got " + std::to_string(h_hat.rows()) + "x" +
                         std::to_string(h_hat.cols()));
  }
  if (c_nn.rows() != d.n_y || c_nn.cols() != d.n_y) {
    throw DimensionError("LinearProblem: c_nn must be " +
                         std::to_string(d.n_y) + "x" + std::to_string(d.n_y));
  }
  if (!is_symmetric(c_nn, kSymmetryTol)) {
    throw ContractError("LinearProblem: c_nn not symmetric within tolerance");
  }
}

Vector ls_estimate(const Matrix& h_hat, const Vector& y) {
  return lstsq(h_hat, y);
}

Vector blue(const Matrix& h, const Matrix& c, const Vector& y) {
  if (c.rows() != c.cols() || c.rows() != h.rows() || y.size() != h.rows()) {
    throw DimensionError("blue: inconsistent shapes (h " +
                         std::to_string(h.rows()) + "x" +
                         std::to_string(h.cols()) + ", c " +
                         std::to_string(c.rows()) + "x" +
                         std::to_string(c.cols()) + ", y " +
                         std::to_string(y.size()) + ")");
  }
  if (max_abs(c) == 0.0) {
    // noise-free limit: the weighting cancels
    return lstsq(h, y);
  }
  SpdFactor factor(c);
  Matrix h_whitened = factor.whiten(h);
  Vector y_whitened = factor.whiten(y);
  return lstsq(h_whitened, y_whitened);
}

Vector oracle_blue_perfect_model(const Matrix& h_true, const Matrix& c_nn,
                                 const Vector& y) {
  return blue(h_true, c_nn, y);
}

Vector oracle_blue_perfect_cww(const Matrix& h_hat, const Matrix& c_ww_true,
                               const Vector& y) {
  return blue(h_hat, c_ww_true, y);
}

EstimateTrace iterative_blue(const LinearProblem& problem,
                             const IterationConfig& config) {
  EstimateTrace trace;
  trace.estimates.push_back(ls_estimate(problem.h_hat, problem.y));
  const double initial_norm = norm2(trace.estimates.front());

  for (std::size_t k = 0; k < config.n_iter; ++k) {
    Vector next(trace.estimates.back().size());
    try {
      Matrix c_ww =
          overall_noise_cov(problem.uncertainty, trace.estimates.back(),
                            problem.c_nn);
      next = blue(problem.h_hat, c_ww, problem.y);
    } catch (const Error& err) {
      trace.iterations_run = k;
      throw IterationError("iteration " + std::to_string(k + 1) +
                               " failed: " + err.what(),
                           std::move(trace));
    }

    if (!all_finite(next) || norm2(next) > 1e12 * initial_norm) {
      trace.iterations_run = k;
      throw DivergenceError("estimate diverged at iteration " +
                                std::to_string(k + 1),
                            std::move(trace));
    }

    const Vector& prev = trace.estimates.back();
    const double rel_step =
        norm2(sub(next, prev)) / std::max(norm2(prev), 1e-300);
    trace.estimates.push_back(std::move(next));
    trace.step_norms.push_back(rel_step);

    if (config.stop_tol > 0.0 && rel_step <= config.stop_tol) {
      trace.stopped_early = true;
      break;
    }
  }

  trace.iterations_run = trace.estimates.size() - 1;
  return trace;
}

}  // namespace iterblue
