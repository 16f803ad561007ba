#pragma once

#include <cstddef>
#include <vector>

#include "iterblue/matrix.hpp"
#include "iterblue/uncertainty.hpp"

namespace iterblue {

/// One estimation task: measurements y = H x + n where only the estimate
/// h_hat of H is known, together with the noise covariance and an
/// uncertainty model for the error H - h_hat.
struct LinearProblem {
  Vector y;
  Matrix h_hat;
  Matrix c_nn;
  UncertaintyModel uncertainty;

  /// Validates mutual shape consistency (n_y > n_x, covariance square, ...).
  /// Rank of h_hat and definiteness of c_nn are checked at solve time.
  LinearProblem(Vector y, Matrix h_hat, Matrix c_nn,
                UncertaintyModel uncertainty);

  ModelDims dims() const { return model_dims(uncertainty, y.size()); }
};

struct IterationConfig {
  std::size_t n_iter = 10;  // 0 returns the LS initialization only
  double stop_tol = 0.0;    // relative l2 change threshold; 0 disables
};

/// Estimates x_0 ... x_K and per-update relative step sizes.
struct EstimateTrace {
  std::vector<Vector> estimates;   // estimates[0] is the LS solution
  std::vector<double> step_norms;  // |x_{k+1} - x_k| / max(|x_k|, tiny)
  bool stopped_early = false;
  std::size_t iterations_run = 0;
};

/// A solver failure inside the reweighting loop; carries the iterates
/// accumulated before the failure.
class IterationError : public Error {
 public:
  IterationError(const std::string& message, EstimateTrace trace)
      : Error(message), trace_(std::move(trace)) {}

  const EstimateTrace& trace() const { return trace_; }

 private:
  EstimateTrace trace_;
};

/// An iterate left the finite/bounded region (rare, but must be detected).
class DivergenceError : public IterationError {
 public:
  using IterationError::IterationError;
};

/// Ordinary least squares (H^T H)^{-1} H^T y via orthogonal factorization.
Vector ls_estimate(const Matrix& h_hat, const Vector& y);

/// Best linear unbiased estimator (H^T C^{-1} H)^{-1} H^T C^{-1} y.
/// Factors c, whitens h and y, then solves a standard least-squares
/// problem; explicit inverses are never formed. An all-zero c is accepted
/// as the noise-free limit, where the weighting cancels and the estimator
/// reduces to plain LS.
Vector blue(const Matrix& h, const Matrix& c, const Vector& y);

/// Reference bound: BLUE on the true measurement matrix.
Vector oracle_blue_perfect_model(const Matrix& h_true, const Matrix& c_nn,
                                 const Vector& y);

/// Reference bound: BLUE on h_hat with the overall-noise covariance built
/// from the true parameter vector.
Vector oracle_blue_perfect_cww(const Matrix& h_hat, const Matrix& c_ww_true,
                               const Vector& y);

/// Iteratively reweighted BLUE. Starts from LS, rebuilds the overall-noise
/// covariance from the current iterate, re-solves, and repeats for
/// config.n_iter updates (or until the relative step drops below
/// config.stop_tol, when positive). Iterates are checked for non-finite
/// entries and for growth beyond 1e12 x the initial norm.
EstimateTrace iterative_blue(const LinearProblem& problem,
                             const IterationConfig& config);

}  // namespace iterblue
