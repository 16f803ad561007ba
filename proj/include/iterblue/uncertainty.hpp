#pragma once

#include <cstddef>
#include <variant>

#include "iterblue/matrix.hpp"

namespace iterblue {

/// Independent per-entry error variances of the estimated measurement matrix.
struct Unstructured {
  Matrix v;  // N_y x N_x, entries >= 0

  explicit Unstructured(Matrix variances);
};

/// Convolution-structured measurement matrix built from an estimated impulse
/// response with error covariance c_ee.
struct Convolution {
  Matrix c_ee;  // N_h x N_h, symmetric PSD
  std::size_t n_x;

  Convolution(Matrix error_cov, std::size_t n_x);
};

using UncertaintyModel = std::variant<Unstructured, Convolution>;

/// Consistent problem sizes; for convolution models n_y = n_x + n_h - 1.
struct ModelDims {
  std::size_t n_y;
  std::size_t n_x;
  std::size_t n_h;  // convolution only; 0 for unstructured
};

/// Dims implied by a model for the given measurement count, validated
/// against the overdetermined full-rank setting (n_y > n_x).
ModelDims model_dims(const UncertaintyModel& model, std::size_t n_y);

/// Linear-convolution matrix of h with an n_x-long signal: column i is h
/// shifted down by i positions, zero padded to length h.len + n_x - 1.
Matrix conv_matrix(const Vector& h, std::size_t n_x);

/// n x n matrix with ones on the first subdiagonal; multiplication shifts a
/// vector down one position.
Matrix shift_matrix(std::size_t n);

/// P(x) = sum_k x_k D^(k-1), built by direct band placement. Satisfies
/// B x = P(x) b1 for the first column b1 of any convolution-structured B.
Matrix build_px(const Vector& x, std::size_t n_y);

/// Overall-noise covariance diag(v |x|^2) + c_nn for independent entrywise
/// model errors.
Matrix cov_unstructured(const Matrix& v, const Vector& x, const Matrix& c_nn);

/// Overall-noise covariance P(x) C_b1b1 P(x)^T + c_nn for convolution
/// models, where C_b1b1 embeds c_ee in the top-left block.
Matrix cov_convolution(const Matrix& c_ee, const Vector& x, const Matrix& c_nn);

/// Dispatches to cov_unstructured / cov_convolution for the model variant.
Matrix overall_noise_cov(const UncertaintyModel& model, const Vector& x,
                         const Matrix& c_nn);

}  // namespace iterblue
