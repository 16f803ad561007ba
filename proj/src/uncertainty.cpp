#include "iterblue/uncertainty.hpp"

#include <string>

#include "iterblue/linalg.hpp"

namespace iterblue {

Unstructured::Unstructured(Matrix variances) : v(std::move(variances)) {
  for (double e : v.entries()) {
    if (e < 0.0) {
      throw ContractError("Unstructured: negative variance entry");
    }
  }
}

Convolution::Convolution(Matrix error_cov, std::size_t n_x)
    : c_ee(std::move(error_cov)), n_x(n_x) {
  if (n_x == 0) throw ContractError("Convolution: n_x must be >= 1");
  if (c_ee.rows() != c_ee.cols()) {
    throw DimensionError("Convolution: c_ee must be square");
  }
  if (!is_symmetric(c_ee, kSymmetryTol)) {
    throw ContractError("Convolution: c_ee not symmetric within tolerance");
  }
  require_psd(c_ee, "Convolution: c_ee");
}

ModelDims model_dims(const UncertaintyModel& model, std::size_t n_y) {
  ModelDims dims{n_y, 0, 0};
  if (const auto* u = std::get_if<Unstructured>(&model)) {
    if (u->v.rows() != n_y) {
      throw DimensionError("model_dims: v has " + std::to_string(u->v.rows()) +
                           " rows, expected " + std::to_string(n_y));
    }
    dims.n_x = u->v.cols();
  } else {
    const auto& c = std::get<Convolution>(model);
    dims.n_x = c.n_x;
    dims.n_h = c.c_ee.rows();
    if (n_y != dims.n_x + dims.n_h - 1) {
      throw DimensionError("model_dims: n_y (" + std::to_string(n_y) +
                           ") != n_x + n_h - 1 (" +
                           std::to_string(dims.n_x + dims.n_h - 1) + ")");
    }
  }
  if (dims.n_y <= dims.n_x) {
    throw DimensionError("model_dims: need n_y > n_x, got " +
                         std::to_string(dims.n_y) + " <= " +
                         std::to_string(dims.n_x));
  }
  return dims;
}

Matrix conv_matrix(const Vector& h, std::size_t n_x) {
  if (n_x == 0) throw ContractError("conv_matrix: n_x must be >= 1");
  const std::size_t n_h = h.size();
  Matrix out(n_h + n_x - 1, n_x);
  for (std::size_t col = 0; col < n_x; ++col) {
    for (std::size_t k = 0; k < n_h; ++k) out(col + k, col) = h[k];
  }
  return out;
}

Matrix shift_matrix(std::size_t n) {
  Matrix d(n, n);
  for (std::size_t i = 1; i < n; ++i) d(i, i - 1) = 1.0;
  return d;
}

Matrix build_px(const Vector& x, std::size_t n_y) {
  if (n_y < x.size()) {
    throw DimensionError("build_px: n_y (" + std::to_string(n_y) +
                         ") < x.len (" + std::to_string(x.size()) + ")");
  }
  // x_k lands on the (k-1)-th subdiagonal
  Matrix p(n_y, n_y);
  for (std::size_t k = 0; k < x.size(); ++k) {
    for (std::size_t i = 0; i + k < n_y; ++i) p(i + k, i) = x[k];
  }
  return p;
}

Matrix cov_unstructured(const Matrix& v, const Vector& x, const Matrix& c_nn) {
  if (v.cols() != x.size()) {
    throw DimensionError("cov_unstructured: v.cols (" +
                         std::to_string(v.cols()) + ") != x.len (" +
                         std::to_string(x.size()) + ")");
  }
  if (c_nn.rows() != v.rows() || c_nn.cols() != v.rows()) {
    throw DimensionError("cov_unstructured: c_nn must be " +
                         std::to_string(v.rows()) + "x" +
                         std::to_string(v.rows()));
  }
  Vector x_sq(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) x_sq[j] = x[j] * x[j];

  Matrix out = c_nn;
  for (std::size_t i = 0; i < v.rows(); ++i) {
    double var = 0.0;
    for (std::size_t j = 0; j < v.cols(); ++j) var += v(i, j) * x_sq[j];
    out(i, i) += var;
  }
  return out;
}

Matrix cov_convolution(const Matrix& c_ee, const Vector& x, const Matrix& c_nn) {
  if (c_ee.rows() != c_ee.cols()) {
    throw DimensionError("cov_convolution: c_ee must be square");
  }
  const std::size_t n_h = c_ee.rows();
  const std::size_t n_y = n_h + x.size() - 1;
  if (c_nn.rows() != n_y || c_nn.cols() != n_y) {
    throw DimensionError("cov_convolution: c_nn must be " +
                         std::to_string(n_y) + "x" + std::to_string(n_y) +
                         ", got " + std::to_string(c_nn.rows()) + "x" +
                         std::to_string(c_nn.cols()));
  }

  // Only the top-left n_h x n_h block of C_b1b1 is non-zero, so only the
  // first n_h columns of P(x) take part in the product.
  Matrix p_left(n_y, n_h);
  for (std::size_t k = 0; k < x.size(); ++k) {
    for (std::size_t i = 0; i + k < n_y; ++i) {
      if (i < n_h) p_left(i + k, i) = x[k];
    }
  }

  Matrix pc = mat_mul(p_left, c_ee);
  Matrix model_term = mat_mul(pc, transpose(p_left));
  return add(symmetrize(model_term), c_nn);
}

Matrix overall_noise_cov(const UncertaintyModel& model, const Vector& x,
                         const Matrix& c_nn) {
  if (const auto* u = std::get_if<Unstructured>(&model)) {
    return cov_unstructured(u->v, x, c_nn);
  }
  const auto& c = std::get<Convolution>(model);
  if (x.size() != c.n_x) {
    throw DimensionError("overall_noise_cov: x.len (" +
                         std::to_string(x.size()) + ") != n_x (" +
                         std::to_string(c.n_x) + ")");
  }
  return cov_convolution(c.c_ee, x, c_nn);
}

}  // namespace iterblue
