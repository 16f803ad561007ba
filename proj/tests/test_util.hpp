#pragma once

// Shared helpers for the test suites. The solvers here (Gauss-Jordan
// inverse, naive products) are deliberately independent of the library's
// factorization paths so they can serve as oracles.

#include <cmath>
#include <random>
#include <vector>

#include "iterblue/matrix.hpp"

namespace testutil {

using iterblue::Matrix;
using iterblue::Vector;

inline double rel_diff(const Vector& a, const Vector& b) {
  const double denom =
      std::max({iterblue::norm2(a), iterblue::norm2(b), 1e-300});
  return iterblue::norm2(iterblue::sub(a, b)) / denom;
}

inline Vector random_vector(std::mt19937_64& rng, std::size_t n,
                            double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Vector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

inline Matrix random_matrix(std::mt19937_64& rng, std::size_t rows,
                            std::size_t cols, double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = dist(rng);
  return m;
}

// M^T M + epsilon I: symmetric positive definite by construction.
inline Matrix random_spd(std::mt19937_64& rng, std::size_t n,
                         double epsilon = 1.0) {
  const Matrix m = random_matrix(rng, n, n);
  Matrix spd = iterblue::mat_mul(iterblue::transpose(m), m);
  for (std::size_t i = 0; i < n; ++i) spd(i, i) += epsilon;
  return spd;
}

// Gauss-Jordan inverse with partial pivoting; test-only oracle.
inline Matrix explicit_inverse(const Matrix& a) {
  const std::size_t n = a.rows();
  Matrix work = a;
  Matrix inv = Matrix::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(work(r, col)) > std::fabs(work(pivot, col))) pivot = r;
    }
    for (std::size_t c = 0; c < n; ++c) {
      std::swap(work(col, c), work(pivot, c));
      std::swap(inv(col, c), inv(pivot, c));
    }
    const double p = work(col, col);
    for (std::size_t c = 0; c < n; ++c) {
      work(col, c) /= p;
      inv(col, c) /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = work(r, col);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < n; ++c) {
        work(r, c) -= f * work(col, c);
        inv(r, c) -= f * inv(col, c);
      }
    }
  }
  return inv;
}

// Normal-equations least squares through the explicit inverse; oracle for
// the QR path.
inline Vector normal_equations_ls(const Matrix& a, const Vector& y) {
  const Matrix at = iterblue::transpose(a);
  const Matrix ata = iterblue::mat_mul(at, a);
  return iterblue::mat_vec(iterblue::mat_mul(explicit_inverse(ata), at), y);
}

// (H^T C^-1 H)^-1 H^T C^-1 y evaluated with explicit inverses; oracle for
// the whitened BLUE.
inline Vector brute_force_blue(const Matrix& h, const Matrix& c,
                               const Vector& y) {
  const Matrix c_inv = explicit_inverse(c);
  const Matrix htc = iterblue::mat_mul(iterblue::transpose(h), c_inv);
  const Matrix gram_inv = explicit_inverse(iterblue::mat_mul(htc, h));
  return iterblue::mat_vec(iterblue::mat_mul(gram_inv, htc), y);
}

}  // namespace testutil
