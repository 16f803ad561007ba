#pragma once

#include "iterblue/matrix.hpp"

namespace iterblue {

/// Required symmetry of SPD/eigen inputs, relative to the largest entry.
inline constexpr double kSymmetryTol = 1e-10;
/// Smallest R diagonal of a full-rank least-squares factor, relative.
inline constexpr double kRankTol = 1e-12;
/// Most negative admissible eigenvalue of a PSD matrix, relative to trace.
inline constexpr double kPsdTol = 1e-12;

/// Cholesky factorization a = L L^T of a symmetric positive definite matrix.
/// The input is symmetrized as (a + a^T)/2 before factoring; asymmetry beyond
/// kSymmetryTol or a non-positive pivot raises ContractError.
class SpdFactor {
 public:
  explicit SpdFactor(const Matrix& a);

  std::size_t dim() const { return l_.rows(); }
  /// x with a x = b.
  Vector solve(const Vector& b) const;
  Matrix solve(const Matrix& b) const;
  /// L^{-1} b (forward substitution); whitening transform for covariances.
  Vector whiten(const Vector& b) const;
  Matrix whiten(const Matrix& b) const;

 private:
  Matrix l_;
};

/// Solves a x = b for SPD a by factor-and-solve; never forms a^{-1}.
Matrix solve_spd(const Matrix& a, const Matrix& b);
Vector solve_spd(const Matrix& a, const Vector& b);

/// argmin ||a x - y||_2 via Householder QR; a.rows >= a.cols required.
/// Raises RankError when min|R_ii| < kRankTol * max|R_ii|.
Vector lstsq(const Matrix& a, const Vector& y);

/// Eigendecomposition of a symmetric matrix (cyclic Jacobi).
/// values ascending; vectors holds the matching orthonormal columns.
struct SymEig {
  Vector values;
  Matrix vectors;
};
SymEig sym_eig(const Matrix& a);

/// Raises ContractError unless all eigenvalues >= -kPsdTol * trace.
void require_psd(const Matrix& a, const char* what);

/// Symmetric square root of a PSD matrix; negative round-off eigenvalues
/// within tolerance are clamped to zero.
Matrix psd_sqrt(const Matrix& a);

}  // namespace iterblue
