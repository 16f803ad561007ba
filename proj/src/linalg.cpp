#include "iterblue/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace iterblue {

namespace {

Matrix checked_symmetric_input(const Matrix& a, const char* what) {
  if (a.rows() != a.cols()) {
    throw DimensionError(std::string(what) + ": matrix not square (" +
                         std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + ")");
  }
  if (!is_symmetric(a, kSymmetryTol)) {
    throw ContractError(std::string(what) +
                        ": matrix not symmetric within tolerance");
  }
  return symmetrize(a);
}

}  // namespace

SpdFactor::SpdFactor(const Matrix& a) : l_(a.rows(), a.cols()) {
  Matrix s = checked_symmetric_input(a, "spd_factor");
  const std::size_t n = s.rows();
  for (std::size_t j = 0; j < n; ++j) {
    double d = s(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l_(j, k) * l_(j, k);
    if (!(d > 0.0)) {
      throw ContractError("spd_factor: non-positive pivot at column " +
                          std::to_string(j) + " (matrix not positive definite)");
    }
    const double ljj = std::sqrt(d);
    l_(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = s(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l_(i, k) * l_(j, k);
      l_(i, j) = v / ljj;
    }
  }
}

Vector SpdFactor::whiten(const Vector& b) const {
  if (b.size() != dim()) {
    throw DimensionError("spd_factor: rhs length " + std::to_string(b.size()) +
                         " != dim " + std::to_string(dim()));
  }
  Vector x(b.size());
  for (std::size_t i = 0; i < dim(); ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l_(i, k) * x[k];
    x[i] = s / l_(i, i);
  }
  return x;
}

Matrix SpdFactor::whiten(const Matrix& b) const {
  if (b.rows() != dim()) {
    throw DimensionError("spd_factor: rhs rows " + std::to_string(b.rows()) +
                         " != dim " + std::to_string(dim()));
  }
  Matrix x(b.rows(), b.cols());
  for (std::size_t c = 0; c < b.cols(); ++c) {
    for (std::size_t i = 0; i < dim(); ++i) {
      double s = b(i, c);
      for (std::size_t k = 0; k < i; ++k) s -= l_(i, k) * x(k, c);
      x(i, c) = s / l_(i, i);
    }
  }
  return x;
}

Vector SpdFactor::solve(const Vector& b) const {
  Vector x = whiten(b);
  // back substitution with L^T
  for (std::size_t ii = dim(); ii-- > 0;) {
    double s = x[ii];
    for (std::size_t k = ii + 1; k < dim(); ++k) s -= l_(k, ii) * x[k];
    x[ii] = s / l_(ii, ii);
  }
  return x;
}

Matrix SpdFactor::solve(const Matrix& b) const {
  Matrix x = whiten(b);
  for (std::size_t c = 0; c < b.cols(); ++c) {
    for (std::size_t ii = dim(); ii-- > 0;) {
      double s = x(ii, c);
      for (std::size_t k = ii + 1; k < dim(); ++k) s -= l_(k, ii) * x(k, c);
      x(ii, c) = s / l_(ii, ii);
    }
  }
  return x;
}

Matrix solve_spd(const Matrix& a, const Matrix& b) {
  return SpdFactor(a).solve(b);
}

Vector solve_spd(const Matrix& a, const Vector& b) {
  return SpdFactor(a).solve(b);
}

Vector lstsq(const Matrix& a, const Vector& y) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (y.size() != m) {
    throw DimensionError("lstsq: y length " + std::to_string(y.size()) +
                         " != a.rows " + std::to_string(m));
  }
  if (m < n) {
    throw DimensionError("lstsq: underdetermined system (" + std::to_string(m) +
                         "x" + std::to_string(n) + ")");
  }

  Matrix qr = a;
  Vector rhs = y;
  std::vector<double> rdiag(n, 0.0);

  for (std::size_t j = 0; j < n; ++j) {
    double nrm = 0.0;
    for (std::size_t i = j; i < m; ++i) nrm += qr(i, j) * qr(i, j);
    nrm = std::sqrt(nrm);
    if (nrm == 0.0) continue;  // flagged by the rank check below
    if (qr(j, j) < 0.0) nrm = -nrm;
    for (std::size_t i = j; i < m; ++i) qr(i, j) /= nrm;
    qr(j, j) += 1.0;

    for (std::size_t k = j + 1; k < n; ++k) {
      double s = 0.0;
      for (std::size_t i = j; i < m; ++i) s += qr(i, j) * qr(i, k);
      s = -s / qr(j, j);
      for (std::size_t i = j; i < m; ++i) qr(i, k) += s * qr(i, j);
    }
    double s = 0.0;
    for (std::size_t i = j; i < m; ++i) s += qr(i, j) * rhs[i];
    s = -s / qr(j, j);
    for (std::size_t i = j; i < m; ++i) rhs[i] += s * qr(i, j);

    rdiag[j] = -nrm;
  }

  double dmax = 0.0;
  double dmin = std::numeric_limits<double>::infinity();
  for (double d : rdiag) {
    dmax = std::max(dmax, std::fabs(d));
    dmin = std::min(dmin, std::fabs(d));
  }
  if (dmax == 0.0 || dmin < kRankTol * dmax) {
    throw RankError("lstsq: matrix is rank deficient");
  }

  Vector x(n);
  for (std::size_t jj = n; jj-- > 0;) {
    double s = rhs[jj];
    for (std::size_t k = jj + 1; k < n; ++k) s -= qr(jj, k) * x[k];
    x[jj] = s / rdiag[jj];
  }
  return x;
}

SymEig sym_eig(const Matrix& a) {
  Matrix s = checked_symmetric_input(a, "sym_eig");
  const std::size_t n = s.rows();
  Matrix v = Matrix::identity(n);

  auto off_sq = [&]() {
    double sum = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) sum += 2.0 * s(p, q) * s(p, q);
    return sum;
  };
  double norm_sq = 0.0;
  for (double e : s.entries()) norm_sq += e * e;

  for (int sweep = 0; sweep < 100; ++sweep) {
    if (off_sq() <= 1e-30 * std::max(norm_sq, 1e-300)) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = s(p, q);
        if (apq == 0.0) continue;
        const double theta = (s(q, q) - s(p, p)) / (2.0 * apq);
        const double t =
            (theta >= 0.0 ? 1.0 : -1.0) /
            (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double skp = s(k, p);
          const double skq = s(k, q);
          s(k, p) = c * skp - sn * skq;
          s(k, q) = sn * skp + c * skq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double spk = s(p, k);
          const double sqk = s(q, k);
          s(p, k) = c * spk - sn * sqk;
          s(q, k) = sn * spk + c * sqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return s(i, i) < s(j, j); });

  SymEig out{Vector(n), Matrix(n, n)};
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = s(order[j], order[j]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
  }
  return out;
}

void require_psd(const Matrix& a, const char* what) {
  SymEig eig = sym_eig(a);
  const double tol = kPsdTol * std::max(trace(a), 0.0);
  if (eig.values[0] < -tol) {
    throw ContractError(std::string(what) +
                        ": matrix not positive semidefinite (min eigenvalue " +
                        std::to_string(eig.values[0]) + ")");
  }
}

Matrix psd_sqrt(const Matrix& a) {
  SymEig eig = sym_eig(a);
  const double tol = kPsdTol * std::max(trace(a), 0.0);
  const std::size_t n = a.rows();
  Matrix scaled_vecs(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const double lambda = eig.values[j];
    if (lambda < -tol) {
      throw ContractError("psd_sqrt: matrix not positive semidefinite");
    }
    const double root = std::sqrt(std::max(lambda, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      scaled_vecs(i, j) = eig.vectors(i, j) * root;
  }
  return mat_mul(scaled_vecs, transpose(eig.vectors));
}

}  // namespace iterblue
