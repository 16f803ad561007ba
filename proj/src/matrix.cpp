#include "iterblue/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace iterblue {

namespace {

void require_finite(const std::vector<double>& entries, const char* what) {
  for (double v : entries) {
    if (!std::isfinite(v)) {
      throw ContractError(std::string(what) + ": non-finite entry");
    }
  }
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shape mismatch (" +
                         std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                         " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()) + ")");
  }
}

void require_same_len(const Vector& a, const Vector& b, const char* op) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(op) + ": length mismatch (" +
                         std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
  }
}

}  // namespace

Vector::Vector(std::size_t len) : entries_(len, 0.0) {
  if (len == 0) throw ContractError("Vector: length must be >= 1");
}

Vector::Vector(std::initializer_list<double> init)
    : entries_(init.begin(), init.end()) {
  if (entries_.empty()) throw ContractError("Vector: length must be >= 1");
  require_finite(entries_, "Vector");
}

Vector Vector::from(std::vector<double> entries) {
  if (entries.empty()) throw ContractError("Vector: length must be >= 1");
  require_finite(entries, "Vector");
  Vector v(entries.size());
  v.entries_ = std::move(entries);
  return v;
}

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, 0.0) {
  if (rows == 0 || cols == 0) {
    throw ContractError("Matrix: rows and cols must be >= 1");
  }
}

Matrix Matrix::from(std::size_t rows, std::size_t cols,
                    std::vector<double> entries) {
  Matrix m(rows, cols);
  if (entries.size() != rows * cols) {
    throw DimensionError("Matrix: expected " + std::to_string(rows * cols) +
                         " entries, got " + std::to_string(entries.size()));
  }
  require_finite(entries, "Matrix");
  m.entries_ = std::move(entries);
  return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  if (rows.size() == 0) throw ContractError("Matrix: rows must be >= 1");
  const std::size_t cols = rows.begin()->size();
  std::vector<double> entries;
  entries.reserve(rows.size() * cols);
  for (const auto& row : rows) {
    if (row.size() != cols) {
      throw DimensionError("Matrix: ragged row lengths");
    }
    entries.insert(entries.end(), row.begin(), row.end());
  }
  return from(rows.size(), cols, std::move(entries));
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::scaled_identity(std::size_t n, double value) {
  if (!std::isfinite(value)) throw ContractError("Matrix: non-finite entry");
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = value;
  return m;
}

Matrix Matrix::diagonal(const Vector& d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Matrix mat_mul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("mat_mul: a.cols (" + std::to_string(a.cols()) +
                         ") != b.rows (" + std::to_string(b.rows()) + ")");
  }
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) {
        out(i, j) += aik * b(k, j);
      }
    }
  }
  return out;
}

Vector mat_vec(const Matrix& a, const Vector& v) {
  if (a.cols() != v.size()) {
    throw DimensionError("mat_vec: a.cols (" + std::to_string(a.cols()) +
                         ") != v.len (" + std::to_string(v.size()) + ")");
  }
  Vector out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  }
  return out;
}

Matrix add(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "add");
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) + b(i, j);
  return out;
}

Matrix sub(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "sub");
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) - b(i, j);
  return out;
}

Vector add(const Vector& a, const Vector& b) {
  require_same_len(a, b, "add");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Vector sub(const Vector& a, const Vector& b) {
  require_same_len(a, b, "sub");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

Matrix scaled(const Matrix& a, double factor) {
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = factor * a(i, j);
  return out;
}

Vector scaled(const Vector& a, double factor) {
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = factor * a[i];
  return out;
}

double dot(const Vector& a, const Vector& b) {
  require_same_len(a, b, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vector& a) { return std::sqrt(dot(a, a)); }

double trace(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) s += a(i, i);
  return s;
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double v : a.entries()) m = std::max(m, std::fabs(v));
  return m;
}

double max_abs(const Vector& a) {
  double m = 0.0;
  for (double v : a.entries()) m = std::max(m, std::fabs(v));
  return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.entries().size(); ++i)
    m = std::max(m, std::fabs(a.entries()[i] - b.entries()[i]));
  return m;
}

double max_abs_diff(const Vector& a, const Vector& b) {
  require_same_len(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

bool all_finite(const Vector& a) {
  for (double v : a.entries())
    if (!std::isfinite(v)) return false;
  return true;
}

bool is_symmetric(const Matrix& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  double asym = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      asym = std::max(asym, std::fabs(a(i, j) - a(j, i)));
  return asym <= rel_tol * max_abs(a);
}

Matrix symmetrize(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw DimensionError("symmetrize: matrix not square");
  }
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      out(i, j) = 0.5 * (a(i, j) + a(j, i));
  return out;
}

}  // namespace iterblue
