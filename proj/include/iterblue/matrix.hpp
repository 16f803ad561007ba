#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "iterblue/error.hpp"

namespace iterblue {

/// Dense real column vector, at least one entry. Entries are checked to be
/// finite whenever a vector is built from caller-supplied data.
class Vector {
 public:
  /// Zero vector of the given length (len >= 1).
  explicit Vector(std::size_t len);
  Vector(std::initializer_list<double> init);

  /// Takes ownership of `entries`; validates length and finiteness.
  static Vector from(std::vector<double> entries);

  std::size_t size() const { return entries_.size(); }
  double operator[](std::size_t i) const { return entries_[i]; }
  double& operator[](std::size_t i) { return entries_[i]; }
  const std::vector<double>& entries() const { return entries_; }

  bool operator==(const Vector& other) const = default;

 private:
  std::vector<double> entries_;
};

/// Dense real matrix in row-major order, rows >= 1 and cols >= 1.
class Matrix {
 public:
  /// Zero matrix of the given shape.
  Matrix(std::size_t rows, std::size_t cols);

  /// Row-major data; validates count and finiteness.
  static Matrix from(std::size_t rows, std::size_t cols,
                     std::vector<double> entries);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix identity(std::size_t n);
  static Matrix scaled_identity(std::size_t n, double value);
  static Matrix diagonal(const Vector& d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t r, std::size_t c) const {
    return entries_[r * cols_ + c];
  }
  double& operator()(std::size_t r, std::size_t c) {
    return entries_[r * cols_ + c];
  }
  const std::vector<double>& entries() const { return entries_; }

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> entries_;
};

Matrix mat_mul(const Matrix& a, const Matrix& b);
Vector mat_vec(const Matrix& a, const Vector& v);
Matrix transpose(const Matrix& a);

Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Vector add(const Vector& a, const Vector& b);
Vector sub(const Vector& a, const Vector& b);
Matrix scaled(const Matrix& a, double factor);
Vector scaled(const Vector& a, double factor);

double dot(const Vector& a, const Vector& b);
double norm2(const Vector& a);
double trace(const Matrix& a);
double max_abs(const Matrix& a);
double max_abs(const Vector& a);
double max_abs_diff(const Matrix& a, const Matrix& b);
double max_abs_diff(const Vector& a, const Vector& b);
bool all_finite(const Vector& a);

/// True when max|a - a^T| <= rel_tol * max|a|.
bool is_symmetric(const Matrix& a, double rel_tol);
/// (a + a^T) / 2, absorbing round-off asymmetry.
Matrix symmetrize(const Matrix& a);

}  // namespace iterblue
