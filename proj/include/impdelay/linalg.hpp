#pragma once

// Small dense matrices for the example systems, with power-iteration norms.

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "impdelay/core.hpp"

namespace impdelay {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), a_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    a_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw DimensionError("ragged matrix literal");
      a_.insert(a_.end(), r.begin(), r.end());
    }
  }

  static Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != m.cols_) throw DimensionError("ragged matrix rows");
      for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix diagonal(const std::vector<double>& d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  std::vector<std::vector<double>> to_rows() const {
    std::vector<std::vector<double>> out(rows_, std::vector<double>(cols_));
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out[i][j] = (*this)(i, j);
    return out;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  bool symmetric(double tol = 1e-12) const {
    if (!square()) return false;
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = i + 1; j < cols_; ++j)
        if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
    return true;
  }

  bool is_zero() const {
    for (double v : a_)
      if (v != 0.0) return false;
    return true;
  }

  State apply(const State& x) const {
    if (x.size() != cols_) throw DimensionError("matrix-vector dimension mismatch");
    State y(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) y[i] += (*this)(i, j) * x[j];
    return y;
  }

  friend Matrix operator+(const Matrix& a, const Matrix& b) {
    a.check_same(b);
    Matrix c = a;
    for (std::size_t k = 0; k < c.a_.size(); ++k) c.a_[k] += b.a_[k];
    return c;
  }
  friend Matrix operator-(const Matrix& a, const Matrix& b) {
    a.check_same(b);
    Matrix c = a;
    for (std::size_t k = 0; k < c.a_.size(); ++k) c.a_[k] -= b.a_[k];
    return c;
  }
  friend Matrix operator*(double s, const Matrix& a) {
    Matrix c = a;
    for (double& v : c.a_) v *= s;
    return c;
  }
  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw DimensionError("matrix product dimension mismatch");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k)
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += a(i, k) * b(k, j);
    return c;
  }

 private:
  void check_same(const Matrix& b) const {
    if (rows_ != b.rows_ || cols_ != b.cols_) throw DimensionError("matrix dimension mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> a_;
};

namespace detail {

// Dominant eigenvalue of a symmetric positive semidefinite matrix.
inline double psd_power_iteration(const Matrix& m, double tol = 1e-12, int max_iter = 10000) {
  const std::size_t n = m.rows();
  if (m.is_zero()) return 0.0;
  State v(n);
  // Deterministic start with distinct components so it is not orthogonal to
  // the dominant eigenvector of the small symmetric matrices we see.
  for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.5 * static_cast<double>(i) / static_cast<double>(n) + 0.01 * static_cast<double>(i * i);
  double nv = norm2(v);
  for (double& x : v) x /= nv;
  double lambda = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    State w = m.apply(v);
    const double next = dot(v, w);  // Rayleigh quotient
    const double nw = norm2(w);
    if (nw == 0.0) return 0.0;
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nw;
    if (std::abs(next - lambda) <= tol * std::max(1.0, std::abs(next))) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  // One last Rayleigh quotient on the converged vector.
  return dot(v, m.apply(v));
}

}  // namespace detail

/// Induced 2-norm (largest singular value) via power iteration on M^T M.
inline double spectral_norm(const Matrix& m) {
  if (!m.square()) throw DimensionError("spectral_norm expects a square matrix");
  return std::sqrt(std::max(0.0, detail::psd_power_iteration(m.transpose() * m)));
}

/// Largest eigenvalue of a symmetric matrix: power iteration on M + s I with s = ||M||.
inline double sym_lambda_max(const Matrix& m) {
  if (!m.square()) throw DimensionError("sym_lambda_max expects a square matrix");
  if (!m.symmetric(1e-12)) throw DomainError("sym_lambda_max expects a symmetric matrix");
  const double shift = spectral_norm(m);
  const Matrix shifted = m + shift * Matrix::identity(m.rows());
  return detail::psd_power_iteration(shifted) - shift;
}

}  // namespace impdelay
