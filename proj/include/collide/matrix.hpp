#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace collide {

using Vector = std::vector<double>;

// Thrown when an iterative numerical routine fails to converge or a
// consistency check between two computational routes breaks down.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dense row-major real matrix for the small dimensions used throughout
// (d <= 16). Entries are always finite.
class Matrix {
 public:
  Matrix() = default;

  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    if (rows == 0 || cols == 0) {
      throw std::invalid_argument("matrix dimensions must be positive");
    }
  }

  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (rows == 0 || cols == 0) {
      throw std::invalid_argument("matrix dimensions must be positive");
    }
    if (data_.size() != rows * cols) {
      throw std::invalid_argument("matrix entry count " + std::to_string(data_.size()) +
                                  " does not match " + std::to_string(rows) + "x" +
                                  std::to_string(cols));
    }
    check_finite();
  }

  Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    if (rows_ == 0 || cols_ == 0) {
      throw std::invalid_argument("matrix dimensions must be positive");
    }
    data_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
      if (row.size() != cols_) {
        throw std::invalid_argument("ragged matrix literal");
      }
      data_.insert(data_.end(), row.begin(), row.end());
    }
    check_finite();
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix diagonal(std::span<const double> diag) {
    Matrix m(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> entries() const { return data_; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * cols_, cols_);
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  // Principal submatrix [M]_I for an index set I (0-based, any order).
  Matrix principal(std::span<const std::size_t> index) const {
    Matrix sub(index.size(), index.size());
    for (std::size_t a = 0; a < index.size(); ++a)
      for (std::size_t b = 0; b < index.size(); ++b) sub(a, b) = (*this)(index[a], index[b]);
    return sub;
  }

  Vector diag() const {
    Vector d(std::min(rows_, cols_));
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = (*this)(i, i);
    return d;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("matrix product dimension mismatch");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const double aik = a(i, k);
        if (aik == 0.0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend Vector operator*(const Matrix& a, std::span<const double> x) {
    if (a.cols_ != x.size()) throw std::invalid_argument("matrix-vector dimension mismatch");
    Vector y(a.rows_, 0.0);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < a.cols_; ++j) s += a(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) {
    a.require_same_shape(b);
    for (std::size_t k = 0; k < a.data_.size(); ++k) a.data_[k] += b.data_[k];
    return a;
  }

  friend Matrix operator-(Matrix a, const Matrix& b) {
    a.require_same_shape(b);
    for (std::size_t k = 0; k < a.data_.size(); ++k) a.data_[k] -= b.data_[k];
    return a;
  }

  friend Matrix operator*(double s, Matrix a) {
    for (double& v : a.data_) v *= s;
    return a;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  double max_abs_diff(const Matrix& other) const {
    require_same_shape(other);
    double m = 0.0;
    for (std::size_t k = 0; k < data_.size(); ++k) m = std::max(m, std::abs(data_[k] - other.data_[k]));
    return m;
  }

  double asymmetry() const {
    if (!square()) return INFINITY;
    double m = 0.0;
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = i + 1; j < cols_; ++j) m = std::max(m, std::abs((*this)(i, j) - (*this)(j, i)));
    return m;
  }

 private:
  void check_finite() const {
    for (double v : data_) {
      if (!std::isfinite(v)) throw std::invalid_argument("matrix entries must be finite");
    }
  }

  void require_same_shape(const Matrix& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
      throw std::invalid_argument("matrix shape mismatch");
    }
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline Vector column(const Matrix& m, std::size_t j) {
  Vector c(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) c[i] = m(i, j);
  return c;
}

// Solves M x = b by Gaussian elimination with partial pivoting. Returns false
// when a pivot falls below `pivot_tol` in magnitude.
inline bool solve_linear(Matrix m, std::span<const double> b, std::span<double> x,
                         double pivot_tol = 1e-12) {
  const std::size_t n = m.rows();
  Vector rhs(b.begin(), b.end());
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(m(r, col)) > std::abs(m(piv, col))) piv = r;
    if (std::abs(m(piv, col)) < pivot_tol) return false;
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(piv, j), m(col, j));
      std::swap(rhs[piv], rhs[col]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = m(r, col) / m(col, col);
      if (f == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) m(r, j) -= f * m(col, j);
      rhs[r] -= f * rhs[col];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = rhs[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= m(i, j) * x[j];
    x[i] = s / m(i, i);
  }
  return true;
}

}  // namespace collide
