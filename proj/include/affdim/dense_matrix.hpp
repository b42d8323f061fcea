#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace affdim {

/// Minimal row-major dense matrix; just enough for power iteration.
template <class T>
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const T> data() const { return data_; }

  /// y = M x, fixed summation order.
  std::vector<T> apply(std::span<const T> x) const {
    check(x.size() == cols_);
    std::vector<T> y(rows_, T(0));
    for (std::size_t i = 0; i < rows_; ++i) {
      T acc(0);
      const T* row = &data_[i * cols_];
      for (std::size_t j = 0; j < cols_; ++j) acc += row[j] * x[j];
      y[i] = acc;
    }
    return y;
  }

  /// y = M^T x.
  std::vector<T> apply_transpose(std::span<const T> x) const {
    check(x.size() == rows_);
    std::vector<T> y(cols_, T(0));
    for (std::size_t i = 0; i < rows_; ++i) {
      const T xi = x[i];
      const T* row = &data_[i * cols_];
      for (std::size_t j = 0; j < cols_; ++j) y[j] += row[j] * xi;
    }
    return y;
  }

  DenseMatrix transpose() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  DenseMatrix& operator+=(const DenseMatrix& o) {
    check(o.rows_ == rows_ && o.cols_ == cols_);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  DenseMatrix& operator-=(const DenseMatrix& o) {
    check(o.rows_ == rows_ && o.cols_ == cols_);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  DenseMatrix& operator*=(T k) {
    for (T& x : data_) x *= k;
    return *this;
  }
  friend DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
  friend DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
  friend DenseMatrix operator*(T k, DenseMatrix a) { return a *= k; }

 private:
  static void check(bool ok) {
    if (!ok) throw std::invalid_argument("DenseMatrix: dimension mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

}  // namespace affdim
