#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "tactx/errors.hpp"
#include "tactx/parallel.hpp"

namespace tactx::num {

// Dense row-major matrix of 64-bit floats. A vector is a single-row or
// single-column matrix. All reductions run in a fixed order so results are
// bit-reproducible.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix column(const std::vector<double>& values) {
    Matrix m(values.size(), 1);
    m.data_ = values;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline std::string shape_str(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

// C = A * B. Each output element accumulates its k-products in ascending k
// order regardless of blocking or thread count.
inline Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: inner dimensions differ (" + shape_str(a) + " * " +
                     shape_str(b) + ")");
  }
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  Matrix c(n, m);
  if (n == 0 || k == 0 || m == 0) return c;

  constexpr std::size_t kBlock = 256;
  constexpr std::size_t kTile = 64;  // C elements kept in registers across a k block
  auto worker = [&](std::size_t r0, std::size_t r1) {
    const double* pa = a.data();
    const double* pb = b.data();
    double* pc = c.data();
    for (std::size_t k0 = 0; k0 < k; k0 += kBlock) {
      const std::size_t k1 = std::min(k, k0 + kBlock);
      for (std::size_t i = r0; i < r1; ++i) {
        const double* ai = pa + i * k;
        double* ci = pc + i * m;
        std::size_t j0 = 0;
        for (; j0 + kTile <= m; j0 += kTile) {
          double acc[kTile];
          for (std::size_t t = 0; t < kTile; ++t) acc[t] = ci[j0 + t];
          for (std::size_t kk = k0; kk < k1; ++kk) {
            const double av = ai[kk];
            const double* bk = pb + kk * m + j0;
            for (std::size_t t = 0; t < kTile; ++t) acc[t] += av * bk[t];
          }
          for (std::size_t t = 0; t < kTile; ++t) ci[j0 + t] = acc[t];
        }
        for (std::size_t kk = k0; kk < k1 && j0 < m; ++kk) {
          const double av = ai[kk];
          const double* bk = pb + kk * m;
          for (std::size_t j = j0; j < m; ++j) ci[j] += av * bk[j];
        }
      }
    }
  };

  // Not worth spawning threads for small products.
  if (n * m * k < (std::size_t{1} << 16)) {
    worker(0, n);
  } else {
    parallel_ranges(n, worker);
  }
  return c;
}

inline Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

inline Matrix add(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) throw ShapeError("add: shape mismatch");
  Matrix c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] += b.data()[i];
  return c;
}

inline Matrix sub(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) throw ShapeError("sub: shape mismatch");
  Matrix c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] -= b.data()[i];
  return c;
}

inline Matrix scale(const Matrix& a, double s) {
  Matrix c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] *= s;
  return c;
}

inline Matrix hadamard(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) throw ShapeError("hadamard: shape mismatch");
  Matrix c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] *= b.data()[i];
  return c;
}

// Least squares via normal equations with an LDL^T factorization. Pivots are
// monitored: the system is rejected as singular when the smallest pivot falls
// to 1e-12 of the largest (or goes nonpositive).
inline Matrix least_squares(const Matrix& x, const Matrix& y) {
  if (y.cols() != 1) throw ShapeError("least_squares: y must be a column vector");
  if (x.rows() != y.rows()) throw ShapeError("least_squares: row counts differ");
  if (x.rows() < x.cols()) throw ShapeError("least_squares: fewer rows than columns");
  const std::size_t p = x.cols();
  if (p == 0) throw ShapeError("least_squares: empty design");

  const Matrix xt = transpose(x);
  Matrix g = matmul(xt, x);   // p x p
  Matrix r = matmul(xt, y);   // p x 1

  // In-place LDL^T: strictly-lower part of g holds L, d holds the pivots.
  std::vector<double> d(p, 0.0);
  double pivot_max = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    double dj = g(j, j);
    for (std::size_t kk = 0; kk < j; ++kk) dj -= g(j, kk) * g(j, kk) * d[kk];
    if (!std::isfinite(dj) || dj <= 0.0 || dj <= 1e-12 * pivot_max) {
      throw SingularSystemError("least_squares: rank-deficient design (pivot " +
                                std::to_string(j) + ")");
    }
    d[j] = dj;
    pivot_max = std::max(pivot_max, dj);
    for (std::size_t i = j + 1; i < p; ++i) {
      double lij = g(i, j);
      for (std::size_t kk = 0; kk < j; ++kk) lij -= g(i, kk) * g(j, kk) * d[kk];
      g(i, j) = lij / dj;
    }
  }
  double pivot_min = d[0];
  for (std::size_t j = 1; j < p; ++j) pivot_min = std::min(pivot_min, d[j]);
  if (pivot_min <= 1e-12 * pivot_max) {
    throw SingularSystemError("least_squares: rank-deficient design");
  }

  // Solve L z = r, then D w = z, then L^T beta = w.
  Matrix beta(p, 1);
  std::vector<double> z(p, 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    double v = r(i, 0);
    for (std::size_t j = 0; j < i; ++j) v -= g(i, j) * z[j];
    z[i] = v;
  }
  for (std::size_t i = 0; i < p; ++i) z[i] /= d[i];
  for (std::size_t ii = p; ii-- > 0;) {
    double v = z[ii];
    for (std::size_t j = ii + 1; j < p; ++j) v -= g(j, ii) * beta(j, 0);
    beta(ii, 0) = v;
  }
  return beta;
}

}  // namespace tactx::num
