#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "metric_union/error.hpp"

namespace metric_union {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  Matrix(std::initializer_list<std::initializer_list<double>> init) {
    rows_ = init.size();
    cols_ = rows_ == 0 ? 0 : init.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      if (row.size() != cols_) throw InputError("InputError", "ragged matrix initializer");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }

  std::span<const double> data() const noexcept { return data_; }

  double max_abs() const noexcept {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline Matrix operator*(const Matrix& a, const Matrix& b) {
  assert(a.cols() == b.rows());
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto ci = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto bk = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

inline Matrix operator-(const Matrix& a, const Matrix& b) {
  assert(a.rows() == b.rows() && a.cols() == b.cols());
  Matrix c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) -= b(i, j);
  return c;
}

inline Matrix operator*(double s, Matrix m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (double& v : m.row(i)) v *= s;
  return m;
}

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

inline double distance(std::span<const double> a, std::span<const double> b) noexcept {
  return std::sqrt(squared_distance(a, b));
}

inline double norm(std::span<const double> a) noexcept { return std::sqrt(dot(a, a)); }

/// Ordered list of points in a common dimension.
class PointCloud {
 public:
  PointCloud() = default;
  PointCloud(std::size_t count, std::size_t dim) : dim_(dim), count_(count), data_(count * dim, 0.0) {}

  /// Builds from explicit rows; all rows must share one length and be finite.
  static PointCloud from_rows(const std::vector<std::vector<double>>& rows, std::size_t dim_if_empty = 0) {
    const std::size_t dim = rows.empty() ? dim_if_empty : rows.front().size();
    PointCloud pc(rows.size(), dim);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != dim)
        throw LengthMismatchError("point " + std::to_string(i) + " has dimension " +
                                      std::to_string(rows[i].size()) + ", expected " + std::to_string(dim),
                                  {i});
      for (std::size_t k = 0; k < dim; ++k) {
        if (!std::isfinite(rows[i][k]))
          throw InputError("NonFiniteCoordinate", "non-finite coordinate in point " + std::to_string(i), {i, k});
        pc(i, k) = rows[i][k];
      }
    }
    return pc;
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return count_; }
  bool empty() const noexcept { return count_ == 0; }

  double& operator()(std::size_t i, std::size_t k) noexcept { return data_[i * dim_ + k]; }
  double operator()(std::size_t i, std::size_t k) const noexcept { return data_[i * dim_ + k]; }

  std::span<double> point(std::size_t i) noexcept { return {data_.data() + i * dim_, dim_}; }
  std::span<const double> point(std::size_t i) const noexcept { return {data_.data() + i * dim_, dim_}; }

  double distance(std::size_t i, std::size_t j) const noexcept {
    return metric_union::distance(point(i), point(j));
  }
  double squared_distance(std::size_t i, std::size_t j) const noexcept {
    return metric_union::squared_distance(point(i), point(j));
  }

  void push_back(std::span<const double> p) {
    if (count_ == 0 && dim_ == 0) dim_ = p.size();
    if (p.size() != dim_) throw LengthMismatchError("pushed point has wrong dimension");
    data_.insert(data_.end(), p.begin(), p.end());
    ++count_;
  }

  /// Rows selected by index, in the given order.
  PointCloud select(std::span<const std::size_t> idx) const {
    PointCloud out(idx.size(), dim_);
    for (std::size_t r = 0; r < idx.size(); ++r) std::ranges::copy(point(idx[r]), out.point(r).begin());
    return out;
  }

  PointCloud scaled(double s) const {
    PointCloud out = *this;
    for (double& v : out.data_) v *= s;
    return out;
  }

  std::vector<std::vector<double>> to_rows() const {
    std::vector<std::vector<double>> rows(count_);
    for (std::size_t i = 0; i < count_; ++i) rows[i].assign(point(i).begin(), point(i).end());
    return rows;
  }

  friend bool operator==(const PointCloud&, const PointCloud&) = default;

 private:
  std::size_t dim_ = 0;
  std::size_t count_ = 0;
  std::vector<double> data_;
};

/// Concatenates coordinates point by point. Squared pairwise distances add.
inline PointCloud direct_sum(std::span<const PointCloud> clouds) {
  if (clouds.empty()) return {};
  const std::size_t n = clouds.front().size();
  std::size_t dim = 0;
  for (std::size_t c = 0; c < clouds.size(); ++c) {
    if (clouds[c].size() != n)
      throw LengthMismatchError("direct_sum: cloud " + std::to_string(c) + " has " +
                                    std::to_string(clouds[c].size()) + " points, expected " + std::to_string(n),
                                {c});
    dim += clouds[c].dim();
  }
  PointCloud out(n, dim);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t offset = 0;
    for (const auto& cloud : clouds) {
      std::ranges::copy(cloud.point(i), out.point(i).begin() + static_cast<std::ptrdiff_t>(offset));
      offset += cloud.dim();
    }
  }
  return out;
}

inline PointCloud direct_sum(std::initializer_list<PointCloud> clouds) {
  return direct_sum(std::span<const PointCloud>(clouds.begin(), clouds.size()));
}

// ---------------------------------------------------------------------------
// Symmetric eigendecomposition

/// Eigenvalues sorted descending; column k of `vectors` pairs with values[k].
struct SymEigen {
  std::vector<double> values;
  Matrix vectors;
};

namespace detail {

inline void check_symmetric(const Matrix& m, double rel_tol) {
  if (!m.square()) throw NotSymmetricError("matrix is not square");
  const double scale = std::max(m.max_abs(), std::numeric_limits<double>::min());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (!std::isfinite(m(i, j)) || !std::isfinite(m(j, i)))
        throw InputError("NonFiniteEntry", "matrix has a non-finite entry", {i, j});
      if (std::abs(m(i, j) - m(j, i)) > rel_tol * scale)
        throw NotSymmetricError("matrix is not symmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")",
                                {i, j}, m(i, j) - m(j, i));
    }
  }
}

// Householder reduction to tridiagonal form (EISPACK tred2 lineage). On exit
// `v` holds the accumulated orthogonal transform, `d` the diagonal and `e`
// the subdiagonal (e[0] unused).
inline void tridiagonalize(Matrix& v, std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = v.rows();
  for (std::size_t j = 0; j < n; ++j) d[j] = v(n - 1, j);

  for (std::size_t i = n - 1; i > 0; --i) {
    double scale = 0.0;
    double h = 0.0;
    for (std::size_t k = 0; k < i; ++k) scale += std::abs(d[k]);
    if (scale == 0.0) {
      e[i] = d[i - 1];
      for (std::size_t j = 0; j < i; ++j) {
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
        v(j, i) = 0.0;
      }
    } else {
      for (std::size_t k = 0; k < i; ++k) {
        d[k] /= scale;
        h += d[k] * d[k];
      }
      double f = d[i - 1];
      double g = std::sqrt(h);
      if (f > 0) g = -g;
      e[i] = scale * g;
      h -= f * g;
      d[i - 1] = f - g;
      for (std::size_t j = 0; j < i; ++j) e[j] = 0.0;

      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        v(j, i) = f;
        g = e[j] + v(j, j) * f;
        for (std::size_t k = j + 1; k + 1 <= i; ++k) {
          g += v(k, j) * d[k];
          e[k] += v(k, j) * f;
        }
        e[j] = g;
      }
      f = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        e[j] /= h;
        f += e[j] * d[j];
      }
      const double hh = f / (h + h);
      for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        g = e[j];
        for (std::size_t k = j; k + 1 <= i; ++k) v(k, j) -= (f * e[k] + g * d[k]);
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
      }
    }
    d[i] = h;
  }

  for (std::size_t i = 0; i + 1 < n; ++i) {
    v(n - 1, i) = v(i, i);
    v(i, i) = 1.0;
    const double h = d[i + 1];
    if (h != 0.0) {
      for (std::size_t k = 0; k <= i; ++k) d[k] = v(k, i + 1) / h;
      for (std::size_t j = 0; j <= i; ++j) {
        double g = 0.0;
        for (std::size_t k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
        for (std::size_t k = 0; k <= i; ++k) v(k, j) -= g * d[k];
      }
    }
    for (std::size_t k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
  }
  for (std::size_t j = 0; j < n; ++j) {
    d[j] = v(n - 1, j);
    v(n - 1, j) = 0.0;
  }
  v(n - 1, n - 1) = 1.0;
  e[0] = 0.0;
}

// Implicit QL on the tridiagonal (d, e). When `z` is non-null it holds the
// transform with eigenvectors as ROWS, so rotations touch contiguous memory.
inline void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e, Matrix* z, int max_iter_per_value) {
  const std::size_t n = d.size();
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  double f = 0.0;
  double tst1 = 0.0;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t m = l;
    while (m < n) {
      if (std::abs(e[m]) <= eps * tst1) break;
      ++m;
    }
    if (m > l) {
      int iter = 0;
      do {
        if (++iter > max_iter_per_value)
          throw ConvergenceError("tridiagonal QL did not converge for eigenvalue " + std::to_string(l), {l});
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (std::size_t ii = m; ii-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[ii];
          h = c * p;
          r = std::hypot(p, e[ii]);
          e[ii + 1] = s * r;
          s = e[ii] / r;
          c = p / r;
          p = c * d[ii] - s * g;
          d[ii + 1] = h + s * (c * g + s * d[ii]);
          if (z) {
            auto zi = z->row(ii);
            auto zi1 = z->row(ii + 1);
            for (std::size_t k = 0; k < n; ++k) {
              const double t = zi1[k];
              zi1[k] = s * zi[k] + c * t;
              zi[k] = c * zi[k] - s * t;
            }
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }
}

}  // namespace detail

/// Full spectrum and orthonormal eigenbasis of a symmetric matrix
/// (Householder tridiagonalization followed by implicit QL).
inline SymEigen sym_eigen(const Matrix& m, double symmetry_tol = 1e-12, int max_iter_per_value = 100) {
  detail::check_symmetric(m, symmetry_tol);
  const std::size_t n = m.rows();
  SymEigen out;
  if (n == 0) return out;

  Matrix v(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) v(i, j) = 0.5 * (m(i, j) + m(j, i));
  std::vector<double> d(n), e(n);
  detail::tridiagonalize(v, d, e);
  Matrix z = v.transpose();
  detail::tridiagonal_ql(d, e, &z, max_iter_per_value);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) { return d[a] > d[b]; });
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    out.values[c] = d[order[c]];
    auto src = z.row(order[c]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = src[r];
  }
  return out;
}

/// Eigenvalues only, sorted descending. Skips the O(n^3) rotation
/// accumulation of the QL phase.
inline std::vector<double> sym_eigenvalues(const Matrix& m, double symmetry_tol = 1e-12,
                                           int max_iter_per_value = 100) {
  detail::check_symmetric(m, symmetry_tol);
  const std::size_t n = m.rows();
  if (n == 0) return {};
  Matrix v(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) v(i, j) = 0.5 * (m(i, j) + m(j, i));
  std::vector<double> d(n), e(n);
  detail::tridiagonalize(v, d, e);
  detail::tridiagonal_ql(d, e, nullptr, max_iter_per_value);
  std::ranges::sort(d, std::greater<>());
  return d;
}

/// Solves H x = b for symmetric positive definite H by Cholesky.
/// Returns nullopt when H is not numerically positive definite.
inline std::optional<std::vector<double>> cholesky_solve(Matrix h, std::span<const double> b) {
  const std::size_t n = h.rows();
  for (std::size_t j = 0; j < n; ++j) {
    double s = h(j, j);
    for (std::size_t k = 0; k < j; ++k) s -= h(j, k) * h(j, k);
    if (!(s > 0.0) || !std::isfinite(s)) return std::nullopt;
    const double ljj = std::sqrt(s);
    h(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double t = h(i, j);
      for (std::size_t k = 0; k < j; ++k) t -= h(i, k) * h(j, k);
      h(i, j) = t / ljj;
    }
  }
  std::vector<double> x(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) x[i] -= h(i, k) * x[k];
    x[i] /= h(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) x[i] -= h(k, i) * x[k];
    x[i] /= h(i, i);
  }
  return x;
}

}  // namespace metric_union
