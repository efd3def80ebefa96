#pragma once

// Reference implementations used only by the tests. They are slow and
// simple on purpose and share no code with the library routines they check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "metric_union/linalg.hpp"
#include "metric_union/random.hpp"

namespace oracle {

using metric_union::Matrix;
using metric_union::PointCloud;
using metric_union::Stream;

/// Cyclic Jacobi rotations; eigenvalues sorted descending.
inline std::vector<double> jacobi_eigenvalues(Matrix a, int sweeps = 100) {
  const std::size_t n = a.rows();
  for (int s = 0; s < sweeps; ++s) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a(i, i);
  std::ranges::sort(d, std::greater<>());
  return d;
}

inline Matrix random_symmetric(std::size_t n, Stream& rng) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = rng.normal();
  return m;
}

inline PointCloud random_cloud(std::size_t n, std::size_t dim, Stream& rng, double scale = 1.0) {
  PointCloud pc(n, dim);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < dim; ++k) pc(i, k) = scale * rng.normal();
  return pc;
}

/// Smallest eigenvalue of a symmetric matrix by Jacobi.
inline double min_eigenvalue(const Matrix& m) { return jacobi_eigenvalues(m).back(); }

/// Every triangle inequality by brute force.
inline bool is_metric(const Matrix& d, double rel_tol = 1e-12) {
  const std::size_t n = d.rows();
  const double tol = rel_tol * d.max_abs();
  for (std::size_t i = 0; i < n; ++i) {
    if (d(i, i) != 0.0) return false;
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && !(d(i, j) > 0.0)) return false;
      if (std::abs(d(i, j) - d(j, i)) > tol) return false;
      for (std::size_t k = 0; k < n; ++k)
        if (d(i, j) > d(i, k) + d(k, j) + tol) return false;
    }
  }
  return true;
}

/// Distortion over all pairs, computed directly.
inline double distortion(const Matrix& d, const PointCloud& f) {
  double e = 0.0, c = 0.0;
  for (std::size_t i = 0; i < d.rows(); ++i)
    for (std::size_t j = i + 1; j < d.rows(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < f.dim(); ++k) s += (f(i, k) - f(j, k)) * (f(i, k) - f(j, k));
      const double r = std::sqrt(s) / d(i, j);
      e = std::max(e, r);
      c = std::max(c, 1.0 / r);
    }
  return e * c;
}

}  // namespace oracle
