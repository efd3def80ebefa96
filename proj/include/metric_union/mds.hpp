#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "metric_union/error.hpp"
#include "metric_union/linalg.hpp"
#include "metric_union/metric.hpp"

namespace metric_union {

/// Double-centered Gram matrix -1/2 J D^2 J of a finite metric space.
inline Matrix centered_gram(const FiniteMetricSpace& x) {
  const std::size_t n = x.size();
  Matrix g(n, n);
  std::vector<double> row_mean(n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double d2 = x(i, j) * x(i, j);
      g(i, j) = d2;
      row_mean[i] += d2;
    }
    total += row_mean[i];
    row_mean[i] /= static_cast<double>(n);
  }
  total /= static_cast<double>(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g(i, j) = -0.5 * (g(i, j) - row_mean[i] - row_mean[j] + total);
  // Symmetrize rounding noise away.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) g(i, j) = g(j, i) = 0.5 * (g(i, j) + g(j, i));
  return g;
}

namespace detail {
inline PointCloud coordinates_from(const SymEigen& eig, double cutoff) {
  const std::size_t n = eig.values.size();
  std::size_t dim = 0;
  while (dim < n && eig.values[dim] > cutoff) ++dim;
  PointCloud pc(n, dim);
  for (std::size_t k = 0; k < dim; ++k) {
    const double s = std::sqrt(eig.values[k]);
    for (std::size_t i = 0; i < n; ++i) pc(i, k) = s * eig.vectors(i, k);
  }
  return pc;
}
}  // namespace detail

/// Classical MDS for Euclidean-realizable spaces. Eigenvalues within
/// rel_tol * (largest eigenvalue) of zero are dropped, giving the minimal
/// dimension; a more negative eigenvalue raises NotEuclidean carrying it.
inline PointCloud mds_isometric_embed(const FiniteMetricSpace& x, double rel_tol = 1e-9) {
  if (x.size() == 1) return PointCloud(1, 0);
  const SymEigen eig = sym_eigen(centered_gram(x));
  const double top = std::max(eig.values.front(), 0.0);
  const double cutoff = rel_tol * top;
  const double lowest = eig.values.back();
  if (lowest < -cutoff)
    throw NotEuclidean("centered Gram matrix has negative eigenvalue " + std::to_string(lowest), {}, lowest);
  return detail::coordinates_from(eig, cutoff);
}

/// Classical MDS that keeps only the positive part of the spectrum; used for
/// spaces that are not Euclidean, where any embedding is a valid probe.
inline PointCloud mds_best_effort(const FiniteMetricSpace& x, double rel_tol = 1e-9) {
  if (x.size() == 1) return PointCloud(1, 0);
  const SymEigen eig = sym_eigen(centered_gram(x));
  return detail::coordinates_from(eig, rel_tol * std::max(eig.values.front(), 0.0));
}

}  // namespace metric_union
