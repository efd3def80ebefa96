#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "metric_union/linalg.hpp"
#include "metric_union/metric.hpp"
#include "metric_union/random.hpp"

namespace metric_union {

/// A union instance with Euclidean sides and adversarial cross distances.
struct TestInstance {
  FiniteMetricSpace space;
  UnionPartition partition;
  PointCloud phi_a;  ///< isometric coordinates of A (rows follow partition.idx_a)
  PointCloud phi_b;
};

struct TestInstanceShape {
  std::size_t min_points = 10;
  std::size_t max_points = 60;
  std::size_t min_dim = 2;
  std::size_t max_dim = 8;
};

/// All-pairs shortest paths (Floyd-Warshall) over a complete weighted graph.
inline Matrix shortest_path_closure(Matrix w) {
  const std::size_t n = w.rows();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      const double wik = w(i, k);
      for (std::size_t j = 0; j < n; ++j) w(i, j) = std::min(w(i, j), wik + w(k, j));
    }
  return w;
}

/// Samples |A| points in R^a and |B| points in R^b (Gaussian), keeps the
/// Euclidean distances inside each side, draws cross weights uniformly in
/// [M, 2M] with M = max(diam A, diam B), and closes the result under
/// shortest paths. Points 0..|A|-1 form A and the rest form B.
inline TestInstance generate_instance(std::uint64_t seed, std::uint64_t index, const TestInstanceShape& shape = {}) {
  Stream rng(seed, "testgen", index);
  const auto pick = [&](std::size_t lo, std::size_t hi) {
    return static_cast<std::size_t>(rng.uniform_int(lo, hi));
  };
  const std::size_t na = pick(shape.min_points, shape.max_points);
  const std::size_t nb = pick(shape.min_points, shape.max_points);
  const std::size_t da = pick(shape.min_dim, shape.max_dim);
  const std::size_t db = pick(shape.min_dim, shape.max_dim);

  PointCloud pa(na, da), pb(nb, db);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t k = 0; k < da; ++k) pa(i, k) = rng.normal();
  for (std::size_t i = 0; i < nb; ++i)
    for (std::size_t k = 0; k < db; ++k) pb(i, k) = rng.normal();

  const std::size_t n = na + nb;
  Matrix w(n, n);
  double diam = 0.0;
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < na; ++j) diam = std::max(diam, w(i, j) = pa.distance(i, j));
  for (std::size_t i = 0; i < nb; ++i)
    for (std::size_t j = 0; j < nb; ++j) diam = std::max(diam, w(na + i, na + j) = pb.distance(i, j));
  const double m = diam;
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j) w(i, na + j) = w(na + j, i) = rng.uniform(m, 2.0 * m);

  TestInstance inst;
  inst.space = validate_metric(shortest_path_closure(std::move(w)));
  std::vector<std::size_t> ia(na), ib(nb);
  for (std::size_t i = 0; i < na; ++i) ia[i] = i;
  for (std::size_t i = 0; i < nb; ++i) ib[i] = na + i;
  inst.partition = build_partition(inst.space, ia, ib);
  inst.phi_a = std::move(pa);
  inst.phi_b = std::move(pb);
  return inst;
}

/// Multiplies the first coordinate by `factor` >= 1: non-contracting with
/// Lipschitz constant at most `factor`.
inline PointCloud stretch_first_axis(const PointCloud& phi, double factor) {
  PointCloud out = phi;
  if (out.dim() == 0) return out;
  for (std::size_t i = 0; i < out.size(); ++i) out(i, 0) *= factor;
  return out;
}

}  // namespace metric_union
