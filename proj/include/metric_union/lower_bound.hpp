#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "metric_union/error.hpp"
#include "metric_union/linalg.hpp"
#include "metric_union/metric.hpp"
#include "metric_union/random.hpp"

namespace metric_union {

using Edge = std::pair<std::size_t, std::size_t>;

/// Edge partition E1 ⊔ E2 of the complete bipartite graph K_{n,n}.
/// Vertices 0..n-1 are side A and n..2n-1 are side B; every edge is
/// stored as (a, b) with a < n <= b.
struct BipartiteSplit {
  std::size_t n = 0;
  std::vector<Edge> e1;
  std::vector<Edge> e2;
  double delta_star = 0.0;
  std::uint64_t seed = 0;
  std::size_t attempts = 0;  ///< samples drawn before this one was accepted
};

/// Graph Laplacian: degrees on the diagonal, -1 per edge.
inline Matrix laplacian(std::size_t n_vertices, const std::vector<Edge>& edges) {
  Matrix l(n_vertices, n_vertices);
  std::set<Edge> seen;
  for (auto [u, v] : edges) {
    if (u >= n_vertices || v >= n_vertices)
      throw InputError("IndexOutOfRange", "edge endpoint outside the vertex set", {u, v});
    if (u == v) throw SelfLoop("self loop at vertex " + std::to_string(u), {u, v});
    if (!seen.insert(std::minmax(u, v)).second)
      throw DuplicateEdge("edge (" + std::to_string(u) + ", " + std::to_string(v) + ") listed twice", {u, v});
    l(u, v) -= 1.0;
    l(v, u) -= 1.0;
    l(u, u) += 1.0;
    l(v, v) += 1.0;
  }
  return l;
}

/// Sum of squared differences of `v` across the edges.
inline double edge_energy(const std::vector<Edge>& edges, std::span<const double> v) {
  double s = 0.0;
  for (auto [a, b] : edges) s += (v[a] - v[b]) * (v[a] - v[b]);
  return s;
}

/// Connectivity of the graph whose edges are the nonzero off-diagonal
/// entries of a Laplacian-like matrix.
inline bool laplacian_connected(const Matrix& l) {
  const std::size_t n = l.rows();
  if (n == 0) return true;
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    for (std::size_t v = 0; v < n; ++v) {
      if (!seen[v] && v != u && l(u, v) != 0.0) {
        seen[v] = 1;
        ++reached;
        stack.push_back(v);
      }
    }
  }
  return reached == n;
}

/// W = V_+ diag(λ^{-1/2}) over the nonzero spectrum of L/2, so that
/// W^T (L/2) W = I on the complement of ker L.
inline Matrix whitening(const Matrix& l) {
  const std::size_t n = l.rows();
  const SymEigen eig = sym_eigen(0.5 * l);
  const double cutoff = 1e-9 * std::max(eig.values.front(), 0.0);
  std::size_t rank = 0;
  while (rank < n && eig.values[rank] > cutoff) ++rank;
  Matrix w(n, rank);
  for (std::size_t k = 0; k < rank; ++k) {
    const double s = 1.0 / std::sqrt(eig.values[k]);
    for (std::size_t r = 0; r < n; ++r) w(r, k) = s * eig.vectors(r, k);
  }
  return w;
}

/// Generalized eigenvalues of (L_i, L/2) on the complement of ker L,
/// sorted descending; these are 1/μ for the pencil (L/2, L_i).
inline std::vector<double> pencil_eigenvalues(const Matrix& w, const Matrix& li) {
  const Matrix wt = w.transpose();
  return sym_eigenvalues(wt * (li * w), 1e-9);
}

/// Smallest δ >= 0 with (1+δ)^{-1} L_i ⪯ L/2 ⪯ (1+δ) L_i for both i.
/// Throws SingularPencil when any of the three graphs is disconnected.
inline double measure_delta(const Matrix& l, const Matrix& l1, const Matrix& l2) {
  if (!l.square() || l.rows() != l1.rows() || l.rows() != l2.rows() || l1.cols() != l.cols() ||
      l2.cols() != l.cols())
    throw LengthMismatchError("Laplacians must be square and of equal size");
  const Matrix* ls[] = {&l, &l1, &l2};
  for (std::size_t i = 0; i < 3; ++i)
    if (!laplacian_connected(*ls[i]))
      throw SingularPencil(i == 0 ? "the full graph is disconnected"
                                  : "subgraph " + std::to_string(i) + " is disconnected",
                           {i});
  const Matrix w = whitening(l);
  double delta = 0.0;
  for (const Matrix* li : {&l1, &l2}) {
    const auto nu = pencil_eigenvalues(w, *li);
    if (nu.empty()) continue;
    const double nu_max = nu.front();
    const double nu_min = nu.back();
    if (!(nu_min > 0.0)) throw SingularPencil("pencil has a zero generalized eigenvalue", {}, nu_min);
    delta = std::max({delta, nu_max - 1.0, 1.0 / nu_min - 1.0});
  }
  return delta;
}

/// Direct PSD test of both sandwich inequalities at a given δ, with
/// eigenvalue margin 1e-9 * max|L|.
inline bool sandwich_holds(const Matrix& l, const Matrix& l1, const Matrix& l2, double delta) {
  const double margin = 1e-9 * l.max_abs();
  const Matrix half = 0.5 * l;
  for (const Matrix* li : {&l1, &l2}) {
    const Matrix upper = (1.0 + delta) * *li - half;
    const Matrix lower = half - (1.0 / (1.0 + delta)) * *li;
    if (sym_eigenvalues(upper, 1e-9).back() < -margin) return false;
    if (sym_eigenvalues(lower, 1e-9).back() < -margin) return false;
  }
  return true;
}

inline Matrix complete_bipartite_laplacian(std::size_t n) {
  std::vector<Edge> all;
  all.reserve(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) all.emplace_back(a, n + b);
  return laplacian(2 * n, all);
}

inline constexpr std::size_t kSplitRetryBudget = 64;

/// Random edge split: an independent fair coin per edge of K_{n,n} decides
/// E1 or E2. Resamples with a fresh derived stream until both halves are
/// connected and δ* < accept_below, up to 64 attempts.
inline BipartiteSplit sample_split(std::size_t n, std::uint64_t seed, double accept_below = 1.0) {
  if (n < 4) throw InputError("InvalidSize", "sample_split needs n >= 4", {n});
  const Matrix l = complete_bipartite_laplacian(n);
  for (std::size_t attempt = 0; attempt < kSplitRetryBudget; ++attempt) {
    Stream rng(seed, "lower_bound.split", attempt);
    BipartiteSplit s;
    s.n = n;
    s.seed = seed;
    s.attempts = attempt;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) (rng.coin() ? s.e1 : s.e2).emplace_back(a, n + b);
    const Matrix l1 = laplacian(2 * n, s.e1);
    const Matrix l2 = laplacian(2 * n, s.e2);
    if (!laplacian_connected(l1) || !laplacian_connected(l2)) continue;
    s.delta_star = measure_delta(l, l1, l2) + 1e-9;
    if (s.delta_star < accept_below) return s;
  }
  throw RetryBudgetExceeded("no admissible split of K_{" + std::to_string(n) + "," + std::to_string(n) +
                                "} with delta below " + std::to_string(accept_below) + " within " +
                                std::to_string(kSplitRetryBudget) + " attempts",
                            {n}, accept_below);
}

/// Distances 2 within a side, 1 across E1 edges and 3 across E2 edges.
/// Returns the validated space and its A/B partition.
inline std::pair<FiniteMetricSpace, UnionPartition> build_123_metric(const BipartiteSplit& split) {
  const std::size_t n = split.n;
  Matrix d(2 * n, 2 * n, 2.0);
  for (std::size_t i = 0; i < 2 * n; ++i) d(i, i) = 0.0;
  for (auto [a, b] : split.e1) d(a, b) = d(b, a) = 1.0;
  for (auto [a, b] : split.e2) d(a, b) = d(b, a) = 3.0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = n; b < 2 * n; ++b)
      if (d(a, b) == 2.0) throw InputError("IncompleteSplit", "split does not cover every cross pair", {a, b});
  std::vector<std::string> labels;
  labels.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back("a" + std::to_string(i));
  for (std::size_t i = 0; i < n; ++i) labels.push_back("b" + std::to_string(i));
  FiniteMetricSpace x = validate_metric(d, std::move(labels));
  std::vector<std::size_t> ia(n), ib(n);
  for (std::size_t i = 0; i < n; ++i) {
    ia[i] = i;
    ib[i] = n + i;
  }
  UnionPartition p = build_partition(x, std::move(ia), std::move(ib));
  return {std::move(x), std::move(p)};
}

/// Every Euclidean embedding of the 1/2/3 space has distortion at least
/// 3 / (1 + δ*)^2.
inline double certified_lower_bound(const BipartiteSplit& split) {
  return 3.0 / ((1.0 + split.delta_star) * (1.0 + split.delta_star));
}

struct RatioCheck {
  double e1_over_all = 0.0;  ///< mean |f(u)-f(v)|^2 over E1 divided by the mean over E
  double e2_over_all = 0.0;
  double lo = 0.0;  ///< (1+δ*)^{-2}
  double hi = 0.0;  ///< (1+δ*)^2
};

/// Compares mean squared image distances over E1 and E2 with the mean over
/// all edges. Throws RangeViolation if a ratio leaves [(1+δ*)^{-2}, (1+δ*)^2]
/// and DegenerateInput if every edge has zero image length.
inline RatioCheck ratio_check(const BipartiteSplit& split, const PointCloud& images) {
  if (images.size() != 2 * split.n)
    throw LengthMismatchError("ratio_check needs " + std::to_string(2 * split.n) + " images, got " +
                              std::to_string(images.size()));
  const auto mean = [&](const std::vector<Edge>& edges) {
    double s = 0.0;
    for (auto [a, b] : edges) s += images.squared_distance(a, b);
    return std::pair{s, edges.empty() ? 0.0 : s / static_cast<double>(edges.size())};
  };
  const auto [s1, m1] = mean(split.e1);
  const auto [s2, m2] = mean(split.e2);
  const double total = static_cast<double>(split.e1.size() + split.e2.size());
  const double m = (s1 + s2) / total;
  if (!(m > 0.0)) throw DegenerateInput("all edge images have zero length");
  RatioCheck rc;
  rc.e1_over_all = m1 / m;
  rc.e2_over_all = m2 / m;
  const double q = (1.0 + split.delta_star) * (1.0 + split.delta_star);
  rc.lo = 1.0 / q;
  rc.hi = q;
  const double slack = 1e-9;
  for (double r : {rc.e1_over_all, rc.e2_over_all})
    if (r < rc.lo * (1.0 - slack) || r > rc.hi * (1.0 + slack))
      throw RangeViolation("edge-mean ratio " + std::to_string(r) + " outside [" + std::to_string(rc.lo) + ", " +
                               std::to_string(rc.hi) + "]",
                           {}, r);
  return rc;
}

struct EpsilonTarget {
  double epsilon = 0.0;
  std::size_t n = 0;
  double median_delta = 0.0;
  double bound = 0.0;  ///< 3 / (1 + median δ*)^2
  bool reached = false;
  std::vector<std::pair<std::size_t, double>> trail;  ///< (n, median δ*) per size tried
};

inline constexpr std::size_t kMaxTargetN = 512;

/// Doubles n from `start` up to `max_n` (at most 512) until the median δ*
/// over `samples` splits gives 3/(1+δ*)^2 >= 3 - ε. Requires 0 < ε < 1.
/// Splits are accepted whatever their δ*, since small n rarely gets δ* < 1.
inline EpsilonTarget target_epsilon(double epsilon, std::uint64_t seed, std::size_t samples = 3,
                                    std::size_t start = 16, std::size_t max_n = kMaxTargetN) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw InputError("InvalidEpsilon", "epsilon must lie in (0, 1)", {}, epsilon);
  if (samples == 0) throw InputError("InvalidSamples", "need at least one sample");
  EpsilonTarget t;
  t.epsilon = epsilon;
  for (std::size_t n = std::max<std::size_t>(start, 4); n <= std::min(max_n, kMaxTargetN); n *= 2) {
    std::vector<double> deltas;
    for (std::size_t s = 0; s < samples; ++s)
      deltas.push_back(
          sample_split(n, splitmix64(seed + 0x9E3779B97F4A7C15ull * (s + 1)), INFINITY).delta_star);
    std::ranges::sort(deltas);
    const double med = deltas[deltas.size() / 2];
    t.trail.emplace_back(n, med);
    t.n = n;
    t.median_delta = med;
    t.bound = 3.0 / ((1.0 + med) * (1.0 + med));
    if (t.bound >= 3.0 - epsilon) {
      t.reached = true;
      break;
    }
  }
  return t;
}

}  // namespace metric_union
