#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "metric_union/error.hpp"
#include "metric_union/linalg.hpp"
#include "metric_union/parallel.hpp"

namespace metric_union {

/// Relative slack applied to the triangle inequality (times the largest entry).
inline constexpr double kTriangleRelTol = 1e-12;

/// A validated finite metric space. Only validate_metric creates one, so
/// holding an instance means all metric axioms were checked.
class FiniteMetricSpace {
 public:
  FiniteMetricSpace() = default;

  std::size_t size() const noexcept { return dist_.rows(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return dist_(i, j); }
  const Matrix& matrix() const noexcept { return dist_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  double diameter() const noexcept { return dist_.max_abs(); }

  /// Subspace on the given indices (in the given order).
  FiniteMetricSpace restrict(std::span<const std::size_t> idx) const {
    FiniteMetricSpace out;
    out.dist_ = Matrix(idx.size(), idx.size());
    out.labels_.reserve(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
      out.labels_.push_back(labels_[idx[r]]);
      for (std::size_t c = 0; c < idx.size(); ++c) out.dist_(r, c) = dist_(idx[r], idx[c]);
    }
    return out;
  }

 private:
  friend FiniteMetricSpace validate_metric(const Matrix&, std::vector<std::string>, std::size_t);
  Matrix dist_;
  std::vector<std::string> labels_;
};

/// Checks every metric axiom and returns the validated space, or throws
/// MetricError listing all violations (triangle violations beyond
/// `max_reported` are only counted). Pairs within 1e-12 relative asymmetry
/// are accepted and symmetrized.
inline FiniteMetricSpace validate_metric(const Matrix& dist, std::vector<std::string> labels = {},
                                         std::size_t max_reported = 1000) {
  const std::size_t n = dist.rows();
  if (!dist.square()) throw InputError("InputError", "distance matrix must be square");
  if (n == 0) throw InputError("InputError", "distance matrix is empty");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!std::isfinite(dist(i, j)))
        throw InputError("NonFiniteEntry", "distance matrix has a non-finite entry", {i, j});
  if (labels.empty()) {
    labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  }
  if (labels.size() != n) throw LengthMismatchError("label count does not match matrix size");

  const double scale = dist.max_abs();
  const double tol = kTriangleRelTol * scale;
  std::vector<MetricViolation> found;
  std::size_t truncated = 0;
  auto report = [&](MetricViolation v) {
    if (found.size() < max_reported)
      found.push_back(v);
    else
      ++truncated;
  };

  for (std::size_t i = 0; i < n; ++i) {
    if (dist(i, i) != 0.0) report({MetricViolation::Kind::NonzeroDiagonal, i, i, i, dist(i, i)});
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dij = dist(i, j);
      const double dji = dist(j, i);
      if (std::abs(dij - dji) > tol) report({MetricViolation::Kind::Asymmetry, i, j, j, dij - dji});
      if (dij < 0.0 || dji < 0.0)
        report({MetricViolation::Kind::NegativeDistance, i, j, j, std::min(dij, dji)});
      else if (dij == 0.0 || dji == 0.0)
        report({MetricViolation::Kind::ZeroOffDiagonal, i, j, j, 0.0});
    }
  }
  if (!found.empty()) throw MetricError(std::move(found), truncated);

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dij = dist(i, j);
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        const double slack = dij - dist(i, k) - dist(k, j);
        if (slack > tol) report({MetricViolation::Kind::Triangle, i, j, k, slack});
      }
    }
  }
  if (!found.empty()) throw MetricError(std::move(found), truncated);

  FiniteMetricSpace space;
  space.dist_ = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) space.dist_(i, j) = space.dist_(j, i) = 0.5 * (dist(i, j) + dist(j, i));
  space.labels_ = std::move(labels);
  return space;
}

/// Metric induced by Euclidean coordinates.
inline FiniteMetricSpace euclidean_space(const PointCloud& points, std::vector<std::string> labels = {}) {
  Matrix d(points.size(), points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j) d(i, j) = d(j, i) = points.distance(i, j);
  return validate_metric(d, std::move(labels));
}

/// X = A ∪ B as sorted index sets, with distance-to-opposite-side values.
struct UnionPartition {
  std::vector<std::size_t> idx_a;
  std::vector<std::size_t> idx_b;
  std::vector<double> r_a;  ///< r_a[k] = d(idx_a[k], B)
  std::vector<double> r_b;  ///< r_b[k] = d(idx_b[k], A)
  std::vector<char> in_a;   ///< membership flags over X
  std::vector<char> in_b;

  std::size_t size() const noexcept { return in_a.size(); }
  bool contains_a(std::size_t x) const noexcept { return in_a[x] != 0; }
  bool contains_b(std::size_t x) const noexcept { return in_b[x] != 0; }

  /// Position of x within idx_a / idx_b (x must be a member).
  std::size_t pos_a(std::size_t x) const {
    return static_cast<std::size_t>(std::ranges::lower_bound(idx_a, x) - idx_a.begin());
  }
  std::size_t pos_b(std::size_t x) const {
    return static_cast<std::size_t>(std::ranges::lower_bound(idx_b, x) - idx_b.begin());
  }

  /// The same partition with the roles of A and B exchanged.
  UnionPartition swapped() const {
    UnionPartition s = *this;
    std::swap(s.idx_a, s.idx_b);
    std::swap(s.r_a, s.r_b);
    std::swap(s.in_a, s.in_b);
    return s;
  }
};

namespace detail {
inline std::vector<std::size_t> normalize_index_set(std::vector<std::size_t> idx, std::size_t n, const char* side) {
  std::ranges::sort(idx);
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  if (!idx.empty() && idx.back() >= n)
    throw InputError("IndexOutOfRange",
                     std::string("index ") + std::to_string(idx.back()) + " in side " + side + " is out of range",
                     {idx.back()});
  return idx;
}
}  // namespace detail

inline UnionPartition build_partition(const FiniteMetricSpace& x, std::vector<std::size_t> idx_a,
                                      std::vector<std::size_t> idx_b) {
  const std::size_t n = x.size();
  UnionPartition p;
  p.idx_a = detail::normalize_index_set(std::move(idx_a), n, "A");
  p.idx_b = detail::normalize_index_set(std::move(idx_b), n, "B");
  if (p.idx_a.empty()) throw EmptySideError("side A is empty");
  if (p.idx_b.empty()) throw EmptySideError("side B is empty");
  p.in_a.assign(n, 0);
  p.in_b.assign(n, 0);
  for (auto i : p.idx_a) p.in_a[i] = 1;
  for (auto i : p.idx_b) p.in_b[i] = 1;
  for (std::size_t i = 0; i < n; ++i)
    if (!p.in_a[i] && !p.in_b[i]) throw CoverageError("point " + std::to_string(i) + " is in neither A nor B", {i});

  auto dist_to = [&](std::size_t i, const std::vector<std::size_t>& side) {
    double best = std::numeric_limits<double>::infinity();
    for (auto j : side) best = std::min(best, x(i, j));
    return best;
  };
  p.r_a.reserve(p.idx_a.size());
  p.r_b.reserve(p.idx_b.size());
  for (auto i : p.idx_a) p.r_a.push_back(dist_to(i, p.idx_b));
  for (auto i : p.idx_b) p.r_b.push_back(dist_to(i, p.idx_a));
  return p;
}

/// Expansion, contraction and their product for a map X -> R^k, with the
/// pairs (indices into X) attaining each extreme.
struct DistortionReport {
  double expansion = 1.0;
  double contraction = 1.0;
  double distortion = 1.0;
  std::pair<std::size_t, std::size_t> expansion_pair{0, 0};
  std::pair<std::size_t, std::size_t> contraction_pair{0, 0};
  std::size_t pairs = 0;
};

/// Measures the distortion of `images` as an embedding of X (or of the
/// subset, in which case images[r] is the image of subset[r]). Throws
/// CollapsedPairError when two distinct points share an image. With no
/// pairs to compare, every ratio is reported as 1.
inline DistortionReport distortion_of(const FiniteMetricSpace& x, const PointCloud& images,
                                      std::optional<std::span<const std::size_t>> subset = std::nullopt,
                                      std::size_t threads = 1) {
  std::vector<std::size_t> all;
  std::span<const std::size_t> idx;
  if (subset) {
    idx = *subset;
  } else {
    all.resize(x.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    idx = all;
  }
  if (images.size() != idx.size())
    throw LengthMismatchError("distortion_of: " + std::to_string(images.size()) + " images for " +
                              std::to_string(idx.size()) + " points");
  const std::size_t m = idx.size();

  struct Partial {
    double expansion = 0.0, contraction = 0.0;
    std::size_t er = 0, ec = 0, cr = 0, cc = 0, pairs = 0;
    bool collapsed = false;
    std::size_t xr = 0, xc = 0;
  };
  constexpr std::size_t kBlocks = 16;
  std::vector<Partial> parts(kBlocks);
  for_blocks(m, threads, kBlocks, [&](std::size_t b, std::size_t lo, std::size_t hi) {
    Partial& p = parts[b];
    for (std::size_t r = lo; r < hi && !p.collapsed; ++r) {
      for (std::size_t c = r + 1; c < m; ++c) {
        const double d = x(idx[r], idx[c]);
        const double e = images.distance(r, c);
        ++p.pairs;
        if (e == 0.0) {
          p.collapsed = true;
          p.xr = r;
          p.xc = c;
          break;
        }
        const double ex = e / d;
        const double co = d / e;
        if (ex > p.expansion) {
          p.expansion = ex;
          p.er = r;
          p.ec = c;
        }
        if (co > p.contraction) {
          p.contraction = co;
          p.cr = r;
          p.cc = c;
        }
      }
    }
  });

  DistortionReport rep;
  rep.expansion = 0.0;
  rep.contraction = 0.0;
  for (const auto& p : parts) {
    if (p.collapsed)
      throw CollapsedPairError("points " + std::to_string(idx[p.xr]) + " and " + std::to_string(idx[p.xc]) +
                                   " map to the same vector",
                               {idx[p.xr], idx[p.xc]});
    rep.pairs += p.pairs;
    if (p.pairs == 0) continue;
    if (p.expansion > rep.expansion) {
      rep.expansion = p.expansion;
      rep.expansion_pair = {idx[p.er], idx[p.ec]};
    }
    if (p.contraction > rep.contraction) {
      rep.contraction = p.contraction;
      rep.contraction_pair = {idx[p.cr], idx[p.cc]};
    }
  }
  if (rep.pairs == 0) return DistortionReport{};
  rep.distortion = std::max(1.0, rep.expansion * rep.contraction);
  return rep;
}

}  // namespace metric_union
