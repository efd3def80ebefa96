#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "metric_union/error.hpp"
#include "metric_union/metric.hpp"

namespace metric_union {

/// An α-cover A' of A with respect to B, together with the nearest-point
/// map f: A' -> B. Indices are into X.
struct CoverResult {
  double alpha = 0.0;
  std::vector<std::size_t> cover_idx;  ///< sorted
  std::vector<std::size_t> nearest;    ///< nearest[k] = f(cover_idx[k])
  double lip_f = 0.0;                  ///< measured Lipschitz constant of f
};

/// Bound on the Lipschitz constant of f: 2(1 + 1/α).
inline double f_lipschitz_bound(double alpha) { return 2.0 * (1.0 + 1.0 / alpha); }

/// Pairwise Lipschitz constant of f on the cover, checked against
/// 2(1 + 1/α) + 1e-9. A singleton cover has constant 0.
inline double certify_f_lipschitz(const FiniteMetricSpace& x, const UnionPartition& /*p*/, const CoverResult& c) {
  double lip = 0.0;
  std::size_t wi = 0, wj = 0;
  for (std::size_t i = 0; i < c.cover_idx.size(); ++i) {
    for (std::size_t j = i + 1; j < c.cover_idx.size(); ++j) {
      const double ratio = x(c.nearest[i], c.nearest[j]) / x(c.cover_idx[i], c.cover_idx[j]);
      if (ratio > lip) {
        lip = ratio;
        wi = c.cover_idx[i];
        wj = c.cover_idx[j];
      }
    }
  }
  const double bound = f_lipschitz_bound(c.alpha);
  if (lip > bound + 1e-9)
    throw CertificateViolation("nearest-point map has Lipschitz constant " + std::to_string(lip) +
                                   " above the cover bound " + std::to_string(bound),
                               {wi, wj}, lip);
  return lip;
}

/// Greedy α-cover: repeatedly take the remaining point u closest to B
/// (lowest index on ties), discard every remaining a with d(u,a) <= α R_u,
/// and keep u. Points of A ∩ B have R = 0 and are always kept, mapping to
/// themselves under f; other points map to the lowest-index nearest b.
inline CoverResult build_cover(const FiniteMetricSpace& x, const UnionPartition& p, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw InputError("InvalidAlpha", "alpha must be a positive finite number", {}, alpha);

  CoverResult c;
  c.alpha = alpha;
  const std::size_t na = p.idx_a.size();
  std::vector<char> alive(na, 1);
  std::size_t remaining = na;
  while (remaining > 0) {
    std::size_t u = na;
    for (std::size_t k = 0; k < na; ++k)
      if (alive[k] && (u == na || p.r_a[k] < p.r_a[u])) u = k;
    const double radius = alpha * p.r_a[u];
    const std::size_t xu = p.idx_a[u];
    for (std::size_t k = 0; k < na; ++k) {
      if (alive[k] && x(xu, p.idx_a[k]) <= radius) {
        alive[k] = 0;
        --remaining;
      }
    }
    c.cover_idx.push_back(xu);
  }
  std::ranges::sort(c.cover_idx);

  c.nearest.reserve(c.cover_idx.size());
  for (auto a : c.cover_idx) {
    if (p.contains_b(a)) {
      c.nearest.push_back(a);
      continue;
    }
    const double r = p.r_a[p.pos_a(a)];
    std::size_t best = p.idx_b.front();
    for (auto b : p.idx_b) {
      if (x(a, b) == r) {
        best = b;
        break;
      }
    }
    c.nearest.push_back(best);
  }
  c.lip_f = certify_f_lipschitz(x, p, c);
  return c;
}

/// Result of the exhaustive cover-property check.
struct CoverCheck {
  bool property1 = true;  ///< every a has a' with R_a' <= R_a and d(a,a') <= α R_a
  bool property2 = true;  ///< d(a1',a2') >= α min(R_a1', R_a2')
  bool nearest_exact = true;
  std::vector<std::size_t> witness;
};

/// O(|A| |A'|) verification of both cover properties and of f.
inline CoverCheck verify_cover(const FiniteMetricSpace& x, const UnionPartition& p, const CoverResult& c) {
  CoverCheck out;
  const double alpha = c.alpha;
  for (std::size_t k = 0; k < p.idx_a.size() && out.property1; ++k) {
    const std::size_t a = p.idx_a[k];
    const double ra = p.r_a[k];
    bool ok = false;
    for (auto ap : c.cover_idx) {
      if (p.r_a[p.pos_a(ap)] <= ra && x(a, ap) <= alpha * ra) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      out.property1 = false;
      out.witness = {a};
    }
  }
  for (std::size_t i = 0; i < c.cover_idx.size() && out.property2; ++i) {
    for (std::size_t j = i + 1; j < c.cover_idx.size(); ++j) {
      const auto a1 = c.cover_idx[i], a2 = c.cover_idx[j];
      const double m = std::min(p.r_a[p.pos_a(a1)], p.r_a[p.pos_a(a2)]);
      if (x(a1, a2) < alpha * m) {
        out.property2 = false;
        out.witness = {a1, a2};
        break;
      }
    }
  }
  for (std::size_t i = 0; i < c.cover_idx.size(); ++i) {
    const auto a = c.cover_idx[i];
    const auto b = c.nearest[i];
    if (!p.contains_b(b) || x(a, b) != p.r_a[p.pos_a(a)] || (p.contains_b(a) && b != a)) {
      out.nearest_exact = false;
      out.witness = {a, b};
    }
  }
  return out;
}

}  // namespace metric_union
