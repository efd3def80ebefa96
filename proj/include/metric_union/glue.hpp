#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "metric_union/error.hpp"
#include "metric_union/linalg.hpp"
#include "metric_union/metric.hpp"
#include "metric_union/union_embed.hpp"

namespace metric_union {

/// A bi-Lipschitz map f: A -> B between finite subsets A ⊆ U' ⊂ R^a and
/// B ⊆ V' ⊂ R^b, given by index lists into the two point clouds.
struct GlueInstance {
  PointCloud u_points;
  PointCloud v_points;
  std::vector<std::size_t> a_idx;
  std::vector<std::size_t> b_idx;
  /// pairing[k] is the v-index that a_idx[k] maps to; empty means
  /// a_idx[k] -> b_idx[k].
  std::vector<std::size_t> pairing;

  std::size_t image_of(std::size_t k) const { return pairing.empty() ? b_idx[k] : pairing[k]; }
};

/// Measured distortion of f together with the factor that makes it
/// non-contracting when applied to V.
struct PairingDistortion {
  double expansion = 1.0;
  double contraction = 1.0;
  double d_f = 1.0;
  double scale = 1.0;  ///< V is multiplied by this (the contraction constant)
};

/// Checks index ranges, distinctness, and that the pairing is a bijection
/// onto b_idx. Returns the pairwise distortion of f.
inline PairingDistortion validate_glue(const GlueInstance& g) {
  const std::size_t na = g.a_idx.size();
  if (na == 0) throw EmptySideError("glue instance has no identified points");
  if (g.b_idx.size() != na)
    throw LengthMismatchError("a_idx has " + std::to_string(na) + " entries, b_idx has " +
                              std::to_string(g.b_idx.size()));
  if (!g.pairing.empty() && g.pairing.size() != na)
    throw LengthMismatchError("pairing has " + std::to_string(g.pairing.size()) + " entries, expected " +
                              std::to_string(na));
  std::vector<char> seen_u(g.u_points.size(), 0), in_b(g.v_points.size(), 0), hit_b(g.v_points.size(), 0);
  for (auto a : g.a_idx) {
    if (a >= g.u_points.size()) throw InputError("IndexOutOfRange", "a_idx entry outside u_points", {a});
    if (seen_u[a]++) throw InputError("DuplicateIndex", "a_idx lists a point twice", {a});
  }
  for (auto b : g.b_idx) {
    if (b >= g.v_points.size()) throw InputError("IndexOutOfRange", "b_idx entry outside v_points", {b});
    if (in_b[b]++) throw InputError("DuplicateIndex", "b_idx lists a point twice", {b});
  }
  for (std::size_t k = 0; k < na; ++k) {
    const auto b = g.image_of(k);
    if (b >= g.v_points.size() || !in_b[b])
      throw InputError("PairingNotBijective", "pairing maps outside b_idx", {g.a_idx[k], b});
    if (hit_b[b]++) throw InputError("PairingNotBijective", "pairing hits a point twice", {g.a_idx[k], b});
  }

  PairingDistortion out;
  double e = 0.0, c = 0.0;
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = i + 1; j < na; ++j) {
      const double du = g.u_points.distance(g.a_idx[i], g.a_idx[j]);
      const double dv = g.v_points.distance(g.image_of(i), g.image_of(j));
      if (du == 0.0 || dv == 0.0)
        throw CollapsedPairError("f identifies or collapses a pair", {g.a_idx[i], g.a_idx[j]});
      e = std::max(e, dv / du);
      c = std::max(c, du / dv);
    }
  }
  if (na >= 2) {
    out.expansion = e;
    out.contraction = c;
    out.d_f = e * c;
    out.scale = c;
  }
  return out;
}

/// The glued space X = (U' ⊔ V') / {a ~ f(a)}. Glued indices: u-point k is
/// k; an unidentified v-point j gets |U'| + (its rank among those points);
/// an identified v-point shares the index of its preimage.
struct GluedSpace {
  FiniteMetricSpace space;
  UnionPartition partition;  ///< A = U', B = image of V'
  std::vector<std::size_t> u_to_glued;
  std::vector<std::size_t> v_to_glued;
  PairingDistortion f;
  PointCloud v_scaled;  ///< V' multiplied by f.scale
};

/// Quotient metric with V scaled so f is non-contracting: Euclidean inside
/// U'; min over x in A of |u - x| + |f(x) - v| across; inside V' the
/// smaller of the direct distance and min over x, y in A of
/// |u - f(x)| + |x - y| + |f(y) - v|.
inline GluedSpace glued_metric(const GlueInstance& g) {
  GluedSpace out;
  out.f = validate_glue(g);
  out.v_scaled = g.v_points.scaled(out.f.scale);
  const PointCloud& u = g.u_points;
  const PointCloud& v = out.v_scaled;
  const std::size_t nu = u.size(), nv = v.size(), na = g.a_idx.size();

  std::vector<std::size_t> preimage(nv, nv);
  for (std::size_t k = 0; k < na; ++k) preimage[g.image_of(k)] = k;
  out.u_to_glued.resize(nu);
  for (std::size_t i = 0; i < nu; ++i) out.u_to_glued[i] = i;
  out.v_to_glued.resize(nv);
  std::size_t next = nu;
  for (std::size_t j = 0; j < nv; ++j) out.v_to_glued[j] = preimage[j] < nv ? g.a_idx[preimage[j]] : next++;
  const std::size_t n = next;

  // cross[i][j]: glued distance from u-point i to v-point j.
  Matrix cross(nu, nv, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < nu; ++i)
    for (std::size_t j = 0; j < nv; ++j)
      for (std::size_t k = 0; k < na; ++k)
        cross(i, j) = std::min(cross(i, j), u.distance(i, g.a_idx[k]) + v.distance(g.image_of(k), j));
  // hop[j][k]: min over x in A of |v_j - f(x)| + |x - a_k|.
  Matrix hop(nv, na, std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < nv; ++j)
    for (std::size_t k = 0; k < na; ++k)
      for (std::size_t x = 0; x < na; ++x)
        hop(j, k) = std::min(hop(j, k), v.distance(j, g.image_of(x)) + u.distance(g.a_idx[x], g.a_idx[k]));

  Matrix d(n, n);
  for (std::size_t i = 0; i < nu; ++i)
    for (std::size_t i2 = 0; i2 < nu; ++i2) d(i, i2) = u.distance(i, i2);
  for (std::size_t j = 0; j < nv; ++j) {
    if (preimage[j] < nv) continue;  // identified: row already filled from U'
    const std::size_t gj = out.v_to_glued[j];
    for (std::size_t i = 0; i < nu; ++i) d(gj, i) = d(i, gj) = cross(i, j);
    for (std::size_t j2 = 0; j2 < nv; ++j2) {
      if (preimage[j2] < nv) continue;
      double best = v.distance(j, j2);
      for (std::size_t k = 0; k < na; ++k) best = std::min(best, hop(j, k) + v.distance(g.image_of(k), j2));
      d(gj, out.v_to_glued[j2]) = best;
    }
  }
  for (std::size_t i = 0; i < n; ++i) d(i, i) = 0.0;

  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < nu; ++i) labels[i] = "u" + std::to_string(i);
  for (std::size_t j = 0; j < nv; ++j)
    if (preimage[j] >= nv) labels[out.v_to_glued[j]] = "v" + std::to_string(j);
  out.space = validate_metric(d, std::move(labels));

  std::vector<std::size_t> ia(nu), ib;
  for (std::size_t i = 0; i < nu; ++i) ia[i] = i;
  for (std::size_t j = 0; j < nv; ++j) ib.push_back(out.v_to_glued[j]);
  out.partition = build_partition(out.space, std::move(ia), std::move(ib));
  return out;
}

/// A pair of maps f1 on U' and f2 on V' into one Euclidean space with
/// f1(a) = f2(f(a)) for every a in A.
struct ExternalExtension {
  PointCloud f1;
  PointCloud f2;
  double distortion_f1 = 1.0;
  double distortion_f2 = 1.0;
  double d_f = 1.0;
  double bound = 0.0;  ///< 9 d_f + 2
  GluedSpace glued;
  UnionEmbedding embedding;
  Audit audit;

  bool passed() const { return all_passed(audit); }
};

/// Embeds the glued space with the union construction (U' isometric,
/// V' non-contracting with Lipschitz constant at most d_f) and restricts Ψ
/// to the two samples.
inline ExternalExtension external_extend(const GlueInstance& g, const EmbedOptions& opt = {}) {
  ExternalExtension out;
  out.glued = glued_metric(g);
  const GluedSpace& gs = out.glued;
  const UnionPartition& p = gs.partition;

  const PointCloud& phi_a = g.u_points;  // idx_a = 0..|U'|-1 in order
  PointCloud phi_b(p.idx_b.size(), g.v_points.dim());
  for (std::size_t j = 0; j < g.v_points.size(); ++j)
    std::ranges::copy(gs.v_scaled.point(j), phi_b.point(p.pos_b(gs.v_to_glued[j])).begin());

  EmbedOptions inner = opt;
  inner.strict = false;
  out.embedding = embed_union(gs.space, p, phi_a, phi_b, inner);
  const PointCloud& psi = out.embedding.full;

  std::vector<std::size_t> rows_u(gs.u_to_glued), rows_v(gs.v_to_glued);
  out.f1 = psi.select(rows_u);
  out.f2 = psi.select(rows_v);
  out.d_f = gs.f.d_f;
  out.bound = 9.0 * out.d_f + 2.0;
  out.distortion_f1 = distortion_of(euclidean_space(g.u_points), out.f1).distortion;
  out.distortion_f2 = distortion_of(euclidean_space(g.v_points), out.f2).distortion;

  out.audit = out.embedding.audit;
  {
    AuditAccumulator acc("glue.compatibility", AuditEntry::Relation::Upper, 0.0, 0.0);
    for (std::size_t k = 0; k < g.a_idx.size(); ++k)
      acc.observe(distance(out.f1.point(g.a_idx[k]), out.f2.point(g.image_of(k))), g.a_idx[k], g.image_of(k));
    out.audit.push_back(acc.finish());
  }
  {
    AuditAccumulator acc("glue.distortion_f1", AuditEntry::Relation::Upper, out.bound, 1e-6);
    acc.observe(out.distortion_f1, 0, 0);
    out.audit.push_back(acc.finish());
    AuditAccumulator acc2("glue.distortion_f2", AuditEntry::Relation::Upper, out.bound, 1e-6);
    acc2.observe(out.distortion_f2, 0, 0);
    out.audit.push_back(acc2.finish());
  }
  if (opt.strict) enforce(out.audit);
  return out;
}

}  // namespace metric_union
