#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "metric_union/audit.hpp"
#include "metric_union/cover.hpp"
#include "metric_union/error.hpp"
#include "metric_union/kirszbraun.hpp"
#include "metric_union/linalg.hpp"
#include "metric_union/mds.hpp"
#include "metric_union/metric.hpp"

namespace metric_union {

inline constexpr double kGeneralAlpha = 0.5;
inline constexpr double kIsometricAlpha = 0.3114;
inline constexpr double kIsometricDistortionBound = 8.93;

/// 0.3114 when both input distortions equal 1 (within 1e-12), else 1/2.
inline double select_alpha(double d_a, double d_b) {
  if (std::abs(d_a - 1.0) <= 1e-12 && std::abs(d_b - 1.0) <= 1e-12) return kIsometricAlpha;
  return kGeneralAlpha;
}

/// The general distortion guarantee 7 D_A D_B + 2 (D_A + D_B).
inline double union_distortion_bound(double d_a, double d_b) { return 7.0 * d_a * d_b + 2.0 * (d_a + d_b); }

struct EmbedParams {
  double alpha = kGeneralAlpha;
  double d_a = 1.0;
  double d_b = 1.0;
  double beta = 0.0;   ///< (1 + α)(2 D_A D_B + 1)
  double gamma = 0.0;  ///< sqrt(1/2) β
  double tol = 1e-7;

  static EmbedParams make(double alpha, double d_a, double d_b, double tol = 1e-7) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
      throw InputError("InvalidAlpha", "alpha must be a positive finite number", {}, alpha);
    if (!(d_a >= 1.0) || !(d_b >= 1.0))
      throw InputError("InvalidDistortion", "input distortions must be at least 1");
    if (!(tol >= 0.0)) throw InputError("InvalidTolerance", "tolerance must be nonnegative", {}, tol);
    EmbedParams p;
    p.alpha = alpha;
    p.d_a = d_a;
    p.d_b = d_b;
    p.beta = (1.0 + alpha) * (2.0 * d_a * d_b + 1.0);
    p.gamma = std::sqrt(0.5) * p.beta;
    p.tol = tol;
    return p;
  }

  EmbedParams swapped() const {
    EmbedParams s = *this;
    std::swap(s.d_a, s.d_b);
    return s;
  }

  /// Lipschitz bound of ψ on A-pairs: 2(1 + 1/α) D_A D_B.
  double psi_aa_bound() const { return 2.0 * (1.0 + 1.0 / alpha) * d_a * d_b; }
  /// Cross-pair upper factor of ψ: 2(1 + α) D_A D_B + (2 + α) D_B.
  double psi_cross_bound() const { return 2.0 * (1.0 + alpha) * d_a * d_b + (2.0 + alpha) * d_b; }
};

struct EmbedOptions {
  std::optional<double> alpha;  ///< overrides select_alpha
  double tol = 1e-7;
  ExtensionSolver solver = ExtensionSolver::InteriorPoint;
  /// Throw AuditViolation on the first failed inequality instead of only
  /// recording it.
  bool strict = true;
  /// Construction uses this γ instead of sqrt(1/2) β; audits keep the true
  /// value. Exists so tests can check that a wrong γ is caught.
  std::optional<double> gamma_override;
  std::size_t threads = 1;
};

/// A caller-supplied embedding of one side, rescaled if needed so it is
/// non-contracting, with its measured distortion bound.
struct SideEmbedding {
  PointCloud phi;
  double scale = 1.0;  ///< factor applied to the caller's coordinates
  double d = 1.0;      ///< measured Lipschitz constant after scaling (>= 1)
};

/// Measures φ on the given side pairwise. If φ contracts some pair it is
/// scaled up by its contraction constant; D is the resulting expansion.
inline SideEmbedding prepare_side(const FiniteMetricSpace& x, std::span<const std::size_t> idx, const PointCloud& phi) {
  SideEmbedding out;
  const DistortionReport rep = distortion_of(x, phi, idx);
  out.scale = rep.pairs > 0 && rep.contraction > 1.0 ? rep.contraction : 1.0;
  out.phi = out.scale == 1.0 ? phi : phi.scaled(out.scale);
  const DistortionReport after = out.scale == 1.0 ? rep : distortion_of(x, out.phi, idx);
  out.d = after.pairs > 0 ? std::max(1.0, after.expansion) : 1.0;
  return out;
}

/// Output of the one-sided construction ψ: X -> R^b.
struct PsiResult {
  PointCloud psi;  ///< one row per point of X
  CoverResult cover;
  SequentialExtension extension;
  Audit audit;
};

namespace detail {

inline void check_side_input(const FiniteMetricSpace& x, std::span<const std::size_t> idx, const PointCloud& phi,
                             double d_bound, const char* side) {
  if (phi.size() != idx.size())
    throw LengthMismatchError(std::string("embedding of side ") + side + " has " + std::to_string(phi.size()) +
                              " points, expected " + std::to_string(idx.size()));
  const DistortionReport rep = distortion_of(x, phi, idx);
  if (rep.pairs == 0) return;
  if (rep.contraction > 1.0 + 1e-9)
    throw InputDistortionError(std::string("embedding of side ") + side + " contracts a pair",
                               {rep.contraction_pair.first, rep.contraction_pair.second}, rep.contraction);
  if (rep.expansion > d_bound * (1.0 + 1e-9))
    throw InputDistortionError(std::string("embedding of side ") + side + " expands beyond its stated bound",
                               {rep.expansion_pair.first, rep.expansion_pair.second}, rep.expansion);
}

}  // namespace detail

/// Builds ψ: X -> R^b that equals φ_B on B and extends φ_B ∘ f ∘ φ_A^{-1}
/// from the cover A' to all of A by Kirszbraun extension. Audits the three
/// pairwise guarantees (A-pairs, B-pairs, cross pairs) under `prefix`.
inline PsiResult build_psi(const FiniteMetricSpace& x, const UnionPartition& p, const PointCloud& phi_a,
                           const PointCloud& phi_b, const EmbedParams& params, const EmbedOptions& opt = {},
                           const std::string& prefix = "psi") {
  detail::check_side_input(x, p.idx_a, phi_a, params.d_a, "A");
  detail::check_side_input(x, p.idx_b, phi_b, params.d_b, "B");

  PsiResult out;
  out.cover = build_cover(x, p, params.alpha);

  std::vector<std::size_t> cover_pos_a, nearest_pos_b;
  for (std::size_t k = 0; k < out.cover.cover_idx.size(); ++k) {
    cover_pos_a.push_back(p.pos_a(out.cover.cover_idx[k]));
    nearest_pos_b.push_back(p.pos_b(out.cover.nearest[k]));
  }
  const PartialMap g = PartialMap::make(phi_a.select(cover_pos_a), phi_b.select(nearest_pos_b));

  std::vector<char> in_cover(x.size(), 0);
  for (auto c : out.cover.cover_idx) in_cover[c] = 1;
  std::vector<std::size_t> rest_pos_a;
  for (std::size_t k = 0; k < p.idx_a.size(); ++k)
    if (!in_cover[p.idx_a[k]]) rest_pos_a.push_back(k);

  ExtensionOptions eopt;
  eopt.tol = params.tol;
  eopt.solver = opt.solver;
  out.extension = extend_sequential(g, phi_a.select(rest_pos_a), eopt);

  const std::size_t n = x.size();
  out.psi = PointCloud(n, phi_b.dim());
  for (std::size_t k = 0; k < p.idx_b.size(); ++k) std::ranges::copy(phi_b.point(k), out.psi.point(p.idx_b[k]).begin());
  for (std::size_t k = 0; k < out.cover.cover_idx.size(); ++k) {
    const auto a = out.cover.cover_idx[k];
    if (p.contains_b(a)) continue;
    std::ranges::copy(g.targets.point(k), out.psi.point(a).begin());
  }
  for (std::size_t r = 0; r < rest_pos_a.size(); ++r)
    std::ranges::copy(out.extension.images.point(r), out.psi.point(p.idx_a[rest_pos_a[r]]).begin());

  // Audit.
  const double tol = params.tol;
  const CoverCheck cc = verify_cover(x, p, out.cover);
  {
    AuditEntry e{prefix + ".cover.property1", AuditEntry::Relation::Lower, 1.0, cc.property1 ? 1.0 : 0.0,
                 cc.property1 ? 0.0 : -1.0, 0.0, false, cc.property1, {0, 0}, p.idx_a.size()};
    if (!cc.property1 && !cc.witness.empty()) e.witness = {cc.witness[0], cc.witness[0]};
    out.audit.push_back(e);
    AuditEntry e2{prefix + ".cover.property2", AuditEntry::Relation::Lower, 1.0, cc.property2 ? 1.0 : 0.0,
                  cc.property2 ? 0.0 : -1.0, 0.0, false, cc.property2, {0, 0}, out.cover.cover_idx.size()};
    if (!cc.property2 && cc.witness.size() >= 2) e2.witness = {cc.witness[0], cc.witness[1]};
    out.audit.push_back(e2);
    const double fb = f_lipschitz_bound(params.alpha);
    out.audit.push_back({prefix + ".cover.f_lipschitz", AuditEntry::Relation::Upper, fb, out.cover.lip_f,
                         fb - out.cover.lip_f, 1e-9, false, out.cover.lip_f <= fb + 1e-9 && cc.nearest_exact, {0, 0},
                         out.cover.cover_idx.size()});
    const double lvl = out.extension.lip;
    out.audit.push_back({prefix + ".kirszbraun.lipschitz", AuditEntry::Relation::Upper, lvl,
                         out.extension.final_lip, lvl - out.extension.final_lip, tol * lvl, false,
                         out.extension.final_lip <= lvl * (1.0 + tol), {0, 0}, p.idx_a.size()});
  }

  AuditAccumulator item1(prefix + ".item1.aa_upper", AuditEntry::Relation::Upper, params.psi_aa_bound(),
                         tol * params.psi_aa_bound());
  AuditAccumulator item2_lo(prefix + ".item2.bb_lower", AuditEntry::Relation::Lower, 1.0, 1e-9);
  AuditAccumulator item2_hi(prefix + ".item2.bb_upper", AuditEntry::Relation::Upper, params.d_b, 1e-9 * params.d_b);
  AuditAccumulator item3_hi(prefix + ".item3.ab_upper", AuditEntry::Relation::Upper, params.psi_cross_bound(),
                            tol * params.psi_cross_bound());
  // Lower bound d(a,b) - β R_a <= |ψ(a) - ψ(b)|, measured as the normalized
  // slack (|ψ(a)-ψ(b)| - d + β(1+tol) R_a) / d.
  AuditAccumulator item3_lo(prefix + ".item3.ab_lower", AuditEntry::Relation::Lower, 0.0, 1e-12);

  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      const double d = x(u, v);
      const double e = out.psi.distance(u, v);
      if (p.contains_a(u) && p.contains_a(v)) item1.observe(e / d, u, v);
      if (p.contains_b(u) && p.contains_b(v)) {
        item2_lo.observe(e / d, u, v);
        item2_hi.observe(e / d, u, v);
      }
      for (int orient = 0; orient < 2; ++orient) {
        const std::size_t a = orient == 0 ? u : v;
        const std::size_t b = orient == 0 ? v : u;
        if (!p.contains_a(a) || !p.contains_b(b)) continue;
        item3_hi.observe(e / d, a, b);
        const double ra = p.r_a[p.pos_a(a)];
        item3_lo.observe((e - d + params.beta * (1.0 + tol) * ra) / d, a, b);
      }
    }
  }
  for (const auto* acc : {&item1, &item2_lo, &item2_hi, &item3_hi, &item3_lo}) out.audit.push_back(acc->finish());
  if (opt.strict) enforce(out.audit);
  return out;
}

/// Counts and worst ratios for the three regimes of the cross-pair
/// non-contraction argument (ordered so that R_a <= R_b).
struct ClaimCaseStats {
  std::size_t count[3] = {0, 0, 0};
  double min_ratio[3] = {INFINITY, INFINITY, INFINITY};
};

struct UnionEmbedding {
  EmbedParams params;
  SideEmbedding side_a;
  SideEmbedding side_b;
  PointCloud psi_a;      ///< R^a image of X
  PointCloud psi_b;      ///< R^b image of X
  PointCloud psi_delta;  ///< 1-D
  PointCloud full;       ///< psi_a ⊕ psi_b ⊕ psi_delta
  CoverResult cover_a;   ///< cover of A w.r.t. B (used by ψ_B)
  CoverResult cover_b;   ///< cover of B w.r.t. A (used by ψ_A)
  DistortionReport report;
  ClaimCaseStats claim;
  Audit audit;

  bool passed() const { return all_passed(audit); }
};

/// Headline distortion guarantee for the chosen parameters, or nullopt when
/// α is neither of the two values the guarantee is stated for.
inline std::optional<double> headline_bound(const EmbedParams& p) {
  if (std::abs(p.alpha - kGeneralAlpha) <= 1e-12) return union_distortion_bound(p.d_a, p.d_b);
  if (std::abs(p.alpha - kIsometricAlpha) <= 1e-12 && std::abs(p.d_a - 1.0) <= 1e-12 &&
      std::abs(p.d_b - 1.0) <= 1e-12)
    return kIsometricDistortionBound;
  return std::nullopt;
}

/// Embeds X = A ∪ B into R^{a+b+1} as Ψ = ψ_A ⊕ ψ_B ⊕ ψ_Δ, given
/// embeddings φ_A of A (rows follow P.idx_a) and φ_B of B (rows follow
/// P.idx_b). D_A and D_B are measured from the inputs.
inline UnionEmbedding embed_union(const FiniteMetricSpace& x, const UnionPartition& p, const PointCloud& phi_a,
                                  const PointCloud& phi_b, const EmbedOptions& opt = {}) {
  if (phi_a.size() != p.idx_a.size() || phi_b.size() != p.idx_b.size())
    throw LengthMismatchError("side embeddings do not match the partition sizes");
  UnionEmbedding out;
  out.side_a = prepare_side(x, p.idx_a, phi_a);
  out.side_b = prepare_side(x, p.idx_b, phi_b);
  const double alpha = opt.alpha.value_or(select_alpha(out.side_a.d, out.side_b.d));
  out.params = EmbedParams::make(alpha, out.side_a.d, out.side_b.d, opt.tol);
  const EmbedParams& prm = out.params;

  EmbedOptions inner = opt;
  inner.strict = false;
  PsiResult psi_b = build_psi(x, p, out.side_a.phi, out.side_b.phi, prm, inner, "psi_B");
  PsiResult psi_a = build_psi(x, p.swapped(), out.side_b.phi, out.side_a.phi, prm.swapped(), inner, "psi_A");
  out.cover_a = psi_b.cover;
  out.cover_b = psi_a.cover;
  out.psi_b = std::move(psi_b.psi);
  out.psi_a = std::move(psi_a.psi);
  out.audit = std::move(psi_b.audit);
  out.audit.insert(out.audit.end(), psi_a.audit.begin(), psi_a.audit.end());

  const std::size_t n = x.size();
  const double gamma_used = opt.gamma_override.value_or(prm.gamma);
  out.psi_delta = PointCloud(n, 1);
  std::vector<double> r(n, 0.0);  // R_x for x in A \ B (positive side) and B \ A (negative side)
  for (std::size_t k = 0; k < p.idx_a.size(); ++k) {
    const auto a = p.idx_a[k];
    out.psi_delta(a, 0) = gamma_used * p.r_a[k];
  }
  for (std::size_t k = 0; k < p.idx_b.size(); ++k) {
    const auto b = p.idx_b[k];
    if (p.contains_a(b)) continue;  // overlap: R = 0 on both sides
    out.psi_delta(b, 0) = -gamma_used * p.r_b[k];
  }
  out.full = direct_sum({out.psi_a, out.psi_b, out.psi_delta});

  // Pairwise theorem-level audit.
  const double tol = prm.tol;
  const double da = prm.d_a, db = prm.d_b, al = prm.alpha, be = prm.beta, ga = prm.gamma;
  const double inv = 1.0 + 1.0 / al;
  const double aa_sq = da * da + 4.0 * inv * inv * da * da * db * db + ga * ga;
  const double bb_sq = db * db + 4.0 * inv * inv * da * da * db * db + ga * ga;
  const double xi_a = 2.0 * (1.0 + al) * da * db + (2.0 + al) * da;
  const double xi_b = 2.0 * (1.0 + al) * da * db + (2.0 + al) * db;
  const double ab_sq = xi_a * xi_a + xi_b * xi_b + 4.0 * ga * ga;
  // The Kirszbraun step may overshoot its level by (1 + tol).
  const double sq_tol = 3.0 * tol;

  AuditAccumulator non_contraction("Psi.non_contraction", AuditEntry::Relation::Lower, 1.0, 1e-9);
  AuditAccumulator exp_aa("Psi.expansion_sq.aa", AuditEntry::Relation::Upper, aa_sq, sq_tol * aa_sq);
  AuditAccumulator exp_bb("Psi.expansion_sq.bb", AuditEntry::Relation::Upper, bb_sq, sq_tol * bb_sq);
  AuditAccumulator exp_ab("Psi.expansion_sq.ab", AuditEntry::Relation::Upper, ab_sq, sq_tol * ab_sq);
  AuditAccumulator case1("Psi.claim.case1", AuditEntry::Relation::Lower, 1.0, 1e-9);
  AuditAccumulator case2("Psi.claim.case2", AuditEntry::Relation::Lower, 1.0, 1e-9);
  AuditAccumulator case3("Psi.claim.case3", AuditEntry::Relation::Lower, std::sqrt(2.0), 1e-9);
  AuditAccumulator dom_a("Psi.dominates_phi_A", AuditEntry::Relation::Lower, 0.0, 0.0);
  AuditAccumulator dom_b("Psi.dominates_phi_B", AuditEntry::Relation::Lower, 0.0, 0.0);
  AuditAccumulator delta_a("psi_Delta.lipschitz_A", AuditEntry::Relation::Upper, ga, 1e-12 * ga);
  AuditAccumulator delta_b("psi_Delta.lipschitz_B", AuditEntry::Relation::Upper, ga, 1e-12 * ga);

  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      const double d = x(u, v);
      const double e2 = out.full.squared_distance(u, v);
      const double e = std::sqrt(e2);
      const double ratio = e / d;
      non_contraction.observe(ratio, u, v);
      const bool aa = p.contains_a(u) && p.contains_a(v);
      const bool bb = p.contains_b(u) && p.contains_b(v);
      if (aa) {
        exp_aa.observe(e2 / (d * d), u, v);
        const double phi = out.side_a.phi.distance(p.pos_a(u), p.pos_a(v));
        dom_a.observe(e - phi, u, v);
        delta_a.observe(std::abs(out.psi_delta(u, 0) - out.psi_delta(v, 0)) / d, u, v);
      }
      if (bb) {
        exp_bb.observe(e2 / (d * d), u, v);
        const double phi = out.side_b.phi.distance(p.pos_b(u), p.pos_b(v));
        dom_b.observe(e - phi, u, v);
        delta_b.observe(std::abs(out.psi_delta(u, 0) - out.psi_delta(v, 0)) / d, u, v);
      }
      for (int orient = 0; orient < 2; ++orient) {
        const std::size_t a = orient == 0 ? u : v;
        const std::size_t b = orient == 0 ? v : u;
        if (!p.contains_a(a) || !p.contains_b(b)) continue;
        exp_ab.observe(e2 / (d * d), a, b);
        const double ra = p.r_a[p.pos_a(a)];
        const double rb = p.r_b[p.pos_b(b)];
        const double lo = std::min(ra, rb), hi = std::max(ra, rb);
        int which;
        if (be * hi <= d)
          which = 0;
        else if (be * lo <= d)
          which = 1;
        else
          which = 2;
        ++out.claim.count[which];
        out.claim.min_ratio[which] = std::min(out.claim.min_ratio[which], ratio);
        (which == 0 ? case1 : which == 1 ? case2 : case3).observe(ratio, a, b);
      }
    }
  }

  out.report = distortion_of(x, out.full, std::nullopt, opt.threads);
  for (const auto* acc : {&non_contraction, &exp_aa, &exp_bb, &exp_ab, &case1, &case2, &case3, &dom_a, &dom_b,
                          &delta_a, &delta_b})
    out.audit.push_back(acc->finish());

  AuditAccumulator overlap("Psi.overlap_consistent", AuditEntry::Relation::Upper, 0.0, 0.0);
  for (std::size_t k = 0; k < p.idx_a.size(); ++k) {
    const auto xo = p.idx_a[k];
    if (!p.contains_b(xo)) continue;
    const double dev = std::abs(out.psi_delta(xo, 0)) +
                       distance(out.psi_a.point(xo), out.side_a.phi.point(k)) +
                       distance(out.psi_b.point(xo), out.side_b.phi.point(p.pos_b(xo)));
    overlap.observe(dev, xo, xo);
  }
  out.audit.push_back(overlap.finish());

  const double general = std::sqrt(std::max({aa_sq, bb_sq, ab_sq}));
  {
    AuditAccumulator acc("Psi.distortion.general", AuditEntry::Relation::Upper, general, sq_tol * general);
    acc.observe(out.report.distortion, out.report.expansion_pair.first, out.report.expansion_pair.second);
    out.audit.push_back(acc.finish());
  }
  if (auto headline = headline_bound(prm)) {
    const bool strict_bound = *headline == kIsometricDistortionBound;
    AuditAccumulator acc("Psi.distortion.theorem", AuditEntry::Relation::Upper, *headline,
                         strict_bound ? 0.0 : 1e-6, strict_bound);
    acc.observe(out.report.distortion, out.report.expansion_pair.first, out.report.expansion_pair.second);
    out.audit.push_back(acc.finish());
  }
  if (opt.strict) enforce(out.audit);
  return out;
}

/// Convenience path when both sides are isometrically Euclidean: φ_A and
/// φ_B come from classical MDS of the two subspaces.
inline UnionEmbedding embed_union_isometric(const FiniteMetricSpace& x, const UnionPartition& p,
                                            const EmbedOptions& opt = {}) {
  const PointCloud phi_a = mds_isometric_embed(x.restrict(p.idx_a));
  const PointCloud phi_b = mds_isometric_embed(x.restrict(p.idx_b));
  return embed_union(x, p, phi_a, phi_b, opt);
}

}  // namespace metric_union
