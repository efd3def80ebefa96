#include <gtest/gtest.h>

#include <cmath>

#include "metric_union/testgen.hpp"
#include "metric_union/union_embed.hpp"
#include "oracles.hpp"

using namespace metric_union;

namespace {

const AuditEntry* find_entry(const Audit& a, const std::string& name) {
  for (const auto& e : a)
    if (e.name == name) return &e;
  return nullptr;
}

EmbedOptions loose(std::optional<double> alpha = std::nullopt) {
  EmbedOptions o;
  o.alpha = alpha;
  o.strict = false;
  return o;
}

}  // namespace

TEST(Params, DerivedConstants) {
  const EmbedParams p = EmbedParams::make(0.5, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(p.beta, 4.5);
  EXPECT_DOUBLE_EQ(p.gamma, 4.5 * std::sqrt(0.5));
  EXPECT_DOUBLE_EQ(p.psi_aa_bound(), 6.0);
  EXPECT_DOUBLE_EQ(p.psi_cross_bound(), 5.5);
  EXPECT_DOUBLE_EQ(union_distortion_bound(1, 1), 11.0);
  EXPECT_DOUBLE_EQ(union_distortion_bound(2, 3), 52.0);
  EXPECT_EQ(select_alpha(1.0, 1.0), kIsometricAlpha);
  EXPECT_EQ(select_alpha(1.0, 1.5), kGeneralAlpha);
  EXPECT_THROW(EmbedParams::make(0.0, 1, 1), InputError);
  EXPECT_THROW(EmbedParams::make(0.5, 0.5, 1), InputError);
}

TEST(EmbedUnion, GeneralBoundOnGeneratedInstances) {
  for (std::uint64_t i = 0; i < 15; ++i) {
    const TestInstance inst = generate_instance(101, i);
    const UnionEmbedding e = embed_union(inst.space, inst.partition, inst.phi_a, inst.phi_b, loose(0.5));
    EXPECT_TRUE(e.passed()) << "instance " << i << ": " << first_failure(e.audit)->name;
    const double d = oracle::distortion(inst.space.matrix(), e.full);
    EXPECT_LE(d, 11.0 + 1e-6);
    EXPECT_NEAR(d, e.report.distortion, 1e-9 * d);
    EXPECT_GE(1.0 / e.report.contraction, 1.0 - 1e-9);
    EXPECT_EQ(e.full.dim(), inst.phi_a.dim() + inst.phi_b.dim() + 1);
  }
}

TEST(EmbedUnion, IsometricAlphaBeatsSharpBound) {
  for (std::uint64_t i = 0; i < 15; ++i) {
    const TestInstance inst = generate_instance(202, i);
    const UnionEmbedding e = embed_union(inst.space, inst.partition, inst.phi_a, inst.phi_b, loose());
    EXPECT_EQ(e.params.alpha, kIsometricAlpha);
    EXPECT_TRUE(e.passed());
    EXPECT_LT(oracle::distortion(inst.space.matrix(), e.full), kIsometricDistortionBound);
  }
}

TEST(EmbedUnion, DistortedInputs) {
  for (std::uint64_t i = 0; i < 6; ++i) {
    const double da = std::vector<double>{1.5, 2.0, 3.0}[i % 3], db = std::vector<double>{2.0, 3.0, 1.5}[i % 3];
    const TestInstance inst = generate_instance(303, i);
    const PointCloud pa = stretch_first_axis(inst.phi_a, da), pb = stretch_first_axis(inst.phi_b, db);
    const UnionEmbedding e = embed_union(inst.space, inst.partition, pa, pb, loose());
    EXPECT_LE(e.params.d_a, da + 1e-12);
    EXPECT_LE(e.params.d_b, db + 1e-12);
    EXPECT_EQ(e.params.alpha, kGeneralAlpha);
    EXPECT_TRUE(e.passed());
    EXPECT_LE(oracle::distortion(inst.space.matrix(), e.full),
              union_distortion_bound(e.params.d_a, e.params.d_b) + 1e-6);
  }
}

TEST(BuildPsi, ItemsRecomputedIndependently) {
  const TestInstance inst = generate_instance(404, 0);
  const UnionPartition& p = inst.partition;
  const EmbedParams prm = EmbedParams::make(0.5, 1.0, 1.0);
  const PsiResult r = build_psi(inst.space, p, inst.phi_a, inst.phi_b, prm, loose());
  const double tol = prm.tol;
  for (std::size_t u = 0; u < inst.space.size(); ++u)
    for (std::size_t v = u + 1; v < inst.space.size(); ++v) {
      const double d = inst.space(u, v), e = r.psi.distance(u, v);
      if (p.contains_a(u) && p.contains_a(v)) {
        EXPECT_LE(e, 6.0 * (1.0 + tol) * d);
      }
      if (p.contains_b(u) && p.contains_b(v)) {
        EXPECT_NEAR(e, d, 1e-9 * d);
      }
      if (p.contains_a(u) && p.contains_b(v)) {
        EXPECT_LE(e, 5.5 * (1.0 + tol) * d);
        EXPECT_GE(e, d - 4.5 * (1.0 + tol) * p.r_a[p.pos_a(u)] - 1e-12 * d);
      }
    }
}

TEST(EmbedUnion, OverlappingSides) {
  Stream rng(5, "overlap");
  const PointCloud pts = oracle::random_cloud(20, 3, rng);
  const FiniteMetricSpace x = euclidean_space(pts);
  std::vector<std::size_t> a, b;
  for (std::size_t i = 0; i < 20; ++i) {
    if (i < 13) a.push_back(i);
    if (i >= 8) b.push_back(i);
  }
  const UnionPartition p = build_partition(x, a, b);
  const UnionEmbedding e = embed_union(x, p, pts.select(a), pts.select(b), loose());
  EXPECT_TRUE(e.passed());
  EXPECT_EQ(find_entry(e.audit, "Psi.overlap_consistent")->measured, 0.0);
}

TEST(EmbedUnion, SingletonSides) {
  const FiniteMetricSpace x = euclidean_space(PointCloud::from_rows({{0, 0}, {3, 0}, {3, 1}}));
  const UnionPartition p = build_partition(x, {0}, {1, 2});
  const UnionEmbedding e = embed_union(x, p, PointCloud::from_rows({{0}}), PointCloud::from_rows({{0}, {1}}), loose());
  EXPECT_TRUE(e.passed());
}

TEST(EmbedUnion, ContractingInputIsRescaled) {
  const TestInstance inst = generate_instance(505, 1);
  const UnionEmbedding e =
      embed_union(inst.space, inst.partition, inst.phi_a.scaled(0.25), inst.phi_b, loose());
  EXPECT_NEAR(e.side_a.scale, 4.0, 1e-9);
  EXPECT_NEAR(e.params.d_a, 1.0, 1e-9);
  EXPECT_TRUE(e.passed());
}

TEST(EmbedUnion, ShapeMismatchThrows) {
  const TestInstance inst = generate_instance(505, 2);
  EXPECT_THROW(embed_union(inst.space, inst.partition, inst.phi_b, inst.phi_a, loose()), LengthMismatchError);
}

TEST(EmbedUnion, DeterministicAcrossRunsAndThreads) {
  const TestInstance inst = generate_instance(606, 3);
  EmbedOptions o = loose();
  const UnionEmbedding e1 = embed_union(inst.space, inst.partition, inst.phi_a, inst.phi_b, o);
  o.threads = 3;
  const UnionEmbedding e2 = embed_union(inst.space, inst.partition, inst.phi_a, inst.phi_b, o);
  EXPECT_EQ(e1.full.to_rows(), e2.full.to_rows());
  EXPECT_EQ(e1.report.distortion, e2.report.distortion);
}

TEST(Mutation, GammaEqualBetaBreaksLipschitzAudit) {
  const TestInstance inst = generate_instance(707, 0);
  EmbedOptions o = loose(0.5);
  o.gamma_override = EmbedParams::make(0.5, 1, 1).beta;
  const UnionEmbedding e = embed_union(inst.space, inst.partition, inst.phi_a, inst.phi_b, o);
  EXPECT_FALSE(e.passed());
  const AuditEntry* lip_a = find_entry(e.audit, "psi_Delta.lipschitz_A");
  const AuditEntry* lip_b = find_entry(e.audit, "psi_Delta.lipschitz_B");
  ASSERT_NE(lip_a, nullptr);
  ASSERT_NE(lip_b, nullptr);
  const AuditEntry* failed = !lip_a->passed ? lip_a : !lip_b->passed ? lip_b : nullptr;
  ASSERT_NE(failed, nullptr);
  EXPECT_GT(failed->measured, failed->bound);
  EXPECT_NE(failed->witness.first, failed->witness.second);
  o.strict = true;
  EXPECT_THROW(embed_union(inst.space, inst.partition, inst.phi_a, inst.phi_b, o), AuditViolation);
}

TEST(Mutation, GammaZeroBreaksCrossPairLowerBound) {
  bool caught = false;
  for (std::uint64_t i = 0; i < 10 && !caught; ++i) {
    const TestInstance inst = generate_instance(808, i);
    EmbedOptions o = loose(0.5);
    o.gamma_override = 0.0;
    try {
      const UnionEmbedding e = embed_union(inst.space, inst.partition, inst.phi_a, inst.phi_b, o);
      caught = !e.passed();
    } catch (const CollapsedPairError&) {
      caught = true;
    }
  }
  EXPECT_TRUE(caught);
}

TEST(EmbedUnionIsometric, MdsInputsOnEuclideanSpace) {
  Stream rng(12, "iso");
  const FiniteMetricSpace x = euclidean_space(oracle::random_cloud(25, 4, rng));
  std::vector<std::size_t> a, b;
  for (std::size_t i = 0; i < 25; ++i) (i % 3 == 0 ? a : b).push_back(i);
  const UnionEmbedding e = embed_union_isometric(x, build_partition(x, a, b), loose());
  EXPECT_TRUE(e.passed());
  EXPECT_LT(e.report.distortion, kIsometricDistortionBound);
}
