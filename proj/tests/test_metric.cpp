#include <gtest/gtest.h>

#include <cmath>

#include "metric_union/mds.hpp"
#include "metric_union/metric.hpp"
#include "metric_union/testgen.hpp"
#include "oracles.hpp"

using namespace metric_union;

namespace {

MetricError expect_metric_error(const Matrix& d) {
  try {
    validate_metric(d);
  } catch (const MetricError& e) {
    return e;
  }
  ADD_FAILURE() << "no MetricError";
  return MetricError({}, 0);
}

}  // namespace

TEST(ValidateMetric, TriangleViolationNamesTheTriple) {
  const MetricError e = expect_metric_error(Matrix{{0, 1, 3}, {1, 0, 1}, {3, 1, 0}});
  ASSERT_EQ(e.violations().size(), 1u);
  const auto& v = e.violations()[0];
  EXPECT_EQ(v.kind, MetricViolation::Kind::Triangle);
  EXPECT_EQ(v.i, 0u);
  EXPECT_EQ(v.j, 2u);
  EXPECT_EQ(v.k, 1u);
  EXPECT_DOUBLE_EQ(v.slack, 1.0);
}

TEST(ValidateMetric, ReportsAxiomFailures) {
  EXPECT_EQ(expect_metric_error(Matrix{{0, 1}, {2, 0}}).violations()[0].kind, MetricViolation::Kind::Asymmetry);
  EXPECT_EQ(expect_metric_error(Matrix{{1, 1}, {1, 0}}).violations()[0].kind,
            MetricViolation::Kind::NonzeroDiagonal);
  EXPECT_EQ(expect_metric_error(Matrix{{0, -1}, {-1, 0}}).violations()[0].kind,
            MetricViolation::Kind::NegativeDistance);
  EXPECT_EQ(expect_metric_error(Matrix{{0, 0}, {0, 0}}).violations()[0].kind,
            MetricViolation::Kind::ZeroOffDiagonal);
  EXPECT_THROW(validate_metric(Matrix(2, 3)), InputError);
  EXPECT_THROW(validate_metric(Matrix{{0, INFINITY}, {INFINITY, 0}}), InputError);
}

TEST(ValidateMetric, AgreesWithBruteForceOnPerturbedMatrices) {
  for (std::uint64_t t = 0; t < 40; ++t) {
    Stream rng(21, "perturb", t);
    const PointCloud pc = oracle::random_cloud(8, 3, rng);
    Matrix d(8, 8);
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = i + 1; j < 8; ++j) d(i, j) = d(j, i) = pc.distance(i, j);
    if (t % 2 == 1) {
      const std::size_t i = rng.uniform_int(0, 6), j = rng.uniform_int(i + 1, 7);
      d(i, j) = d(j, i) = d(i, j) * 3.0;
    }
    bool threw = false;
    try {
      validate_metric(d);
    } catch (const MetricError&) {
      threw = true;
    }
    EXPECT_EQ(threw, !oracle::is_metric(d)) << "trial " << t;
  }
}

TEST(Partition, DistancesToOppositeSide) {
  const FiniteMetricSpace x = euclidean_space(PointCloud::from_rows({{0}, {1}, {3}, {7}}));
  const UnionPartition p = build_partition(x, {0, 1}, {3, 2});
  EXPECT_EQ(p.idx_b, (std::vector<std::size_t>{2, 3}));
  EXPECT_EQ(p.r_a, (std::vector<double>{3, 2}));
  EXPECT_EQ(p.r_b, (std::vector<double>{2, 6}));
  const UnionPartition q = build_partition(x, {0, 1, 2}, {2, 3});
  EXPECT_EQ(q.r_a[2], 0.0);
  EXPECT_EQ(q.r_b[0], 0.0);
}

TEST(Partition, Errors) {
  const FiniteMetricSpace x = euclidean_space(PointCloud::from_rows({{0}, {1}, {3}}));
  EXPECT_THROW(build_partition(x, {}, {0, 1, 2}), EmptySideError);
  EXPECT_THROW(build_partition(x, {0}, {1}), CoverageError);
  EXPECT_THROW(build_partition(x, {0, 5}, {1, 2}), InputError);
}

TEST(Distortion, MatchesDirectComputationAndThreadCount) {
  Stream rng(4, "dist");
  const PointCloud pts = oracle::random_cloud(30, 4, rng);
  const FiniteMetricSpace x = euclidean_space(pts);
  const PointCloud img = oracle::random_cloud(30, 3, rng);
  const DistortionReport r1 = distortion_of(x, img);
  const DistortionReport r4 = distortion_of(x, img, std::nullopt, 4);
  EXPECT_NEAR(r1.distortion, oracle::distortion(x.matrix(), img), 1e-12 * r1.distortion);
  EXPECT_EQ(r1.distortion, r4.distortion);
  EXPECT_EQ(r1.expansion_pair, r4.expansion_pair);
  EXPECT_EQ(r1.pairs, 435u);
  const auto [i, j] = r1.expansion_pair;
  EXPECT_DOUBLE_EQ(img.distance(i, j) / x(i, j), r1.expansion);
}

TEST(Distortion, CollapsedPairThrows) {
  const FiniteMetricSpace x = euclidean_space(PointCloud::from_rows({{0}, {1}}));
  EXPECT_THROW(distortion_of(x, PointCloud::from_rows({{2}, {2}})), CollapsedPairError);
}

TEST(Distortion, ScalingInvariant) {
  Stream rng(9, "scale");
  const FiniteMetricSpace x = euclidean_space(oracle::random_cloud(12, 2, rng));
  const PointCloud img = oracle::random_cloud(12, 2, rng);
  EXPECT_NEAR(distortion_of(x, img).distortion, distortion_of(x, img.scaled(7.5)).distortion, 1e-12);
}

TEST(Mds, RecoversEuclideanDistances) {
  for (std::uint64_t t = 0; t < 10; ++t) {
    Stream rng(31, "mds", t);
    const FiniteMetricSpace x = euclidean_space(oracle::random_cloud(20, 1 + t % 5, rng));
    const PointCloud y = mds_isometric_embed(x);
    EXPECT_LE(y.dim(), 1 + t % 5);
    EXPECT_NEAR(distortion_of(x, y).distortion, 1.0, 1e-8);
  }
}

TEST(Mds, RejectsNonEuclideanAndClipsInBestEffort) {
  // Star K_{1,3}: center at distance 1 from three leaves pairwise 2 apart.
  const FiniteMetricSpace star =
      validate_metric(Matrix{{0, 1, 1, 1}, {1, 0, 2, 2}, {1, 2, 0, 2}, {1, 2, 2, 0}});
  EXPECT_THROW(mds_isometric_embed(star), NotEuclidean);
  const PointCloud y = mds_best_effort(star);
  EXPECT_GT(distortion_of(star, y).distortion, 1.0);
}

TEST(Testgen, ShortestPathClosureIsMetric) {
  for (std::uint64_t i = 0; i < 5; ++i) {
    const TestInstance inst = generate_instance(7, i);
    EXPECT_TRUE(oracle::is_metric(inst.space.matrix(), 1e-10));
    EXPECT_NEAR(distortion_of(inst.space, inst.phi_a, inst.partition.idx_a).distortion, 1.0, 1e-9);
    EXPECT_NEAR(distortion_of(inst.space, inst.phi_b, inst.partition.idx_b).distortion, 1.0, 1e-9);
  }
}
