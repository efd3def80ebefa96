#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "metric_union/glue.hpp"
#include "metric_union/testgen.hpp"
#include "oracles.hpp"

using namespace metric_union;

namespace {

GlueInstance reversal() {
  GlueInstance g;
  g.u_points = PointCloud::from_rows({{0}, {1}, {2}, {3.5}});
  g.v_points = PointCloud::from_rows({{0}, {1}, {2}, {-1.5}});
  g.a_idx = {0, 1, 2};
  g.b_idx = {0, 1, 2};
  g.pairing = {0, 2, 1};
  return g;
}

GlueInstance random_glue(std::uint64_t t) {
  Stream rng(31, "glue", t);
  const std::size_t nu = 4 + rng.uniform_int(0, 8), nv = 4 + rng.uniform_int(0, 8);
  const std::size_t na = 1 + rng.uniform_int(0, std::min(nu, nv) - 2);
  GlueInstance g;
  g.u_points = oracle::random_cloud(nu, 1 + rng.uniform_int(0, 3), rng);
  g.v_points = oracle::random_cloud(nv, 1 + rng.uniform_int(0, 3), rng);
  for (std::size_t k = 0; k < na; ++k) {
    g.a_idx.push_back(k);
    g.b_idx.push_back(nv - 1 - k);
  }
  return g;
}

// Shortest paths on U' ⊔ V' (V' scaled) with each a merged into f(a).
Matrix floyd_warshall_glue(const GlueInstance& g, double scale) {
  const std::size_t nu = g.u_points.size(), nv = g.v_points.size();
  const std::size_t n = nu + nv;
  Matrix d(n, n, INFINITY);
  for (std::size_t i = 0; i < nu; ++i)
    for (std::size_t j = 0; j < nu; ++j) d(i, j) = g.u_points.distance(i, j);
  for (std::size_t i = 0; i < nv; ++i)
    for (std::size_t j = 0; j < nv; ++j) d(nu + i, nu + j) = scale * g.v_points.distance(i, j);
  for (std::size_t k = 0; k < g.a_idx.size(); ++k) d(g.a_idx[k], nu + g.image_of(k)) = d(nu + g.image_of(k), g.a_idx[k]) = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
  return d;
}

}  // namespace

TEST(GluedMetric, MatchesFloydWarshallQuotient) {
  for (std::uint64_t t = 0; t < 20; ++t) {
    const GlueInstance g = random_glue(t);
    const GluedSpace gs = glued_metric(g);
    const Matrix ref = floyd_warshall_glue(g, gs.f.scale);
    const std::size_t nu = g.u_points.size();
    std::vector<std::size_t> node_of_glued(gs.space.size());
    for (std::size_t i = 0; i < nu; ++i) node_of_glued[gs.u_to_glued[i]] = i;
    for (std::size_t j = 0; j < g.v_points.size(); ++j)
      if (gs.v_to_glued[j] >= nu) node_of_glued[gs.v_to_glued[j]] = nu + j;
    for (std::size_t i = 0; i < gs.space.size(); ++i)
      for (std::size_t j = 0; j < gs.space.size(); ++j)
        EXPECT_NEAR(gs.space(i, j), ref(node_of_glued[i], node_of_glued[j]), 1e-12 * (1.0 + ref(node_of_glued[i], node_of_glued[j])))
            << "trial " << t;
    EXPECT_EQ(gs.space.size(), nu + g.v_points.size() - g.a_idx.size());
    EXPECT_TRUE(oracle::is_metric(gs.space.matrix(), 1e-10));
  }
}

TEST(ValidateGlue, OrderReversingMapDistortion) {
  const PairingDistortion f = validate_glue(reversal());
  EXPECT_DOUBLE_EQ(f.expansion, 2.0);
  EXPECT_DOUBLE_EQ(f.contraction, 2.0);
  EXPECT_DOUBLE_EQ(f.d_f, 4.0);
  EXPECT_DOUBLE_EQ(f.scale, 2.0);
}

TEST(ValidateGlue, Errors) {
  GlueInstance g = reversal();
  g.pairing = {0, 1, 1};
  EXPECT_THROW(validate_glue(g), InputError);
  g = reversal();
  g.pairing = {0, 1};
  EXPECT_THROW(validate_glue(g), LengthMismatchError);
  g = reversal();
  g.a_idx = {};
  g.b_idx = {};
  g.pairing = {};
  EXPECT_THROW(validate_glue(g), EmptySideError);
  g = reversal();
  g.a_idx = {0, 1, 9};
  EXPECT_THROW(validate_glue(g), InputError);
  g = reversal();
  g.v_points = PointCloud::from_rows({{0}, {1}, {1}, {-1.5}});
  EXPECT_THROW(validate_glue(g), CollapsedPairError);
}

TEST(ExternalExtend, OrderReversingMap) {
  EmbedOptions o;
  o.strict = false;
  const ExternalExtension ext = external_extend(reversal(), o);
  EXPECT_TRUE(ext.passed());
  EXPECT_DOUBLE_EQ(ext.bound, 38.0);
  for (std::size_t k = 0; k < 3; ++k) {
    const std::size_t a = reversal().a_idx[k], b = reversal().pairing[k];
    EXPECT_EQ(distance(ext.f1.point(a), ext.f2.point(b)), 0.0);
  }
  EXPECT_LE(oracle::distortion(euclidean_space(reversal().u_points).matrix(), ext.f1), ext.bound + 1e-6);
  EXPECT_LE(oracle::distortion(euclidean_space(reversal().v_points).matrix(), ext.f2), ext.bound + 1e-6);
}

TEST(ExternalExtend, RandomInstancesStayWithinBound) {
  EmbedOptions o;
  o.strict = false;
  for (std::uint64_t t = 0; t < 10; ++t) {
    const GlueInstance g = random_glue(t);
    const ExternalExtension ext = external_extend(g, o);
    EXPECT_TRUE(ext.passed()) << t;
    EXPECT_LE(ext.distortion_f1, 9.0 * ext.d_f + 2.0 + 1e-6);
    EXPECT_LE(ext.distortion_f2, 9.0 * ext.d_f + 2.0 + 1e-6);
  }
}

TEST(ExternalExtend, IsometryOfIdentifiedPoints) {
  GlueInstance g;
  g.u_points = PointCloud::from_rows({{0, 0}, {1, 0}, {0, 1}, {4, 4}});
  g.v_points = PointCloud::from_rows({{10, 0}, {11, 0}, {10, 1}, {7, -3}});
  g.a_idx = {0, 1, 2};
  g.b_idx = {0, 1, 2};
  EmbedOptions o;
  o.strict = false;
  const ExternalExtension ext = external_extend(g, o);
  EXPECT_DOUBLE_EQ(ext.d_f, 1.0);
  EXPECT_TRUE(ext.passed());
  EXPECT_LE(ext.distortion_f1, 11.0 + 1e-6);
}
