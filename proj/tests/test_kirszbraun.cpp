#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "metric_union/kirszbraun.hpp"
#include "oracles.hpp"

using namespace metric_union;

namespace {

using P2 = std::array<double, 2>;

// Is there a point inside every disk (c_i, r_i)? If the intersection is
// nonempty its leftmost point is the leftmost point of one disk or a
// crossing of two boundary circles, so checking those candidates suffices.
bool disks_intersect(const std::vector<P2>& c, const std::vector<double>& r) {
  auto inside_all = [&](P2 p) {
    for (std::size_t i = 0; i < c.size(); ++i)
      if (std::hypot(p[0] - c[i][0], p[1] - c[i][1]) > r[i] * (1.0 + 1e-12) + 1e-12) return false;
    return true;
  };
  for (std::size_t i = 0; i < c.size(); ++i)
    if (inside_all({c[i][0] - r[i], c[i][1]})) return true;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j) {
      const double dx = c[j][0] - c[i][0], dy = c[j][1] - c[i][1];
      const double d = std::hypot(dx, dy);
      if (d == 0.0 || d > r[i] + r[j] || d < std::abs(r[i] - r[j])) continue;
      const double a = (r[i] * r[i] - r[j] * r[j] + d * d) / (2.0 * d);
      const double h = std::sqrt(std::max(0.0, r[i] * r[i] - a * a));
      const P2 m{c[i][0] + a * dx / d, c[i][1] + a * dy / d};
      if (inside_all({m[0] + h * dy / d, m[1] - h * dx / d})) return true;
      if (inside_all({m[0] - h * dy / d, m[1] + h * dx / d})) return true;
    }
  return false;
}

// min_y max_i |y - t_i| / d_i by bisection on the level.
double disk_oracle(const std::vector<P2>& t, const std::vector<double>& d) {
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i)
    hi = std::max(hi, std::hypot(t[i][0] - t[0][0], t[i][1] - t[0][1]) / d[i]);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    std::vector<double> r(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) r[i] = mid * d[i];
    (disks_intersect(t, r) ? hi : lo) = mid;
  }
  return hi;
}

PartialMap random_map(Stream& rng, std::size_t m, std::size_t ds, std::size_t dt) {
  const PointCloud src = oracle::random_cloud(m, ds, rng);
  PointCloud tgt(m, dt);
  // Random linear map plus noise keeps the Lipschitz constant moderate.
  std::vector<double> a(ds * dt);
  for (auto& v : a) v = rng.normal();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < dt; ++k) {
      double s = 0.3 * rng.normal();
      for (std::size_t l = 0; l < ds; ++l) s += a[k * ds + l] * src(i, l);
      tgt(i, k) = s;
    }
  return PartialMap::make(src, tgt);
}

}  // namespace

TEST(ExtendOnePoint, MatchesDiskIntersectionOracleInThePlane) {
  for (std::uint64_t t = 0; t < 25; ++t) {
    Stream rng(17, "planar", t);
    const std::size_t m = 2 + rng.uniform_int(0, 6);
    const PartialMap map = random_map(rng, m, 2, 2);
    const std::vector<double> x{rng.normal(), rng.normal()};
    std::vector<P2> tg(m);
    std::vector<double> d(m);
    for (std::size_t i = 0; i < m; ++i) {
      tg[i] = {map.targets(i, 0), map.targets(i, 1)};
      d[i] = distance(x, map.sources.point(i));
    }
    const double ref = disk_oracle(tg, d);
    for (auto solver : {ExtensionSolver::InteriorPoint, ExtensionSolver::BisectionProjection}) {
      ExtensionOptions opt;
      opt.solver = solver;
      opt.tol = 1e-9;
      const PointExtension e = extend_one_point(map, x, opt);
      EXPECT_NEAR(e.objective, ref, 1e-6 * (1.0 + ref)) << "trial " << t << " " << to_string(solver);
      EXPECT_LE(e.objective, map.lip * (1.0 + 1e-9));
    }
  }
}

TEST(ExtendOnePoint, ObjectiveIsAchievedByReturnedPoint) {
  Stream rng(2, "achieve");
  const PartialMap map = random_map(rng, 12, 4, 3);
  const std::vector<double> x{0.1, -0.2, 0.3, 0.0};
  const PointExtension e = extend_one_point(map, x);
  double worst = 0.0;
  for (std::size_t i = 0; i < map.size(); ++i)
    worst = std::max(worst, distance(e.y, map.targets.point(i)) / distance(x, map.sources.point(i)));
  EXPECT_NEAR(worst, e.objective, 1e-12 * worst);
  EXPECT_LE(e.certificate, 1e-3);
}

TEST(ExtendOnePoint, DuplicateSourceForcesItsTarget) {
  const PartialMap map = PartialMap::make(PointCloud::from_rows({{0, 0}, {1, 0}}), PointCloud::from_rows({{5}, {6}}));
  const PointExtension e = extend_one_point(map, std::vector<double>{1, 0});
  EXPECT_TRUE(e.duplicate);
  EXPECT_EQ(e.y, (std::vector<double>{6}));
}

TEST(ExtendOnePoint, InconsistentDuplicatesAreRejected) {
  EXPECT_THROW(PartialMap::make(PointCloud::from_rows({{0}, {0}}), PointCloud::from_rows({{1}, {2}})),
               InconsistentDuplicate);
}

TEST(ExtendOnePoint, ConstantMapExtendsConstantly) {
  const PartialMap map =
      PartialMap::make(PointCloud::from_rows({{0}, {1}, {2}}), PointCloud::from_rows({{3, 3}, {3, 3}, {3, 3}}));
  const PointExtension e = extend_one_point(map, std::vector<double>{7});
  EXPECT_EQ(e.y, (std::vector<double>{3, 3}));
  EXPECT_EQ(e.objective, 0.0);
}

TEST(ExtendOnePoint, ShapeErrors) {
  const PartialMap map = PartialMap::make(PointCloud::from_rows({{0, 0}}), PointCloud::from_rows({{1}}));
  EXPECT_THROW(extend_one_point(map, std::vector<double>{1}), LengthMismatchError);
  EXPECT_THROW(PartialMap::make(PointCloud::from_rows({{0}}), PointCloud::from_rows({{1}, {2}})), LengthMismatchError);
}

TEST(ExtendOnePoint, ZeroToleranceSurfacesSolverStall) {
  Stream rng(6, "stall");
  const PartialMap map = random_map(rng, 10, 3, 3);
  ExtensionOptions opt;
  opt.tol = 0.0;
  bool stalled = false;
  for (int k = 0; k < 5 && !stalled; ++k) {
    const std::vector<double> x{rng.normal(), rng.normal(), rng.normal()};
    try {
      extend_one_point(map, x, opt);
    } catch (const SolverStall& e) {
      stalled = true;
      EXPECT_EQ(e.kind(), "SolverStall");
    }
  }
  EXPECT_TRUE(stalled);
}

TEST(ExtendSequential, LipschitzPreservedOnRandomMaps) {
  for (std::uint64_t t = 0; t < 40; ++t) {
    Stream rng(23, "seq", t);
    const std::size_t ds = 1 + rng.uniform_int(0, 7), dt = 1 + rng.uniform_int(0, 7);
    const std::size_t m = 2 + rng.uniform_int(0, 18), extra = 1 + rng.uniform_int(0, 19);
    const PartialMap map = random_map(rng, m, ds, dt);
    const PointCloud xs = oracle::random_cloud(extra, ds, rng);
    const SequentialExtension ext = extend_sequential(map, xs);
    PointCloud src = map.sources, tgt = map.targets;
    for (std::size_t k = 0; k < extra; ++k) {
      src.push_back(xs.point(k));
      tgt.push_back(ext.images.point(k));
    }
    // Oracle: direct all-pairs ratio.
    double lip = 0.0;
    for (std::size_t i = 0; i < src.size(); ++i)
      for (std::size_t j = i + 1; j < src.size(); ++j)
        lip = std::max(lip, tgt.distance(i, j) / src.distance(i, j));
    EXPECT_LE(lip, map.lip * (1.0 + 1e-7)) << "trial " << t;
    EXPECT_NEAR(lip, ext.final_lip, 1e-12 * lip);
  }
}

TEST(ExtendSequential, EmptyInputIsNoOp) {
  Stream rng(1, "empty");
  const PartialMap map = random_map(rng, 4, 2, 2);
  const SequentialExtension ext = extend_sequential(map, PointCloud(0, 2));
  EXPECT_EQ(ext.images.size(), 0u);
  EXPECT_EQ(ext.final_lip, map.lip);
}
