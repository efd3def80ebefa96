#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <thread>

#include "metric_union/linalg.hpp"
#include "metric_union/parallel.hpp"
#include "metric_union/random.hpp"
#include "oracles.hpp"

using namespace metric_union;

TEST(SymEigen, MatchesJacobiOnRandomMatrices) {
  for (std::uint64_t t = 0; t < 30; ++t) {
    Stream rng(11, "eig", t);
    const std::size_t n = 1 + rng.uniform_int(0, 24);
    const Matrix m = oracle::random_symmetric(n, rng);
    const auto ours = sym_eigenvalues(m);
    const auto ref = oracle::jacobi_eigenvalues(m);
    ASSERT_EQ(ours.size(), ref.size());
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(ours[i], ref[i], 1e-9 * (1.0 + std::abs(ref[i])));
  }
}

TEST(SymEigen, EigenpairsReconstructTheMatrix) {
  Stream rng(3, "recon");
  const Matrix m = oracle::random_symmetric(17, rng);
  const SymEigen e = sym_eigen(m);
  for (std::size_t i = 0; i < 17; ++i) {
    for (std::size_t j = 0; j < 17; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 17; ++k) s += e.vectors(i, k) * e.values[k] * e.vectors(j, k);
      EXPECT_NEAR(s, m(i, j), 1e-10);
    }
  }
  // Orthonormal columns.
  const Matrix g = e.vectors.transpose() * e.vectors;
  for (std::size_t i = 0; i < 17; ++i)
    for (std::size_t j = 0; j < 17; ++j) EXPECT_NEAR(g(i, j), i == j ? 1.0 : 0.0, 1e-10);
  EXPECT_TRUE(std::is_sorted(e.values.rbegin(), e.values.rend()));
}

TEST(SymEigen, KnownSpectra) {
  const auto diag = sym_eigenvalues(Matrix{{3, 0, 0}, {0, -1, 0}, {0, 0, 2}});
  EXPECT_DOUBLE_EQ(diag[0], 3.0);
  EXPECT_DOUBLE_EQ(diag[1], 2.0);
  EXPECT_DOUBLE_EQ(diag[2], -1.0);
  const auto pair = sym_eigenvalues(Matrix{{2, 1}, {1, 2}});
  EXPECT_NEAR(pair[0], 3.0, 1e-14);
  EXPECT_NEAR(pair[1], 1.0, 1e-14);
}

TEST(SymEigen, RejectsAsymmetricInput) {
  EXPECT_THROW(sym_eigen(Matrix{{1, 2}, {0, 1}}), NotSymmetricError);
}

TEST(Cholesky, SolvesSpdSystems) {
  Stream rng(5, "chol");
  const std::size_t n = 9;
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.normal();
  Matrix h = a.transpose() * a;
  for (std::size_t i = 0; i < n; ++i) h(i, i) += 1.0;
  std::vector<double> b(n);
  for (auto& v : b) v = rng.normal();
  const auto x = cholesky_solve(h, b);
  ASSERT_TRUE(x.has_value());
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += h(i, j) * (*x)[j];
    EXPECT_NEAR(s, b[i], 1e-10);
  }
  EXPECT_FALSE(cholesky_solve(Matrix{{1, 2}, {2, 1}}, std::vector<double>{1, 1}).has_value());
}

TEST(PointCloud, DirectSumAddsSquaredDistances) {
  Stream rng(8, "dsum");
  const PointCloud a = oracle::random_cloud(6, 2, rng), b = oracle::random_cloud(6, 3, rng);
  const PointCloud s = direct_sum({a, b});
  ASSERT_EQ(s.dim(), 5u);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j)
      EXPECT_NEAR(s.squared_distance(i, j), a.squared_distance(i, j) + b.squared_distance(i, j), 1e-12);
}

TEST(PointCloud, RejectsRaggedAndNonFiniteRows) {
  EXPECT_THROW(PointCloud::from_rows({{1, 2}, {3}}), LengthMismatchError);
  EXPECT_THROW(PointCloud::from_rows({{1, NAN}}), InputError);
}

TEST(Stream, SameKeyGivesSameSequence) {
  Stream a(42, "k", 3), b(42, "k", 3), c(42, "k", 4), d(43, "k", 3);
  bool differs_c = false, differs_d = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    differs_c |= x != c();
    differs_d |= x != d();
  }
  EXPECT_TRUE(differs_c);
  EXPECT_TRUE(differs_d);
}

TEST(Stream, UniformIntStaysInRange) {
  Stream rng(1, "range");
  std::vector<int> hits(5, 0);
  for (int i = 0; i < 5000; ++i) {
    const auto v = rng.uniform_int(3, 7);
    ASSERT_GE(v, 3u);
    ASSERT_LE(v, 7u);
    ++hits[v - 3];
  }
  for (int h : hits) EXPECT_GT(h, 800);
}

TEST(ForBlocks, CoversRangeOnceForAnyThreadCount) {
  for (std::size_t threads : {1u, 2u, 5u}) {
    std::vector<int> seen(1000, 0);
    for_blocks(seen.size(), threads, 16, [&](std::size_t, std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) ++seen[i];
    });
    EXPECT_TRUE(std::ranges::all_of(seen, [](int v) { return v == 1; }));
  }
}
