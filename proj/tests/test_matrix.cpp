#include <gtest/gtest.h>

#include <cmath>

#include "aakit/matrix.hpp"
#include "oracles.hpp"

using namespace aakit;

TEST(DenseMatrix, RejectsDataOfWrongLength) {
  EXPECT_THROW(DenseMatrix(2, 3, std::vector<double>(5)), ContractViolation);
}

TEST(DenseMatrix, FromRowsStoresColumnMajor) {
  const auto m = DenseMatrix::from_rows({{1, 2, 3}, {4, 5, 6}});
  ASSERT_EQ(m.rows(), 2u);
  ASSERT_EQ(m.cols(), 3u);
  EXPECT_EQ(m.data()[0], 1.0);
  EXPECT_EQ(m.data()[1], 4.0);
  EXPECT_EQ(m.data()[2], 2.0);
}

TEST(Matmul, IdentityLeavesMatrixUnchanged) {
  const auto x = oracle::random_matrix(3, 6, 1);
  EXPECT_EQ(matmul(DenseMatrix::identity(3), x), x);
}

TEST(Matmul, HandComputedTwoByTwo) {
  const auto c = matmul(DenseMatrix::from_rows({{1, 2}, {3, 4}}), DenseMatrix::from_rows({{1}, {1}}));
  EXPECT_EQ(c, DenseMatrix::from_rows({{3}, {7}}));
}

TEST(Matmul, MatchesTripleLoopOracle) {
  const auto a = oracle::random_matrix(7, 5, 2);
  const auto b = oracle::random_matrix(5, 3, 3);
  const auto c = matmul(a, b);
  const auto ref = oracle::triple_loop_product(a, b);
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < 7; ++i) EXPECT_NEAR(c(i, j), ref(i, j), 1e-12);
}

TEST(Matmul, DimensionMismatchThrows) {
  EXPECT_THROW(matmul(DenseMatrix(2, 3), DenseMatrix(2, 3)), ContractViolation);
}

TEST(Matmul, BitwiseIndependentOfWorkerCount) {
  const auto a = oracle::random_matrix(40, 30, 4);
  const auto b = oracle::random_matrix(30, 57, 5);
  const auto ref = matmul(a, b, 1);
  for (std::size_t w : {2u, 3u, 8u}) EXPECT_EQ(matmul(a, b, w), ref);
  EXPECT_EQ(matmul_tn(a, matmul(a, b), 1), matmul_tn(a, matmul(a, b), 4));
}

TEST(Matmul, TransposedProductMatchesExplicitTranspose) {
  const auto a = oracle::random_matrix(9, 4, 6);
  const auto b = oracle::random_matrix(9, 5, 7);
  const auto c = matmul_tn(a, b);
  const auto ref = oracle::triple_loop_product(transpose(a), b);
  for (std::size_t j = 0; j < 5; ++j)
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(c(i, j), ref(i, j), 1e-12);
}

TEST(StochasticMatrix, ClampsTinyNegativesToZero) {
  const StochasticMatrix s(DenseMatrix::from_rows({{1.0 + 5e-11}, {-5e-11}}));
  EXPECT_EQ(s(1, 0), 0.0);
}

TEST(StochasticMatrix, RejectsNegativeEntriesAndBadSums) {
  EXPECT_THROW(StochasticMatrix(DenseMatrix::from_rows({{1.1}, {-0.1}})), ContractViolation);
  EXPECT_THROW(StochasticMatrix(DenseMatrix::from_rows({{0.5}, {0.4}})), ContractViolation);
}

TEST(StochasticMatrix, ClosedUnderMultiplication) {
  CounterRng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng.below(6), k = 1 + rng.below(5), m = 1 + rng.below(7);
    auto random_stochastic = [&](std::size_t r, std::size_t c) {
      DenseMatrix x(r, c);
      for (std::size_t j = 0; j < c; ++j) {
        double s = 0.0;
        for (double& e : x.col(j)) s += (e = rng.uniform() < 0.3 ? 0.0 : rng.exponential());
        if (s == 0.0) x(0, j) = s = 1.0;
        for (double& e : x.col(j)) e /= s;
      }
      return StochasticMatrix(std::move(x));
    };
    const auto a = random_stochastic(n, k);
    const auto b = random_stochastic(k, m);
    EXPECT_NO_THROW(StochasticMatrix(matmul(a.matrix(), b.matrix())));
  }
}

TEST(AAObjective, ZeroWhenColumnsAreReproduced) {
  const auto x = DenseMatrix::from_rows({{0, 1, 0.5}, {0, 0, 0}});
  const std::vector<std::size_t> verts{0, 1};
  const auto a = StochasticMatrix::selection(3, verts);
  const StochasticMatrix b(DenseMatrix::from_rows({{1, 0, 0.5}, {0, 1, 0.5}}));
  EXPECT_EQ(aa_objective(x, x, a, b), 0.0);
}

TEST(AAObjective, IdentityFactorizationIsExact) {
  const auto x = oracle::random_matrix(4, 6, 8);
  const StochasticMatrix id(DenseMatrix::identity(6));
  EXPECT_EQ(aa_objective(x, x, id, id), 0.0);
}

TEST(AAObjective, MatchesDirectResidualOnSmallInstance) {
  const auto x = DenseMatrix::from_rows({{1, 2, 3, 4}, {0, 1, 0, 2}});
  const StochasticMatrix a(DenseMatrix::from_rows({{0.5, 0}, {0.5, 0}, {0, 0.25}, {0, 0.75}}));
  const StochasticMatrix b(DenseMatrix::from_rows({{1, 0.5, 0.2, 0}, {0, 0.5, 0.8, 1}}));
  // z = x·a, then the residual of every column, summed by hand.
  const double z0[2] = {1.5, 0.5};
  const double z1[2] = {0.25 * 3 + 0.75 * 4, 0.75 * 2};
  double sq = 0.0;
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 2; ++i) {
      const double e = x(i, j) - (z0[i] * b(0, j) + z1[i] * b(1, j));
      sq += e * e;
    }
  EXPECT_NEAR(aa_objective(x, x, a, b), std::sqrt(sq / 4.0), 1e-12);
}

TEST(AAObjective, ShapeMismatchThrows) {
  const auto x = oracle::random_matrix(2, 3, 9);
  const auto a = StochasticMatrix::uniform(3, 2);
  const auto b = StochasticMatrix::uniform(2, 4);
  EXPECT_THROW(aa_objective(x, x, a, b), ContractViolation);
}

TEST(DistinctColumns, KeepsFirstOccurrence) {
  const auto x = DenseMatrix::from_rows({{1, 2, 1, 3, 2}, {0, 0, 0, 1, 0}});
  EXPECT_EQ(distinct_column_indices(x), (std::vector<std::size_t>{0, 1, 3}));
}
