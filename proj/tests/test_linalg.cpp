#include <gtest/gtest.h>

#include <cmath>

#include "aakit/archetypal.hpp"
#include "aakit/linalg.hpp"
#include "oracles.hpp"

using namespace aakit;

namespace {

double max_offdiag_gram_error(const DenseMatrix& q) {
  const auto g = matmul_tn(q, q);
  double worst = 0.0;
  for (std::size_t j = 0; j < g.cols(); ++j)
    for (std::size_t i = 0; i < g.rows(); ++i) worst = std::max(worst, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
  return worst;
}

}  // namespace

TEST(QR, IdentityFactorsTrivially) {
  const auto f = qr_householder(DenseMatrix::identity(4));
  ASSERT_EQ(f.q.cols(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(std::abs(f.q(i, i)), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(f.r(i, i)), 1.0, 1e-15);
  }
  EXPECT_LT(frobenius_norm(matmul(f.q, f.r) - DenseMatrix::identity(4)), 1e-14);
}

TEST(QR, DuplicateColumnIsDropped) {
  const auto a = DenseMatrix::from_rows({{1, 1}, {2, 2}, {3, 3}});
  const auto f = qr_householder(a);
  EXPECT_EQ(f.q.cols(), 1u);
  EXPECT_LT(frobenius_norm(matmul(f.q, f.r) - a), 1e-12);
}

TEST(QR, RandomTallMatrixReconstructs) {
  const auto a = oracle::random_matrix(50, 10, 21);
  const auto f = qr_householder(a);
  ASSERT_EQ(f.q.cols(), 10u);
  EXPECT_LT(max_offdiag_gram_error(f.q), 1e-10);
  EXPECT_LT(frobenius_norm(matmul(f.q, f.r) - a), 1e-8 * frobenius_norm(a));
  for (std::size_t j = 0; j < 10; ++j)
    for (std::size_t i = j + 1; i < 10; ++i) EXPECT_EQ(f.r(i, j), 0.0);
}

TEST(QR, ZeroMatrixGivesEmptyQ) {
  const auto f = qr_householder(DenseMatrix(5, 3));
  EXPECT_EQ(f.q.cols(), 0u);
  EXPECT_EQ(f.q.rows(), 5u);
}

TEST(QR, RankDeficientWideBlockKeepsRank) {
  // 30 x 12 product of rank 4.
  const auto a = matmul(oracle::random_matrix(30, 4, 22), oracle::random_matrix(4, 12, 23));
  const auto f = qr_householder(a);
  EXPECT_EQ(f.q.cols(), 4u);
  EXPECT_LT(max_offdiag_gram_error(f.q), 1e-10);
  EXPECT_LT(frobenius_norm(matmul(f.q, f.r) - a), 1e-8 * frobenius_norm(a));
}

TEST(SVD, DiagonalMatrix) {
  const auto f = svd_dense(DenseMatrix::from_rows({{1, 0, 0}, {0, 3, 0}, {0, 0, 2}}));
  ASSERT_EQ(f.sigma.size(), 3u);
  EXPECT_NEAR(f.sigma[0], 3.0, 1e-14);
  EXPECT_NEAR(f.sigma[1], 2.0, 1e-14);
  EXPECT_NEAR(f.sigma[2], 1.0, 1e-14);
  EXPECT_NEAR(std::abs(f.u(1, 0)), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(f.v(1, 0)), 1.0, 1e-14);
}

TEST(SVD, RankOneOuterProduct) {
  DenseMatrix a(4, 3);
  const double u[4] = {0.5, 0.5, 0.5, 0.5};
  const double v[3] = {0.6, 0.8, 0.0};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = u[i] * v[j];
  const auto f = svd_dense(a);
  EXPECT_NEAR(f.sigma[0], 1.0, 1e-14);
  EXPECT_NEAR(f.sigma[1], 0.0, 1e-14);
  EXPECT_NEAR(f.sigma[2], 0.0, 1e-14);
}

TEST(SVD, MatchesGramEigenOracle) {
  const auto a = oracle::random_matrix(20, 12, 24);
  const auto f = svd_dense(a);
  const auto ref = oracle::gram_singular_values(a);
  ASSERT_EQ(ref.size(), 12u);
  for (std::size_t i = 0; i < 12; ++i) EXPECT_NEAR(f.sigma[i], ref[i], 1e-7 * ref[i]) << i;
}

TEST(SVD, InvariantsOnTallWideAndSquare) {
  for (auto [m, n] : {std::pair{30, 7}, std::pair{7, 30}, std::pair{15, 15}, std::pair{1, 5}, std::pair{5, 1}}) {
    const auto a = oracle::random_matrix(m, n, 100 + m * 31 + n);
    const auto f = svd_dense(a);
    const std::size_t r = std::min(m, n);
    ASSERT_EQ(f.sigma.size(), r);
    EXPECT_EQ(f.u.cols(), r);
    EXPECT_EQ(f.v.cols(), r);
    for (std::size_t i = 0; i + 1 < r; ++i) EXPECT_GE(f.sigma[i], f.sigma[i + 1]);
    for (double s : f.sigma) EXPECT_GE(s, 0.0);
    EXPECT_LT(max_offdiag_gram_error(f.u), 1e-8);
    EXPECT_LT(max_offdiag_gram_error(f.v), 1e-8);
    EXPECT_LT(frobenius_norm(reconstruct(f, r) - a), 1e-7 * frobenius_norm(a));
  }
}

TEST(SVD, EckartYoungTruncationError) {
  const auto a = oracle::random_matrix(25, 18, 25);
  const auto f = svd_dense(a);
  for (std::size_t p : {1u, 4u, 10u}) {
    const double err = spectral_norm(a - reconstruct(f, p));
    EXPECT_NEAR(err, f.sigma[p], 1e-8 * f.sigma[p]) << p;
  }
}

TEST(SVD, RejectsNonFinite) {
  auto a = DenseMatrix::identity(3);
  a(1, 1) = std::nan("");
  EXPECT_THROW(svd_dense(a), ContractViolation);
}

TEST(SpectralNorm, DiagonalAndOrthonormal) {
  EXPECT_NEAR(spectral_norm(DenseMatrix::from_rows({{5, 0}, {0, 1}})), 5.0, 1e-10 * 5);
  const auto q = qr_householder(oracle::random_matrix(12, 5, 26)).q;
  EXPECT_NEAR(spectral_norm(q), 1.0, 1e-10);
  EXPECT_EQ(spectral_norm(DenseMatrix(3, 4)), 0.0);
}

TEST(SpectralNorm, MatchesLargestSingularValue) {
  const auto a = oracle::random_matrix(30, 30, 27);
  EXPECT_NEAR(spectral_norm(a), svd_dense(a).sigma[0], 1e-8 * svd_dense(a).sigma[0]);
}

TEST(SvdRepresentation, ObjectiveIsUnitarilyInvariant) {
  // Σ·Vᵀ represents the columns of x in an orthonormal basis of col(x), so
  // any feasible (A, B) has the same objective on either representation.
  CounterRng rng(28);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = oracle::random_matrix(6 + trial, 9, 300 + trial);
    const auto f = svd_dense(x);
    DenseMatrix rep(f.sigma.size(), x.cols());
    for (std::size_t i = 0; i < f.sigma.size(); ++i)
      for (std::size_t j = 0; j < x.cols(); ++j) rep(i, j) = f.sigma[i] * f.v(j, i);
    DenseMatrix a(9, 3), b(3, 9);
    for (double& e : a.data()) e = rng.uniform();
    for (double& e : b.data()) e = rng.uniform();
    for (std::size_t j = 0; j < 3; ++j) {
      double s = 0.0;
      for (double e : a.col(j)) s += e;
      for (double& e : a.col(j)) e /= s;
    }
    for (std::size_t j = 0; j < 9; ++j) {
      double s = 0.0;
      for (double e : b.col(j)) s += e;
      for (double& e : b.col(j)) e /= s;
    }
    const StochasticMatrix sa(a), sb(b);
    const double on_x = aa_objective(x, x, sa, sb);
    EXPECT_NEAR(aa_objective(rep, rep, sa, sb), on_x, 1e-9 * on_x);
  }
}
