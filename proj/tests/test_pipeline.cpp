#include <gtest/gtest.h>

#include "aakit/pipeline.hpp"
#include "aakit/serialize.hpp"
#include "aakit/synth.hpp"
#include "oracles.hpp"

using namespace aakit;

TEST(FitAAA, ExactLowRankPolytopeIsRecovered) {
  // k = 4 vertices in ℝ^20 span a 4-dimensional subspace, so a rank-4
  // sketch is exact.
  const auto pp = planted_polytope(300, 20, 4, 0.0, 120);
  AAAConfig cfg;
  cfg.k = 4;
  cfg.p = 4;
  cfg.eta = 0.01;
  cfg.seed = 1;
  const auto r = fit_aaa(pp.points, cfg);
  EXPECT_LT(r.original_objective, 1e-4);
  EXPECT_LT(oracle::point_set_hausdorff(r.model.archetypes, pp.vertices), 1e-3);
}

TEST(FitAAA, LiftedCoefficientsVanishOutsideSupport) {
  const auto x = lowrank_noise(150, 12, 4, 0.1, 121);
  AAAConfig cfg;
  cfg.k = 3;
  cfg.p = 4;
  cfg.m = 3000;
  cfg.eta = 0.05;
  const auto r = fit_aaa(x, cfg);
  ASSERT_EQ(r.model.a.rows(), 150u);
  std::vector<bool> in_t(150, false);
  for (auto i : r.support.indices) in_t[i] = true;
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < 150; ++i)
      if (!in_t[i]) {
        EXPECT_EQ(r.model.a(i, c), 0.0);
      }
  EXPECT_EQ(r.original_objective, aa_objective(x, x, r.model.a, r.model.b));
  EXPECT_LT(frobenius_norm(r.model.archetypes - matmul(x, r.model.a.matrix())), 1e-12);
}

TEST(FitAAA, EtaNearThreeClampsSupportToRankPlusOne) {
  const auto x = oracle::random_matrix(10, 80, 122);
  AAAConfig cfg;
  cfg.k = 2;
  cfg.p = 5;
  cfg.m = 2000;
  cfg.eta = 2.9999999;
  const auto r = fit_aaa(x, cfg);
  EXPECT_EQ(r.support.indices.size(), 6u);
}

TEST(FitAAA, TooManyArchetypesForSupportIsAConfigError) {
  const auto x = oracle::random_matrix(10, 80, 123);
  AAAConfig cfg;
  cfg.k = 5;
  cfg.p = 2;
  cfg.m = 2000;
  cfg.eta = 2.9999999;
  try {
    fit_aaa(x, cfg);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("|T|"), std::string::npos);
  }
}

TEST(FitAAA, BitwiseDeterministic) {
  const auto x = lowrank_noise(120, 10, 3, 0.05, 124);
  AAAConfig cfg;
  cfg.k = 3;
  cfg.p = 5;
  cfg.m = 2000;
  cfg.eta = 0.05;
  cfg.seed = 77;
  const auto a = to_json(fit_aaa(x, cfg), false).dump();
  const auto b = to_json(fit_aaa(x, cfg), false).dump();
  EXPECT_EQ(a, b);
}

TEST(FitAAA, InvalidConfigThrows) {
  const auto x = oracle::random_matrix(4, 20, 125);
  AAAConfig cfg;
  cfg.p = 0;
  EXPECT_THROW(fit_aaa(x, cfg), ContractViolation);
  cfg.p = 2;
  cfg.eta = 3.0;
  EXPECT_THROW(fit_aaa(x, cfg), ContractViolation);
}

TEST(RankForVariance, SmallestSufficientPrefix) {
  EXPECT_EQ(rank_for_variance({3, 2, 1}, 9.0 / 14.0), 1u);
  EXPECT_EQ(rank_for_variance({3, 2, 1}, 13.0 / 14.0), 2u);
  EXPECT_EQ(rank_for_variance({3, 2, 1}, 1.0), 3u);
  EXPECT_EQ(rank_for_variance({3, 2, 0}, 1.0), 2u);
}

TEST(FitSvdAA, FullVarianceMatchesDirectFit) {
  const auto x = oracle::random_matrix(6, 50, 126);
  AAConfig cfg;
  cfg.seed = 4;
  const auto svd = fit_svd_aa(x, 3, 1.0, cfg);
  EXPECT_EQ(svd.rank, 6u);
  cfg.k = 3;
  const auto direct = fit(x, x, cfg);
  EXPECT_NEAR(svd.original_objective, direct.objective_trace.back(), 1e-7 * direct.objective_trace.back());
}

TEST(FitSvdAA, ExactRankThreeKeepsThree) {
  const auto x = matmul(oracle::random_matrix(10, 3, 127), oracle::random_matrix(3, 40, 128));
  const auto r = fit_svd_aa(x, 2, 0.9999, AAConfig{});
  EXPECT_EQ(r.rank, 3u);
}

TEST(FitSvdAA, TruncationEnvelope) {
  for (int trial = 0; trial < 5; ++trial) {
    const auto x = lowrank_noise(100, 12, 3, 0.03, 1300 + trial);
    AAConfig cfg;
    cfg.k = 3;
    cfg.seed = trial;
    const auto svd = fit_svd_aa(x, 3, 0.95, cfg);
    const double sigma_next = svd_dense(x).sigma[svd.rank];
    const double full = fit(x, x, cfg).objective_trace.back();
    EXPECT_LE(svd.original_objective, full + 4.0 * sigma_next + 1e-6);
  }
}

TEST(FitSvdAA, RankOutOfRangeThrows) {
  const auto x = oracle::random_matrix(3, 10, 129);
  EXPECT_THROW(fit_svd_aa_rank(x, 2, 4, AAConfig{}), ContractViolation);
  EXPECT_THROW(fit_svd_aa(x, 2, 0.0, AAConfig{}), ContractViolation);
}

TEST(ExplainedVariance, PerfectFitIsOne) {
  const auto x = oracle::random_matrix(3, 4, 130);
  AAModel m;
  m.a = StochasticMatrix(DenseMatrix::identity(4));
  m.b = StochasticMatrix(DenseMatrix::identity(4));
  EXPECT_DOUBLE_EQ(explained_variance(x, m), 1.0);
}

TEST(ExplainedVariance, SingleArchetypeAtMeanFitIsAtMostOne) {
  const auto x = oracle::random_matrix(3, 30, 131);
  std::vector<double> mean(3, 0.0);
  for (std::size_t j = 0; j < 30; ++j) axpy(1.0 / 30, x.col(j), mean);
  const auto solution = simplex_lsq(x, mean);
  const auto weights = solution.point.coeffs();
  AAModel m;
  m.a = StochasticMatrix(DenseMatrix(30, 1, std::vector<double>(weights.begin(), weights.end())));
  m.b = StochasticMatrix::uniform(1, 30);
  EXPECT_LE(explained_variance(x, m), 1.0);
}

TEST(ExplainedVariance, PlantedPolytopeIsNearlyFullyExplained) {
  const auto pp = planted_polytope(200, 6, 3, 0.001, 132);
  AAConfig cfg;
  cfg.k = 3;
  EXPECT_GT(explained_variance(pp.points, fit(pp.points, pp.points, cfg)), 0.99);
}

TEST(ExplainedVariance, ConstantData) {
  const DenseMatrix x(2, 5, 3.0);
  AAModel m;
  m.a = StochasticMatrix::uniform(5, 1);
  m.b = StochasticMatrix::uniform(1, 5);
  EXPECT_EQ(explained_variance(x, m), 1.0);
}

TEST(PipelineProperty, SupportSizeWithinCurvatureCount) {
  // Planar polygons lifted into ℝ^6 by a random isometry: the rank-2 sketch
  // recovers the planar geometry up to rotation, so the exact curvature
  // profile of the polygon still applies.
  const std::vector<double> profile{0.4, 0.3, 0.2, 0.05, 0.03, 0.02};
  const double eta = 0.3;
  std::size_t q = 0;
  double mass = 0.0;
  while (mass < 1.0 - eta / 18.0) mass += profile[q++];
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto poly = polygon_from_curvature(profile, 100, seed);
    const auto lift = qr_householder(oracle::random_matrix(6, 2, 140 + seed)).q;
    const auto x = matmul(lift, poly.points);
    AAAConfig cfg;
    cfg.k = 3;
    cfg.p = 2;
    cfg.m = 20000;
    cfg.eta = eta;
    cfg.seed = seed;
    const auto r = fit_aaa(x, cfg);
    EXPECT_LE(r.support.indices.size(), std::max<std::size_t>(q, cfg.p + 1));
  }
}
