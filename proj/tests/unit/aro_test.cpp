#include <gtest/gtest.h>

#include <numeric>

#include "oracles.hpp"
#include "reidtk/aro.hpp"
#include "reidtk/error.hpp"

namespace reidtk::aro {
namespace {

void expect_near(const Matrix& got, const oracle::Dense& want, double tol) {
  ASSERT_EQ(got.rows(), want.size());
  for (std::size_t i = 0; i < got.rows(); ++i) {
    ASSERT_EQ(got.cols(), want[i].size());
    for (std::size_t j = 0; j < got.cols(); ++j) EXPECT_NEAR(got(i, j), want[i][j], tol) << i << "," << j;
  }
}

TEST(DistancePair, UnitAxes) {
  const auto pair = build_distance_pair(FeatureMatrix::from_rows({{1, 0}}), FeatureMatrix::from_rows({{1, 0}, {0, 1}}));
  EXPECT_EQ(pair.query_gallery, DistanceMatrix(Matrix::from_rows({{0, 2}}), true));
  EXPECT_EQ(pair.gallery_gallery(0, 0), 0.0);
  EXPECT_EQ(pair.gallery_gallery(1, 1), 0.0);
  EXPECT_TRUE(pair.gallery_gallery.squared());
}

TEST(DistancePair, MatchesPairLoop) {
  datagen::Rng rng(50);
  const auto fq = oracle::random_features(rng, 4, 3);
  const auto fg = oracle::random_features(rng, 6, 3);
  const auto pair = build_distance_pair(fq, fg);
  expect_near(pair.query_gallery, oracle::sq_dist(oracle::to_dense(fq), oracle::to_dense(fg)), 1e-6);
  expect_near(pair.gallery_gallery, oracle::sq_dist(oracle::to_dense(fg), oracle::to_dense(fg)), 1e-6);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(pair.gallery_gallery(i, i), 0.0);
}

TEST(DistancePair, DimensionMismatch) {
  EXPECT_THROW(build_distance_pair(FeatureMatrix(1, 2), FeatureMatrix(1, 3)), ConfigError);
}

TEST(NeighborhoodFilter, KeepsTwoSmallest) {
  const DistanceMatrix d(Matrix::from_rows({{0.2, 0.5, 0.9}}), true);
  EXPECT_EQ(neighborhood_filter(d, 2, 1.0), DistanceMatrix(Matrix::from_rows({{0.2, 0.5, 1.0}}), true));
  EXPECT_EQ(neighborhood_filter(d, 2, 0.0), DistanceMatrix(Matrix::from_rows({{0.2, 0.5, 0.0}}), true));
}

TEST(NeighborhoodFilter, NoOpWhenK2CoversRow) {
  const DistanceMatrix d(Matrix::from_rows({{0.2, 0.5, 0.9}, {3, 2, 1}}), true);
  EXPECT_EQ(neighborhood_filter(d, 3, 1.0), d);
  EXPECT_EQ(neighborhood_filter(d, 30, 0.0), d);
}

TEST(NeighborhoodFilter, MatchesFullSortMask) {
  datagen::Rng rng(51);
  const auto f = oracle::random_features(rng, 10, 3);
  const auto d = tensor::pairwise_sq_euclidean(f);
  for (double fill : {0.0, 1.0}) expect_near(neighborhood_filter(d, 4, fill), oracle::filter(oracle::to_dense(d), 4, fill), 0.0);
}

TEST(AsymmetricSimilarity, IdenticalRowsGiveOne) {
  const DistanceMatrix qg(Matrix::from_rows({{0.3, 1.0, 0.1}}), true);
  const DistanceMatrix gg(Matrix::from_rows({{0, 1, 1}, {0.3, 1.0, 0.1}, {1, 1, 0}}), true);
  const auto a = asymmetric_similarity(qg, gg);
  EXPECT_NEAR(a(0, 1), 1.0, 1e-15);
  EXPECT_LE(a(0, 1), 1.0);
}

TEST(AsymmetricSimilarity, ZeroRowGivesZero) {
  const DistanceMatrix qg(Matrix::from_rows({{0, 0, 0}, {1, 2, 3}}), true);
  const DistanceMatrix gg(Matrix::from_rows({{0, 1, 1}, {0, 0, 0}, {1, 1, 0}}), true);
  const auto a = asymmetric_similarity(qg, gg);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(a(0, j), 0.0);
  EXPECT_EQ(a(1, 1), 0.0);
}

TEST(AsymmetricSimilarity, MatchesNormalizeThenMultiply) {
  datagen::Rng rng(52);
  const auto fq = oracle::random_features(rng, 3, 4);
  const auto fg = oracle::random_features(rng, 5, 4);
  const auto pair = build_distance_pair(fq, fg);
  const auto a = asymmetric_similarity(pair.query_gallery, pair.gallery_gallery);
  expect_near(a, oracle::similarity(oracle::to_dense(pair.query_gallery), oracle::to_dense(pair.gallery_gallery)), 1e-6);
}

TEST(AsymmetricSimilarity, ShapeMismatch) {
  EXPECT_THROW(asymmetric_similarity(DistanceMatrix(2, 3, true), DistanceMatrix(4, 4, true)), ConfigError);
  EXPECT_THROW(asymmetric_similarity(DistanceMatrix(2, 3, true), DistanceMatrix(3, 4, true)), ConfigError);
}

TEST(Optimize, DisabledReturnsRawDistances) {
  datagen::Rng rng(53);
  const auto fq = oracle::random_features(rng, 5, 4);
  const auto fg = oracle::random_features(rng, 9, 4);
  AroConfig cfg;
  cfg.enabled = false;
  EXPECT_EQ(optimize(fq, fg, cfg), build_distance_pair(fq, fg).query_gallery);
}

TEST(Optimize, MatchesStraightLineOracle) {
  datagen::Rng rng(54);
  const auto fq = oracle::random_features(rng, 5, 4);
  const auto fg = oracle::random_features(rng, 12, 4);
  for (double fill : {1.0, 0.0}) {
    for (std::size_t k2 : {1u, 3u, 20u}) {
      AroConfig cfg;
      cfg.k2 = k2;
      cfg.fill_value = fill;
      expect_near(optimize(fq, fg, cfg, 5), oracle::aro(oracle::to_dense(fq), oracle::to_dense(fg), k2, fill), 1e-6);
    }
  }
}

TEST(Optimize, SparseRouteAgreesWithDenseComposition) {
  datagen::Rng rng(55);
  const auto fq = oracle::random_features(rng, 7, 6);
  const auto fg = oracle::random_features(rng, 30, 6);
  AroConfig cfg;
  cfg.k2 = 6;
  const auto pair = build_distance_pair(fq, fg);
  const auto a = asymmetric_similarity(neighborhood_filter(pair.query_gallery, cfg.k2, cfg.fill_value),
                                       neighborhood_filter(pair.gallery_gallery, cfg.k2, cfg.fill_value));
  const auto dm = optimize(fq, fg, cfg);
  for (std::size_t i = 0; i < dm.rows(); ++i)
    for (std::size_t j = 0; j < dm.cols(); ++j) {
      EXPECT_NEAR(dm(i, j), pair.query_gallery(i, j) - a(i, j), 1e-12);
      const double sim = pair.query_gallery(i, j) - dm(i, j);
      EXPECT_GE(sim, -1e-12);
      EXPECT_LE(sim, 1.0 + 1e-12);
    }
}

TEST(Optimize, LargeK2DegeneratesToUnfilteredSimilarity) {
  datagen::Rng rng(56);
  const auto fq = oracle::random_features(rng, 4, 3);
  const auto fg = oracle::random_features(rng, 8, 3);
  AroConfig cfg;
  cfg.k2 = 8;
  const auto pair = build_distance_pair(fq, fg);
  const auto a = asymmetric_similarity(pair.query_gallery, pair.gallery_gallery);
  const auto dm = optimize(fq, fg, cfg);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 8; ++j) EXPECT_NEAR(dm(i, j), pair.query_gallery(i, j) - a(i, j), 1e-12);
}

TEST(Optimize, GalleryPermutationEquivariance) {
  datagen::Rng rng(57);
  const auto fq = oracle::random_features(rng, 4, 5);
  const auto fg = oracle::random_features(rng, 15, 5);
  std::vector<std::size_t> perm(15);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = 0; i < 15; ++i) std::swap(perm[i], perm[rng.below(15)]);
  FeatureMatrix pg(15, 5);
  for (std::size_t j = 0; j < 15; ++j)
    for (std::size_t t = 0; t < 5; ++t) pg(j, t) = fg(perm[j], t);
  AroConfig cfg;
  cfg.k2 = 4;
  const auto d = optimize(fq, fg, cfg);
  const auto dp = optimize(fq, pg, cfg);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 15; ++j) EXPECT_NEAR(dp(i, j), d(i, perm[j]), 1e-12);
}

TEST(Optimize, RowsDependOnlyOnTheirQuery) {
  datagen::Rng rng(58);
  const auto fq = oracle::random_features(rng, 6, 5);
  const auto fg = oracle::random_features(rng, 14, 5);
  AroConfig cfg;
  cfg.k2 = 5;
  const auto all = optimize(fq, fg, cfg);
  for (std::size_t i = 0; i < 6; ++i) {
    const auto single = optimize(FeatureMatrix(fq.slice_rows(i, 1)), fg, cfg);
    for (std::size_t j = 0; j < 14; ++j) EXPECT_NEAR(single(0, j), all(i, j), 1e-12);
  }
}

TEST(Config, Validation) {
  AroConfig cfg;
  EXPECT_EQ(cfg.fill_value, 1.0);
  EXPECT_NO_THROW(cfg.validate());
  cfg.k2 = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.fill_value = 0.5;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

}  // namespace
}  // namespace reidtk::aro
