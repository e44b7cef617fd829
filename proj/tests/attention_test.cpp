#include "fixtures.hpp"

#include "saliency_oracle.hpp"
#include "wayfind/attention.hpp"
#include "wayfind/perception.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace wayfind;
using namespace wayfind::testing;

TEST(Frustum, HorizontalPeakAndSigma) {
  const FrustumParams p;
  EXPECT_DOUBLE_EQ(frustum_horizontal_factor(0.0, p), 1.0);
  EXPECT_NEAR(frustum_horizontal_factor(7.0, p), std::exp(-0.5), 1e-9);
  EXPECT_NEAR(frustum_horizontal_factor(-7.0, p), std::exp(-0.5), 1e-9);
  EXPECT_NEAR(frustum_horizontal_factor(14.0, p), std::exp(-2.0), 1e-9);
}

TEST(Frustum, VerticalPeaksAtBetaMode) {
  const FrustumParams p;
  const double mode = 2.0 / 13.0;
  EXPECT_NEAR(frustum_vertical_factor(mode, p), 1.0, 1e-12);
  EXPECT_LT(frustum_vertical_factor(mode - 0.01, p), 1.0);
  EXPECT_LT(frustum_vertical_factor(mode + 0.01, p), 1.0);
  // Ratio to the mode from the Beta(3,12) density.
  const double y = 0.4;
  const double expected = std::pow(y / mode, 2) * std::pow((1 - y) / (1 - mode), 11);
  EXPECT_NEAR(frustum_vertical_factor(y, p), expected, 1e-12);
}

TEST(Frustum, MapIsSeparableAndOriented) {
  CameraConfig c;
  const FrustumParams top;
  FrustumParams bottom;
  bottom.vertical_origin = FrustumParams::VerticalOrigin::bottom;
  const AttentionMap a = frustum_map(c.raster_width, c.raster_height, c, top);
  const AttentionMap b = frustum_map(c.raster_width, c.raster_height, c, bottom);
  Eigen::Index row = 0, col = 0;
  a.maxCoeff(&row, &col);
  EXPECT_LT(row, c.raster_height / 2);
  b.maxCoeff(&row, &col);
  EXPECT_GT(row, c.raster_height / 2);
  EXPECT_TRUE(a.isApprox(b.colwise().reverse(), 1e-12));
  const double x = column_eccentricity_deg(100, c);
  EXPECT_NEAR(a(30, 100) / a(30, 79), frustum_horizontal_factor(x, top) /
                                          frustum_horizontal_factor(column_eccentricity_deg(79, c), top),
              1e-12);
}

TEST(Saliency, UniformRasterIsConstantFloor) {
  const ViewRaster r(16, 16, 0.42);
  const AttentionMap s = saliency_map(r);
  EXPECT_EQ(s.maxCoeff(), s.minCoeff());
  EXPECT_DOUBLE_EQ(s(0, 0), saliency::kFloor);
}

TEST(Saliency, LevelZeroRarityByHand) {
  const ViewRaster r = oracle::red_block_on_gray();
  // 16 red pixels out of 256: -log(16/256); gray: -log(240/256).
  for (auto ch : {saliency::Channel::luminance, saliency::Channel::red_green, saliency::Channel::blue_yellow}) {
    const auto plane = saliency::channel_plane(r, ch);
    const auto rarity = saliency::rarity_map(plane.values, plane.lo, plane.hi);
    EXPECT_NEAR(rarity(7, 7), std::log(16.0), 1e-12);
    EXPECT_NEAR(rarity(0, 0), std::log(256.0 / 240.0), 1e-12);
    const auto norm = saliency::normalize_rarity(rarity);
    EXPECT_DOUBLE_EQ(norm(7, 7), 1.0);
    EXPECT_NEAR(norm(0, 0), std::log(256.0 / 240.0) / std::log(16.0), 1e-12);
  }
}

TEST(Saliency, RedBlockMatchesOracleAndPeaksInside) {
  const ViewRaster r = oracle::red_block_on_gray();
  const AttentionMap s = saliency_map(r);
  const auto expected = oracle::saliency(r);
  EXPECT_LE((s - expected).abs().maxCoeff(), 1e-12);
  Eigen::Index row = 0, col = 0;
  s.maxCoeff(&row, &col);
  EXPECT_TRUE(row >= 6 && row < 10 && col >= 6 && col < 10) << row << "," << col;
}

TEST(Saliency, LevelZeroRarityIsPositionBlind) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Raster<double> values(12, 12);
  for (Eigen::Index i = 0; i < values.size(); ++i) values(i) = u(rng);
  Raster<double> shuffled = values;
  std::shuffle(shuffled.data(), shuffled.data() + shuffled.size(), rng);
  auto a = saliency::rarity_map(values, 0, 1);
  auto b = saliency::rarity_map(shuffled, 0, 1);
  std::sort(a.data(), a.data() + a.size());
  std::sort(b.data(), b.data() + b.size());
  EXPECT_TRUE((a == b).all());
}

TEST(Saliency, BinEdges) {
  EXPECT_EQ(saliency::bin_of(0.0, 0.0, 1.0), 0);
  EXPECT_EQ(saliency::bin_of(1.0, 0.0, 1.0), 31);
  EXPECT_EQ(saliency::bin_of(0.5, 0.0, 1.0), 16);
  EXPECT_EQ(saliency::bin_of(-1.0, -1.0, 1.0), 0);
  EXPECT_EQ(saliency::bin_of(-2.0, -1.0, 1.0), 0);
}

TEST(Saliency, PyramidHalvesAndKeepsConstants) {
  const Raster<double> c = Raster<double>::Constant(15, 16, 0.25);
  const auto d = saliency::pyramid_down(c);
  EXPECT_EQ(d.rows(), 8);
  EXPECT_EQ(d.cols(), 8);
  EXPECT_TRUE((d == 0.25).all());
}

TEST(Semantic, TableLookup) {
  Environment env = room(10, 10,
                         {make_sign(1, "f", Vec3(5, 5, 1.6), Vec2(-1, 0)),
                          make_sign(2, "f", Vec3(5, 7, 1.6), Vec2(-1, 0), 1, 0.5, ObjectClass::infrastructure)});
  SignMask mask{Raster<SignId>::Zero(2, 2), Raster<double>::Zero(2, 2)};
  mask.ids(0, 1) = 1;
  mask.ids(1, 0) = 2;
  const AttentionMap m = semantic_map(mask, env);
  EXPECT_DOUBLE_EQ(m(0, 0), 0.05);
  EXPECT_DOUBLE_EQ(m(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(m(1, 0), 0.6);
}

TEST(Fusion, ClosedFormValues) {
  const FusionWeights unit;
  EXPECT_DOUBLE_EQ(fuse_value(1.0, 1.0, 1.0, FusionWeights{2.0, 0.5, 3.0}), 1.0);
  EXPECT_EQ(fuse_value(0.0, 0.7, 0.3, unit), 0.0);
  EXPECT_NEAR(fuse_value(0.25, 1.0, 1.0, unit), std::cbrt(0.25), 1e-15);
  EXPECT_NEAR(fuse_value(0.25, 1.0, 1.0, unit), 0.6300, 5e-5);
  const AttentionMap sal = AttentionMap::Constant(1, 1, 0.25);
  const AttentionMap one = AttentionMap::Ones(1, 1);
  EXPECT_NEAR(fuse_attention_raw(sal, one, one, unit)(0, 0), std::cbrt(0.25), 1e-15);
  EXPECT_DOUBLE_EQ(fuse_attention(sal, one, one, unit)(0, 0), 1.0);
}

TEST(Fusion, ZeroWeightIgnoresChannel) {
  EXPECT_NEAR(fuse_value(0.0, 0.49, 0.49, FusionWeights{0.0, 1.0, 1.0}), 0.49, 1e-15);
}

TEST(Fusion, EqualWeightFastPathAgreesWithLogForm) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  AttentionMap a(10, 10), b(10, 10), c(10, 10);
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = u(rng), b(i) = u(rng), c(i) = u(rng);
  const auto fast = fuse_attention_raw(a, b, c, FusionWeights{2, 2, 2});
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(fast(i), fuse_value(a(i), b(i), c(i), FusionWeights{2, 2, 2}), 1e-14);
  }
}

TEST(Fusion, RejectsBadInput) {
  const AttentionMap a = AttentionMap::Ones(2, 2), b = AttentionMap::Ones(2, 3);
  EXPECT_THROW(fuse_attention(a, b, a, FusionWeights{}), std::invalid_argument);
  EXPECT_THROW(fuse_attention(a, a, a, FusionWeights{0, 0, 0}), std::invalid_argument);
}

TEST(Fusion, AllZeroFrameStaysZero) {
  const AttentionMap z = AttentionMap::Zero(3, 3);
  EXPECT_TRUE((fuse_attention(z, z, z, FusionWeights{}) == 0.0).all());
}

TEST(Scoring, SaturationInverse) {
  const double kappa = 192.0;
  EXPECT_NEAR(saturate_attention(kappa * std::log(20.0), kappa), 0.95, 1e-12);
  EXPECT_DOUBLE_EQ(saturate_attention(0.0, kappa), 0.0);
}

TEST(Scoring, SignsWithoutPixelsAreAbsentAndOrderIsByAttention) {
  SignMask mask{Raster<SignId>::Zero(2, 3), Raster<double>::Zero(2, 3)};
  mask.ids << 0, 4, 4, 9, 0, 0;
  AttentionMap fused(2, 3);
  fused << 1, 0.2, 0.3, 0.9, 1, 1;
  const auto scores = score_signs(fused, mask, 1.0);
  ASSERT_EQ(scores.size(), 2u);
  EXPECT_EQ(scores[0].sign, 9u);
  EXPECT_EQ(scores[0].pixels, 1);
  EXPECT_NEAR(scores[0].raw_sum, 0.9, 1e-15);
  EXPECT_EQ(scores[1].sign, 4u);
  EXPECT_NEAR(scores[1].raw_sum, 0.5, 1e-15);
  EXPECT_THROW(score_signs(fused, mask, 0.0), std::invalid_argument);
}

TEST(Scoring, CenteredSignOutranksEdgeSign) {
  // Two identical signs on an arc 6 m from the eye: one on axis, one near the FOV edge.
  const double d = 6.0;
  const double edge = 40.0 * 3.14159265358979 / 180.0;
  const Vec2 eye(2, 15);
  const Vec2 side = eye + d * Vec2(std::cos(edge), std::sin(edge));
  Environment env = room(20, 30,
                         {make_sign(1, "f", Vec3(eye.x() + d, eye.y(), 1.6), Vec2(-1, 0)),
                          make_sign(2, "f", Vec3(side.x(), side.y(), 1.6), (eye - side).normalized())});
  CameraConfig c;
  const CameraPose pose{"f", eye, 1.6, Vec2::UnitX()};
  const RenderedView v = render_view(env, pose, c);
  const FrustumParams fp;
  const AttentionMap fused = fuse_attention(saliency_map(v.raster), semantic_map(v.mask, env),
                                            frustum_map(c.raster_width, c.raster_height, c, fp), FusionWeights{});
  const auto scores = score_signs(fused, v.mask, default_kappa(c));
  ASSERT_EQ(scores.size(), 2u);
  EXPECT_EQ(scores[0].sign, 1u);
  // Brute-force pixel sums.
  double sum1 = 0, sum2 = 0;
  for (Eigen::Index i = 0; i < fused.size(); ++i) {
    if (v.mask.ids(i) == 1) sum1 += fused(i);
    if (v.mask.ids(i) == 2) sum2 += fused(i);
  }
  EXPECT_NEAR(scores[0].raw_sum, sum1, 1e-9);
  EXPECT_NEAR(scores[1].raw_sum, sum2, 1e-9);
  EXPECT_GT(sum1, sum2);
}
