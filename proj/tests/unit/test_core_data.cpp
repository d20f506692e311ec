#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "rwt/core_data.hpp"
#include "rwt/error.hpp"
#include "rwt/rng.hpp"

namespace rwt {
namespace {

RawSample full_row(double fill, double target) {
  RawSample s;
  for (Feature f : kAllFeatures) s.features[f] = fill;
  s.target = target;
  return s;
}

TEST(FeatureId, BijectionWithIndexAndName) {
  EXPECT_EQ(feature_name(Feature::kAirTemp7d), "air_temp7d");
  EXPECT_EQ(feature_name(Feature::kPrcpCum7), "prcp_cum7");
  EXPECT_EQ(feature_name(Feature::kPrcp), "prcp");
  for (int i = 1; i <= 10; ++i) {
    const Feature f = feature_from_index(i);
    EXPECT_EQ(feature_index(f), i);
    EXPECT_EQ(feature_from_name(feature_name(f)), f);
  }
  EXPECT_THROW(feature_from_index(11), Error);
  EXPECT_FALSE(feature_from_name("humidity").has_value());
}

TEST(Scaler, Table2FixedReturnsPublishedBounds) {
  const Scaler s = Scaler::fit({}, ScalerMode::kTable2Fixed);
  EXPECT_DOUBLE_EQ(s.bounds(Feature::kAirTemp).min, -6.91);
  EXPECT_DOUBLE_EQ(s.bounds(Feature::kAirTemp).max, 34.35);
  EXPECT_DOUBLE_EQ(s.bounds(Feature::kAirTemp7d).min, -2.81);
  EXPECT_DOUBLE_EQ(s.bounds(Feature::kDepthMeasure).max, 30.48);
  EXPECT_DOUBLE_EQ(s.bounds(Feature::kVolLake).max, 5.85e6);
  EXPECT_DOUBLE_EQ(s.bounds(Feature::kSurfAreaDepth).min, 235.67);
}

TEST(Scaler, FromDataConstantColumnIsDegenerate) {
  std::vector<RawSample> rows = {full_row(1.0, 5.0), full_row(1.0, 6.0)};
  try {
    Scaler::fit(rows, ScalerMode::kFromData);
    FAIL() << "expected DegenerateColumn";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateColumn);
  }
}

TEST(Scaler, FromDataUsesColumnMinMax) {
  std::vector<RawSample> rows = {full_row(0.0, 5.0), full_row(10.0, 6.0)};
  const Scaler s = Scaler::fit(rows, ScalerMode::kFromData);
  EXPECT_EQ(s.bounds(Feature::kAirTemp).min, 0.0);
  EXPECT_EQ(s.bounds(Feature::kAirTemp).max, 10.0);
  EXPECT_EQ(s.target_bounds().min, 5.0);
  EXPECT_EQ(s.target_bounds().max, 6.0);
}

TEST(Scaler, ApplyMapsBoundsAndMidpoint) {
  const Scaler s = Scaler::fit({}, ScalerMode::kTable2Fixed);
  EXPECT_DOUBLE_EQ(s.scale(Feature::kAirTemp, 34.35), 1.0);
  EXPECT_DOUBLE_EQ(s.scale(Feature::kAirTemp, -6.91), 0.0);
  // (13.72 + 6.91) / 41.26 is exactly one half.
  EXPECT_NEAR(s.scale(Feature::kAirTemp, 13.72), 0.5, 1e-12);
}

TEST(Scaler, ApplyFlagsOutOfRangeWithoutClipping) {
  const Scaler s = Scaler::fit({}, ScalerMode::kTable2Fixed);
  RawSample row;
  for (Feature f : kAllFeatures) {
    const Bounds b = published_bounds(f);
    row.features[f] = 0.5 * (b.min + b.max);
  }
  FeatureVector in = s.apply(row);
  EXPECT_FALSE(in.out_of_range);
  row.features[Feature::kAirTemp] = 40.0;
  FeatureVector out = s.apply(row);
  EXPECT_TRUE(out.out_of_range);
  EXPECT_TRUE(out.out_of_range_mask[feature_slot(Feature::kAirTemp)]);
  EXPECT_GT(out.x[feature_slot(Feature::kAirTemp)], 1.0);
}

TEST(Scaler, ApplyMissingFeature) {
  const Scaler s = Scaler::fit({}, ScalerMode::kTable2Fixed);
  RawSample row = full_row(1.0, 10.0);
  row.features[Feature::kWind].reset();
  try {
    s.apply(row);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingFeature);
  }
}

TEST(Scaler, InvertTarget) {
  const Scaler s({}, Bounds{0.0, 40.0});
  EXPECT_EQ(s.invert_target(0.0), 0.0);
  EXPECT_EQ(s.invert_target(1.0), 40.0);
  EXPECT_EQ(s.invert_target(0.5), 20.0);
}

TEST(Scaler, RoundTripAndMonotoneProperty) {
  const Scaler s = Scaler::fit({}, ScalerMode::kTable2Fixed);
  Rng rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    RawSample row;
    for (Feature f : kAllFeatures) {
      const Bounds b = published_bounds(f);
      row.features[f] = rng.uniform(b.min, b.max);
    }
    row.target = rng.uniform(0.0, 35.0);
    const FeatureVector v = s.apply(row);
    const RawRow back = s.invert(v);
    for (Feature f : kAllFeatures) {
      const double raw = *row.features[f];
      EXPECT_LE(std::abs(*back[f] - raw), 1e-12 * std::max(1.0, std::abs(raw)));
    }
    EXPECT_NEAR(s.invert_target(*v.y), *row.target, 1e-12 * 35.0);
    const Feature f = kAllFeatures[trial % kFeatureCount];
    const double a = *row.features[f];
    EXPECT_LT(s.scale(f, a), s.scale(f, a + 1e-3 * (published_bounds(f).max -
                                                     published_bounds(f).min)));
  }
}

TEST(ObservationProfile, ValidatesAndDetectsStratification) {
  const ProfileKey key{"R1", *parse_date("2021-06-01"), "S1"};
  EXPECT_THROW(ObservationProfile(key, {{0, 20}, {1, 19}, {2, 18}}), Error);
  try {
    ObservationProfile(key, {{0, 20}, {2, 19}, {1, 18}, {3, 17}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonMonotoneDepths);
  }
  ObservationProfile mixed(key, {{0, 20.0}, {1, 19.8}, {2, 19.5}, {3, 19.2}});
  EXPECT_FALSE(mixed.is_stratified());
  ObservationProfile layered(key, {{0, 25.0}, {1, 24.0}, {5, 18.0}, {9, 12.0}});
  EXPECT_TRUE(layered.is_stratified());
  const auto rows = layered.expand();
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(*rows[2].features[Feature::kDepthMeasure], 5.0);
  EXPECT_EQ(*rows[2].target, 18.0);
}

TEST(Dates, ParseAndFormat) {
  auto d = parse_date("2020-02-29");
  ASSERT_TRUE(d);
  EXPECT_EQ(format_date(*d), "2020-02-29");
  EXPECT_FALSE(parse_date("2021-02-29"));
  EXPECT_FALSE(parse_date("2021/02/01"));
}

}  // namespace
}  // namespace rwt
