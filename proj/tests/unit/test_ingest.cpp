#include <algorithm>
#include <set>
#include <sstream>

#include "gtest/gtest.h"
#include "rwt/error.hpp"
#include "rwt/ingest.hpp"
#include "rwt/rng.hpp"

namespace rwt {
namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIoError;
}

std::vector<ProfileKey> make_keys(std::size_t reservoirs, std::size_t per_reservoir) {
  std::vector<ProfileKey> keys;
  for (std::size_t r = 0; r < reservoirs; ++r) {
    for (std::size_t i = 0; i < per_reservoir; ++i) {
      keys.push_back({"R" + std::to_string(r),
                      Date{std::chrono::sys_days{std::chrono::year{2020} / 1 / 1} +
                           std::chrono::days{static_cast<int>(i)}},
                      "S1"});
    }
  }
  return keys;
}

TEST(ParseObservations, GroupsRowsIntoProfiles) {
  std::istringstream in(
      "reservoir_id,date,site_id,depth_m,temp_c\n"
      "R1,2021-07-01,S1,0,25\nR1,2021-07-01,S1,1,24\nR1,2021-07-01,S1,2,23\n"
      "R1,2021-07-01,S1,3,21\nR1,2021-07-01,S1,4,18\n");
  ProfileSet set = parse_observations(in);
  ASSERT_EQ(set.profiles.size(), 1u);
  EXPECT_EQ(set.profiles[0].samples().size(), 5u);
  EXPECT_TRUE(set.rejected.empty());
}

TEST(ParseObservations, ShortProfileIsRejectedWithReason) {
  std::istringstream in(
      "reservoir_id,date,site_id,depth_m,temp_c\n"
      "R1,2021-07-01,S1,0,25\nR1,2021-07-01,S1,1,24\nR1,2021-07-01,S1,2,23\n");
  ProfileSet set = parse_observations(in);
  EXPECT_TRUE(set.profiles.empty());
  ASSERT_EQ(set.rejected.size(), 1u);
  EXPECT_EQ(set.rejected[0].reason, ErrorCode::kShortProfile);
}

TEST(ParseObservations, NonMonotoneDepthsRejected) {
  std::istringstream in(
      "reservoir_id,date,site_id,depth_m,temp_c\n"
      "R1,2021-07-01,S1,0,25\nR1,2021-07-01,S1,2,24\nR1,2021-07-01,S1,1,23\n"
      "R1,2021-07-01,S1,3,21\n");
  ProfileSet set = parse_observations(in);
  ASSERT_EQ(set.rejected.size(), 1u);
  EXPECT_EQ(set.rejected[0].reason, ErrorCode::kNonMonotoneDepths);
}

TEST(ParseObservations, DuplicateRowAndBadHeaderAreSchemaMismatch) {
  EXPECT_EQ(code_of([] {
              std::istringstream in(
                  "reservoir_id,date,site_id,depth_m,temp_c\n"
                  "R1,2021-07-01,S1,0,25\nR1,2021-07-01,S1,0,24\n");
              parse_observations(in);
            }),
            ErrorCode::kSchemaMismatch);
  EXPECT_EQ(code_of([] {
              std::istringstream in("reservoir,date,site,depth,temp\n");
              parse_observations(in);
            }),
            ErrorCode::kSchemaMismatch);
  EXPECT_EQ(code_of([] {
              std::istringstream in(
                  "reservoir_id,date,site_id,depth_m,temp_c\nR1,07/01/2021,S1,0,25\n");
              parse_observations(in);
            }),
            ErrorCode::kSchemaMismatch);
}

class RollingFeaturesTest : public ::testing::Test {
 protected:
  void fill(const std::vector<double>& air, double prcp = 1.0) {
    for (std::size_t i = 0; i < air.size(); ++i) {
      DailyRecord r{air[i], prcp, 3.0, 1e6, 500.0};
      daily.add("R1", day(static_cast<int>(i)), r);
    }
  }
  static Date day(int offset) {
    return Date{std::chrono::sys_days{std::chrono::year{2021} / 6 / 1} +
                std::chrono::days{offset}};
  }
  DailySeries daily;
  Morphometry morph{1.0e6, 20.0};
};

TEST_F(RollingFeaturesTest, ConstantTemperatureMean) {
  fill(std::vector<double>(7, 20.0));
  RawRow row = rolling_features(daily, "R1", day(6), morph);
  EXPECT_DOUBLE_EQ(*row[Feature::kAirTemp7d], 20.0);
  EXPECT_DOUBLE_EQ(*row[Feature::kPrcpCum7], 7.0);
  EXPECT_DOUBLE_EQ(*row[Feature::kSurfAreaDepth], 5.0e4);
  EXPECT_FALSE(row[Feature::kDepthMeasure].has_value());
}

TEST_F(RollingFeaturesTest, ArithmeticMeanOfRamp) {
  fill({14, 16, 18, 20, 22, 24, 26});
  RawRow row = rolling_features(daily, "R1", day(6), morph);
  EXPECT_DOUBLE_EQ(*row[Feature::kAirTemp7d], 20.0);
  EXPECT_DOUBLE_EQ(*row[Feature::kAirTemp], 26.0);
}

TEST_F(RollingFeaturesTest, ExclusiveWindowEndsTheDayBefore) {
  fill({10, 14, 16, 18, 20, 22, 24, 26});
  RawRow row = rolling_features(daily, "R1", day(7), morph, WindowConvention::kExclusive);
  EXPECT_DOUBLE_EQ(*row[Feature::kAirTemp7d], (10 + 14 + 16 + 18 + 20 + 22 + 24) / 7.0);
  EXPECT_DOUBLE_EQ(*row[Feature::kAirTemp], 26.0);
}

TEST_F(RollingFeaturesTest, GapIsAnError) {
  fill({14, 16, 18, 20, 22, 24, 26});
  EXPECT_EQ(code_of([&] { rolling_features(daily, "R1", day(7), morph); }),
            ErrorCode::kWindowGap);
}

TEST_F(RollingFeaturesTest, ShiftEquivariance) {
  Rng rng(3);
  std::vector<double> temps(7);
  for (double& t : temps) t = rng.uniform(-5, 30);
  fill(temps);
  DailySeries shifted;
  for (int i = 0; i < 7; ++i) shifted.add("R1", day(i), {temps[i] + 3.5, 1.0, 3.0, 1e6, 500.0});
  const double base = *rolling_features(daily, "R1", day(6), morph)[Feature::kAirTemp7d];
  const double moved = *rolling_features(shifted, "R1", day(6), morph)[Feature::kAirTemp7d];
  EXPECT_NEAR(moved - base, 3.5, 1e-12);
}

TEST(SplitProfiles, SeventyThirtyAndDeterministic) {
  auto keys = make_keys(1, 10);
  SplitPlan a = split_profiles(keys, 0.7, 42);
  EXPECT_EQ(a.train.size(), 7u);
  EXPECT_EQ(a.test.size(), 3u);
  SplitPlan b = split_profiles(keys, 0.7, 42);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
}

TEST(SplitProfiles, TwoProfileReservoirSplitsOneOne) {
  auto keys = make_keys(1, 2);
  auto more = make_keys(3, 5);
  for (auto& k : more) k.reservoir_id += "x";
  keys.insert(keys.end(), more.begin(), more.end());
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SplitPlan plan = split_profiles(keys, 0.7, seed);
    const auto count = [](const std::vector<ProfileKey>& side) {
      return std::count_if(side.begin(), side.end(),
                           [](const ProfileKey& k) { return k.reservoir_id == "R0"; });
    };
    EXPECT_EQ(count(plan.train), 1);
    EXPECT_EQ(count(plan.test), 1);
  }
}

TEST(SplitProfiles, NeedsTwoKeys) {
  auto keys = make_keys(1, 1);
  EXPECT_EQ(code_of([&] { split_profiles(keys); }), ErrorCode::kTooFewProfiles);
}

TEST(KFold, BalancedPartition) {
  auto keys = make_keys(1, 11);
  auto folds = kfold(keys, 5, 1);
  std::vector<std::size_t> sizes;
  std::set<ProfileKey> seen;
  for (const auto& f : folds) {
    sizes.push_back(f.size());
    for (const auto& k : f) EXPECT_TRUE(seen.insert(k).second);
  }
  EXPECT_EQ(sizes, (std::vector<std::size_t>{3, 2, 2, 2, 2}));
  EXPECT_EQ(seen.size(), 11u);

  auto ten = kfold(make_keys(1, 10), 5, 1);
  for (const auto& f : ten) EXPECT_EQ(f.size(), 2u);
  EXPECT_EQ(code_of([] { kfold(make_keys(1, 4), 5, 1); }), ErrorCode::kTooFewProfiles);
}

TEST(Synth, NoiselessTargetMatchesPublishedFourInputForm) {
  SynthTruth truth;
  std::vector<double> x = {1, 0, 0, 0, 0.3, 0.3, 0.3, 0.3, 0.3, 0.3};
  EXPECT_NEAR(truth.evaluate(x), 0.82 + 0.012 / -0.106 + 0.235, 1e-15);
  EXPECT_NEAR(truth.evaluate(x), 0.941792, 1e-6);
}

TEST(Synth, DeterministicAndConsistent) {
  SynthConfig cfg;
  cfg.n_profiles = 12;
  cfg.depths_per_profile = 5;
  cfg.noise_sigma = 0.0;
  SynthData a = synth_generate(cfg);
  SynthData b = synth_generate(cfg);
  EXPECT_EQ(a.table.x.data, b.table.x.data);
  EXPECT_EQ(a.table.y, b.table.y);
  std::ostringstream sa, sb;
  write_observations(sa, a.profiles);
  write_observations(sb, b.profiles);
  EXPECT_EQ(sa.str(), sb.str());

  ASSERT_EQ(a.table.size(), 60u);
  for (std::size_t r = 0; r < a.table.size(); ++r) {
    EXPECT_DOUBLE_EQ(a.table.y[r], a.truth.evaluate(a.table.x.row(r)));
  }
}

TEST(Synth, CsvRoundTripReproducesFeatures) {
  SynthConfig cfg;
  cfg.n_profiles = 8;
  cfg.depths_per_profile = 4;
  cfg.noise_sigma = 0.01;
  SynthData data = synth_generate(cfg);
  std::stringstream obs, daily, morph;
  write_observations(obs, data.profiles);
  write_daily(daily, data.daily);
  write_morphometry(morph, data.morphometry);

  ProfileSet set = parse_observations(obs);
  attach_covariates(set, parse_daily(daily), parse_morphometry(morph));
  ASSERT_TRUE(set.rejected.empty());
  const Scaler scaler = Scaler::fit({}, ScalerMode::kTable2Fixed);
  FeatureTable rebuilt = build_feature_table(set, scaler);
  ASSERT_EQ(rebuilt.size(), data.table.size());
  // Compare per profile key since row order follows sorted keys.
  for (std::size_t r = 0; r < rebuilt.size(); ++r) {
    auto rows = data.table.rows_for(std::span(&rebuilt.row_keys[r], 1));
    bool matched = false;
    for (std::size_t cand : rows) {
      bool same = true;
      for (std::size_t c = 0; c < kFeatureCount; ++c) {
        same = same && std::abs(rebuilt.x(r, c) - data.table.x(cand, c)) < 1e-9;
      }
      if (same && std::abs(rebuilt.y[r] - data.table.y[cand]) < 1e-9) matched = true;
    }
    EXPECT_TRUE(matched) << "row " << r;
  }
}

TEST(SplitProfiles, NoLeakageProperty) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    auto keys = make_keys(1 + rng.below(6), 1 + rng.below(6));
    if (keys.size() < 2) continue;
    SplitPlan plan = split_profiles(keys, rng.uniform(0.1, 0.9), rng.next());
    std::set<ProfileKey> train(plan.train.begin(), plan.train.end());
    for (const auto& k : plan.test) EXPECT_EQ(train.count(k), 0u);
    EXPECT_EQ(plan.train.size() + plan.test.size(), keys.size());
  }
}

}  // namespace
}  // namespace rwt
