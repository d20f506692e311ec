#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rwt/core_data.hpp"
#include "rwt/error.hpp"

namespace rwt {

inline constexpr std::string_view kObservationsHeader =
    "reservoir_id,date,site_id,depth_m,temp_c";
inline constexpr std::string_view kDailyHeader =
    "reservoir_id,date,air_temp_c,prcp_mm,wind_ms,vol_lake,inflow_lake";
inline constexpr std::string_view kMorphometryHeader =
    "reservoir_id,surface_area_m2,max_depth_m";

struct Rejection {
  ProfileKey key;
  ErrorCode reason;
  std::string message;
};

struct ProfileSet {
  std::vector<ObservationProfile> profiles;  // sorted by key, keys unique
  std::string provenance;
  std::vector<Rejection> rejected;

  std::vector<ProfileKey> keys() const;
};

// Reads the observations CSV. Rows are grouped into profiles by
// (reservoir_id, date, site_id); depths must be listed in increasing order.
// Short or non-monotone profiles are moved to `rejected` with their reason.
// Header mismatch, malformed rows and duplicate (key, depth) rows throw
// Error(kSchemaMismatch).
ProfileSet parse_observations(std::istream& in, int schema_version = 1);

struct DailyRecord {
  double air_temp_c = 0.0;
  double prcp_mm = 0.0;
  double wind_ms = 0.0;
  double vol_lake = 0.0;
  double inflow_lake = 0.0;
};

class DailySeries {
 public:
  // Throws Error(kSchemaMismatch) on a duplicate (reservoir, date).
  void add(const std::string& reservoir_id, const Date& date,
           const DailyRecord& record);
  const DailyRecord* find(const std::string& reservoir_id, const Date& date) const;
  bool empty() const { return series_.empty(); }

  // Rows in (reservoir, date) order.
  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (const auto& [reservoir, days] : series_) {
      for (const auto& [day, record] : days) {
        fn(reservoir, Date{day}, record);
      }
    }
  }

 private:
  std::map<std::string, std::map<std::chrono::sys_days, DailyRecord>> series_;
};

DailySeries parse_daily(std::istream& in);

struct Morphometry {
  double surface_area_m2 = 0.0;
  double max_depth_m = 1.0;
};

using MorphometryTable = std::map<std::string, Morphometry>;

MorphometryTable parse_morphometry(std::istream& in);

// Whether the 7-day antecedent window ends on the measurement day
// (kInclusive, default) or on the day before it.
enum class WindowConvention { kInclusive, kExclusive };

inline constexpr int kWindowDays = 7;

// Builds the covariate part of a raw feature row (everything except depth)
// for one reservoir and date. Throws Error(kWindowGap) when a window day is
// missing and Error(kNotFound) when the reservoir has no morphometry.
RawRow rolling_features(const DailySeries& daily, const std::string& reservoir_id,
                        const Date& date, const Morphometry& morphometry,
                        WindowConvention convention = WindowConvention::kInclusive);

// Fills every profile's covariates; profiles whose window cannot be built
// move to `rejected`.
void attach_covariates(ProfileSet& set, const DailySeries& daily,
                       const MorphometryTable& morphometry,
                       WindowConvention convention = WindowConvention::kInclusive);

// One normalized row per depth sample.
struct FeatureTable {
  Matrix x;                         // rows x 10, canonical feature order
  std::vector<double> y;            // normalized target
  std::vector<ProfileKey> row_keys;  // profile of each row
  std::vector<bool> out_of_range;    // per row

  std::size_t size() const { return y.size(); }
  // Indices of rows whose profile key is in `keys`, in row order.
  std::vector<std::size_t> rows_for(std::span<const ProfileKey> keys) const;
  FeatureTable subset(std::span<const std::size_t> rows) const;
};

FeatureTable build_feature_table(const ProfileSet& set, const Scaler& scaler);
std::vector<RawSample> raw_samples(const ProfileSet& set);

struct SplitPlan {
  std::vector<ProfileKey> train;  // sorted
  std::vector<ProfileKey> test;   // sorted
  std::uint64_t seed = 42;
  double ratio = 0.7;
};

// Profile-level split. Reservoirs with exactly two profiles send one to each
// side (chosen by the generator) and are removed from the pool; the remaining
// keys are sorted, shuffled with Rng(seed) (Fisher-Yates) and the first
// ceil(ratio * n) go to train. Requires at least two keys.
SplitPlan split_profiles(std::span<const ProfileKey> keys, double ratio = 0.7,
                         std::uint64_t seed = 42);

// Partitions keys into k folds whose sizes differ by at most one: keys are
// sorted, shuffled, then dealt in contiguous blocks with the first (n mod k)
// folds one larger. Throws Error(kTooFewProfiles) when keys.size() < k.
std::vector<std::vector<ProfileKey>> kfold(std::span<const ProfileKey> keys,
                                           std::size_t k = 5, std::uint64_t seed = 42);

// Ground truth used by the synthetic generator: the published four-input
// simple-set equation in normalized space,
//   y = 0.82 x1 + 0.012 / (-0.2 x2 - 0.106) - 0.15 x3 - 0.10 x4 + 0.235.
struct SynthTruth {
  double x1 = 0.82;
  double rational_numerator = 0.012;
  double rational_slope = -0.2;
  double rational_offset = -0.106;
  double x3 = -0.15;
  double x4 = -0.10;
  double intercept = 0.235;

  double evaluate(std::span<const double> x) const;
};

struct SynthConfig {
  std::size_t n_profiles = 100;
  std::size_t depths_per_profile = 8;
  double noise_sigma = 0.0;
  std::uint64_t seed = 42;
  std::size_t n_reservoirs = 10;
};

struct SynthData {
  ProfileSet profiles;        // raw units, covariates attached
  DailySeries daily;          // carrier series reproducing the covariates
  MorphometryTable morphometry;
  SynthTruth truth;
  FeatureTable table;         // exact normalized draws and targets
};

// Draws every predictor uniformly on [0, 1]; all but depth are constant per
// profile and surf_area_depth is constant per reservoir. Targets follow
// SynthTruth plus Normal(0, sigma) noise, and raw values are recovered through
// the published bounds (Scaler::fit(..., kTable2Fixed)).
SynthData synth_generate(const SynthConfig& config);

void write_observations(std::ostream& out, const ProfileSet& set);
void write_daily(std::ostream& out, const DailySeries& daily);
void write_morphometry(std::ostream& out, const MorphometryTable& table);

}  // namespace rwt
