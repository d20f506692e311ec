#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rwt {

inline constexpr std::size_t kFeatureCount = 10;

// Canonical predictor order. The enumerator value is the 1-based index used
// in expressions (x1..x10).
enum class Feature : int {
  kAirTemp7d = 1,
  kAirTemp = 2,
  kDepthMeasure = 3,
  kWindAvg7 = 4,
  kVolLake = 5,
  kWind = 6,
  kSurfAreaDepth = 7,
  kInflowLake = 8,
  kPrcpCum7 = 9,
  kPrcp = 10,
};

inline constexpr std::array<Feature, kFeatureCount> kAllFeatures = {
    Feature::kAirTemp7d, Feature::kAirTemp,       Feature::kDepthMeasure,
    Feature::kWindAvg7,  Feature::kVolLake,       Feature::kWind,
    Feature::kSurfAreaDepth, Feature::kInflowLake, Feature::kPrcpCum7,
    Feature::kPrcp};

constexpr int feature_index(Feature f) { return static_cast<int>(f); }
constexpr std::size_t feature_slot(Feature f) {
  return static_cast<std::size_t>(f) - 1;
}

std::string_view feature_name(Feature f);
// Throws Error(kInvalidParam) for indices outside 1..10.
Feature feature_from_index(int index);
std::optional<Feature> feature_from_name(std::string_view name);

using Date = std::chrono::year_month_day;

// Strict ISO-8601 calendar date (YYYY-MM-DD).
std::optional<Date> parse_date(std::string_view text);
std::string format_date(const Date& date);

// Dense row-major matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data[r * cols + c];
  }
  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const {
    return {data.data() + r * cols, cols};
  }

  // Copies the given columns (0-based) into a new matrix.
  Matrix select_columns(std::span<const std::size_t> columns) const;
  Matrix select_rows(std::span<const std::size_t> indices) const;
};

// Raw (unscaled) predictor values; absent entries are std::nullopt.
struct RawRow {
  std::array<std::optional<double>, kFeatureCount> values{};

  std::optional<double>& operator[](Feature f) { return values[feature_slot(f)]; }
  const std::optional<double>& operator[](Feature f) const {
    return values[feature_slot(f)];
  }
};

struct RawSample {
  RawRow features;
  std::optional<double> target;  // water temperature, degrees C
};

struct Bounds {
  double min = 0.0;
  double max = 1.0;
};

enum class ScalerMode { kFromData, kTable2Fixed };

// Published predictor ranges, in raw units.
Bounds published_bounds(Feature f);
// Target range used with the published predictor ranges. Not published with
// them; see README.
inline constexpr Bounds kDefaultTargetBounds{0.0, 35.0};

struct FeatureVector {
  std::array<double, kFeatureCount> x{};
  std::optional<double> y;
  // Set when any raw input fell outside its scaler bounds.
  bool out_of_range = false;
  std::array<bool, kFeatureCount> out_of_range_mask{};
};

class Scaler {
 public:
  Scaler(std::array<Bounds, kFeatureCount> features, Bounds target);

  // kTable2Fixed ignores `rows`. kFromData requires nonempty rows and a
  // non-constant column for every feature and for the target; otherwise
  // throws Error(kDegenerateColumn).
  static Scaler fit(std::span<const RawSample> rows, ScalerMode mode);

  const Bounds& bounds(Feature f) const { return features_[feature_slot(f)]; }
  const Bounds& target_bounds() const { return target_; }

  double scale(Feature f, double raw) const;
  double unscale(Feature f, double normalized) const;
  double scale_target(double celsius) const;
  double invert_target(double normalized) const;

  // Scales every feature; throws Error(kMissingFeature) if any is absent.
  FeatureVector apply(const RawSample& sample) const;
  // Inverse of apply for the feature part.
  RawRow invert(const FeatureVector& v) const;

 private:
  std::array<Bounds, kFeatureCount> features_;
  Bounds target_;
};

struct DepthSample {
  double depth_m = 0.0;
  double temp_c = 0.0;
};

struct ProfileKey {
  std::string reservoir_id;
  Date date;
  std::string site_id;

  auto operator<=>(const ProfileKey&) const = default;
  bool operator==(const ProfileKey&) const = default;
};

std::string to_string(const ProfileKey& key);

// One dated vertical temperature profile. Construction validates the sample
// count (>= 4) and strictly increasing depths.
class ObservationProfile {
 public:
  static inline constexpr std::size_t kMinSamples = 4;
  static inline constexpr double kStratificationDeltaC = 1.0;

  ObservationProfile(ProfileKey key, std::vector<DepthSample> samples,
                     RawRow covariates = {});

  const ProfileKey& key() const { return key_; }
  const std::vector<DepthSample>& samples() const { return samples_; }
  const RawRow& covariates() const { return covariates_; }
  void set_covariates(const RawRow& covariates);

  bool is_stratified() const;

  // One raw sample per depth: covariates with depth_measure filled in.
  std::vector<RawSample> expand() const;

 private:
  ProfileKey key_;
  std::vector<DepthSample> samples_;
  RawRow covariates_;
};

}  // namespace rwt
