#include "rwt/core_data.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <limits>

#include "rwt/error.hpp"
#include "rwt/regressor.hpp"

namespace rwt {

namespace {

constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "air_temp7d", "air_temp",        "depth_measure", "wind_avg7",
    "vol_lake",   "wind",            "surf_area_depth", "inflow_lake",
    "prcp_cum7",  "prcp"};

// Published predictor ranges in canonical order.
constexpr std::array<Bounds, kFeatureCount> kPublishedBounds = {{
    {-2.81, 34.54},     // air_temp7d, degC
    {-6.91, 34.35},     // air_temp, degC
    {0.0, 30.48},       // depth_measure, m
    {2.41, 6.61},       // wind_avg7, m/s
    {31956.0, 5.85e6},  // vol_lake, acre-feet
    {1.30, 8.72},       // wind, m/s
    {235.67, 14775.0},  // surf_area_depth, m^2/m
    {0.0, 131300.0},    // inflow_lake, CFS (24-h average)
    {0.0, 33.27},       // prcp_cum7, mm
    {0.0, 67.20},       // prcp, mm
}};

bool parse_int(std::string_view text, int& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDegenerateColumn: return "DegenerateColumn";
    case ErrorCode::kMissingFeature: return "MissingFeature";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kNonMonotoneDepths: return "NonMonotoneDepths";
    case ErrorCode::kShortProfile: return "ShortProfile";
    case ErrorCode::kWindowGap: return "WindowGap";
    case ErrorCode::kTooFewProfiles: return "TooFewProfiles";
    case ErrorCode::kEmptyData: return "EmptyData";
    case ErrorCode::kInvalidParam: return "InvalidParam";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kInvalidLayout: return "InvalidLayout";
    case ErrorCode::kDiverged: return "Diverged";
    case ErrorCode::kEmptyBackground: return "EmptyBackground";
    case ErrorCode::kTooManyFeatures: return "TooManyFeatures";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kUnknownFunction: return "UnknownFunction";
    case ErrorCode::kBadVariableIndex: return "BadVariableIndex";
    case ErrorCode::kPoleError: return "PoleError";
    case ErrorCode::kUnboundVariable: return "UnboundVariable";
    case ErrorCode::kDomainError: return "DomainError";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::kFileNotFound: return "FileNotFound";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kUsageError: return "UsageError";
    case ErrorCode::kConstantTruth: return "ConstantTruth";
  }
  return "Unknown";
}

std::string_view feature_name(Feature f) { return kFeatureNames[feature_slot(f)]; }

Feature feature_from_index(int index) {
  if (index < 1 || index > static_cast<int>(kFeatureCount)) {
    throw Error(ErrorCode::kInvalidParam,
                "feature index out of range: " + std::to_string(index));
  }
  return static_cast<Feature>(index);
}

std::optional<Feature> feature_from_name(std::string_view name) {
  for (Feature f : kAllFeatures) {
    if (feature_name(f) == name) return f;
  }
  return std::nullopt;
}

std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  int y = 0, m = 0, d = 0;
  if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m) ||
      !parse_int(text.substr(8, 2), d)) {
    return std::nullopt;
  }
  Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
            std::chrono::day{static_cast<unsigned>(d)}};
  if (!date.ok()) return std::nullopt;
  return date;
}

std::string format_date(const Date& date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()),
                static_cast<unsigned>(date.day()));
  return buf;
}

Matrix Matrix::select_columns(std::span<const std::size_t> columns) const {
  Matrix out(rows, columns.size());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      out(r, c) = (*this)(r, columns[c]);
    }
  }
  return out;
}

Matrix Matrix::select_rows(std::span<const std::size_t> indices) const {
  Matrix out(indices.size(), cols);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(indices[r] * cols), cols,
                out.data.begin() + static_cast<std::ptrdiff_t>(r * cols));
  }
  return out;
}

Bounds published_bounds(Feature f) { return kPublishedBounds[feature_slot(f)]; }

Scaler::Scaler(std::array<Bounds, kFeatureCount> features, Bounds target)
    : features_(features), target_(target) {
  for (Feature f : kAllFeatures) {
    const Bounds& b = features_[feature_slot(f)];
    if (!(b.max > b.min)) {
      throw Error(ErrorCode::kDegenerateColumn,
                  "scaler bounds must satisfy max > min for " +
                      std::string(feature_name(f)));
    }
  }
  if (!(target_.max > target_.min)) {
    throw Error(ErrorCode::kDegenerateColumn,
                "scaler target bounds must satisfy max > min");
  }
}

Scaler Scaler::fit(std::span<const RawSample> rows, ScalerMode mode) {
  if (mode == ScalerMode::kTable2Fixed) {
    return Scaler(kPublishedBounds, kDefaultTargetBounds);
  }
  if (rows.empty()) {
    throw Error(ErrorCode::kEmptyData, "cannot fit a scaler on zero rows");
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::array<Bounds, kFeatureCount> features;
  features.fill(Bounds{kInf, -kInf});
  Bounds target{kInf, -kInf};
  for (const RawSample& row : rows) {
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      if (const auto& v = row.features.values[i]) {
        features[i].min = std::min(features[i].min, *v);
        features[i].max = std::max(features[i].max, *v);
      }
    }
    if (row.target) {
      target.min = std::min(target.min, *row.target);
      target.max = std::max(target.max, *row.target);
    }
  }
  for (Feature f : kAllFeatures) {
    const Bounds& b = features[feature_slot(f)];
    if (!(b.max > b.min)) {
      throw Error(ErrorCode::kDegenerateColumn,
                  "column " + std::string(feature_name(f)) +
                      " is constant or absent; cannot min-max scale");
    }
  }
  if (!(target.max > target.min)) {
    throw Error(ErrorCode::kDegenerateColumn,
                "target column is constant or absent; cannot min-max scale");
  }
  return Scaler(features, target);
}

double Scaler::scale(Feature f, double raw) const {
  const Bounds& b = bounds(f);
  return (raw - b.min) / (b.max - b.min);
}

double Scaler::unscale(Feature f, double normalized) const {
  const Bounds& b = bounds(f);
  return normalized * (b.max - b.min) + b.min;
}

double Scaler::scale_target(double celsius) const {
  return (celsius - target_.min) / (target_.max - target_.min);
}

double Scaler::invert_target(double normalized) const {
  return normalized * (target_.max - target_.min) + target_.min;
}

FeatureVector Scaler::apply(const RawSample& sample) const {
  FeatureVector out;
  for (Feature f : kAllFeatures) {
    const auto& raw = sample.features[f];
    if (!raw) {
      throw Error(ErrorCode::kMissingFeature,
                  "missing feature " + std::string(feature_name(f)));
    }
    const std::size_t slot = feature_slot(f);
    out.x[slot] = scale(f, *raw);
    const Bounds& b = bounds(f);
    if (*raw < b.min || *raw > b.max) {
      out.out_of_range_mask[slot] = true;
      out.out_of_range = true;
    }
  }
  if (sample.target) out.y = scale_target(*sample.target);
  return out;
}

RawRow Scaler::invert(const FeatureVector& v) const {
  RawRow row;
  for (Feature f : kAllFeatures) row[f] = unscale(f, v.x[feature_slot(f)]);
  return row;
}

std::string to_string(const ProfileKey& key) {
  return key.reservoir_id + "/" + format_date(key.date) + "/" + key.site_id;
}

ObservationProfile::ObservationProfile(ProfileKey key,
                                       std::vector<DepthSample> samples,
                                       RawRow covariates)
    : key_(std::move(key)), samples_(std::move(samples)) {
  if (samples_.size() < kMinSamples) {
    throw Error(ErrorCode::kShortProfile,
                "profile " + to_string(key_) + " has " +
                    std::to_string(samples_.size()) + " samples; at least " +
                    std::to_string(kMinSamples) + " required");
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (samples_[i].depth_m < 0.0) {
      throw Error(ErrorCode::kNonMonotoneDepths,
                  "profile " + to_string(key_) + " has a negative depth");
    }
    if (i > 0 && !(samples_[i].depth_m > samples_[i - 1].depth_m)) {
      throw Error(ErrorCode::kNonMonotoneDepths,
                  "profile " + to_string(key_) +
                      " depths are not strictly increasing");
    }
  }
  set_covariates(covariates);
}

void ObservationProfile::set_covariates(const RawRow& covariates) {
  covariates_ = covariates;
  covariates_[Feature::kDepthMeasure].reset();
}

bool ObservationProfile::is_stratified() const {
  auto [lo, hi] = std::minmax_element(
      samples_.begin(), samples_.end(),
      [](const DepthSample& a, const DepthSample& b) { return a.temp_c < b.temp_c; });
  return hi->temp_c - lo->temp_c > kStratificationDeltaC;
}

std::vector<RawSample> ObservationProfile::expand() const {
  std::vector<RawSample> rows;
  rows.reserve(samples_.size());
  for (const DepthSample& s : samples_) {
    RawSample row{covariates_, s.temp_c};
    row.features[Feature::kDepthMeasure] = s.depth_m;
    rows.push_back(row);
  }
  return rows;
}

std::vector<double> Regressor::predict_rows(const Matrix& x) const {
  std::vector<double> out(x.rows);
  for (std::size_t r = 0; r < x.rows; ++r) out[r] = predict(x.row(r));
  return out;
}

bool Regressor::hybrid_predictions(std::span<const double>, std::span<const double>,
                                   std::span<double>) const {
  return false;
}

void check_dimension(std::size_t expected, std::size_t actual) {
  if (expected != actual) {
    throw Error(ErrorCode::kDimensionMismatch,
                "expected " + std::to_string(expected) + " inputs, got " +
                    std::to_string(actual));
  }
}

}  // namespace rwt
