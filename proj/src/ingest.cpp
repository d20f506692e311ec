#include "rwt/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>

#include "rwt/rng.hpp"
#include "rwt/text.hpp"

namespace rwt {

namespace {

using std::chrono::days;
using std::chrono::sys_days;

class CsvReader {
 public:
  CsvReader(std::istream& in, std::string_view expected_header, std::string name)
      : in_(in), name_(std::move(name)) {
    std::string header;
    if (!std::getline(in_, header)) {
      throw Error(ErrorCode::kSchemaMismatch, name_ + ": empty input");
    }
    // Tolerate a UTF-8 byte order mark.
    if (header.rfind("\xEF\xBB\xBF", 0) == 0) header.erase(0, 3);
    if (trim(header) != expected_header) {
      throw Error(ErrorCode::kSchemaMismatch,
                  name_ + ": expected header '" + std::string(expected_header) +
                      "', got '" + std::string(trim(header)) + "'");
    }
    columns_ = split(expected_header).size();
  }

  // Next non-blank row, already split; false at end of input.
  bool next(std::vector<std::string_view>& fields) {
    while (std::getline(in_, line_)) {
      ++line_number_;
      if (trim(line_).empty()) continue;
      fields = split(line_);
      if (fields.size() != columns_) fail("expected " + std::to_string(columns_) + " fields");
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::kSchemaMismatch,
                name_ + " line " + std::to_string(line_number_ + 1) + ": " + what);
  }

  double number(std::string_view field, std::string_view column) const {
    auto v = parse_double(field);
    if (!v || !std::isfinite(*v)) fail("bad number in " + std::string(column));
    return *v;
  }

  Date date(std::string_view field) const {
    auto d = parse_date(field);
    if (!d) fail("bad ISO-8601 date '" + std::string(field) + "'");
    return *d;
  }

 private:
  std::istream& in_;
  std::string name_;
  std::string line_;
  std::size_t columns_ = 0;
  std::size_t line_number_ = 0;
};

}  // namespace

std::vector<ProfileKey> ProfileSet::keys() const {
  std::vector<ProfileKey> out;
  out.reserve(profiles.size());
  for (const auto& p : profiles) out.push_back(p.key());
  return out;
}

ProfileSet parse_observations(std::istream& in, int schema_version) {
  if (schema_version != 1) {
    throw Error(ErrorCode::kSchemaMismatch,
                "unsupported observations schema version " +
                    std::to_string(schema_version));
  }
  CsvReader reader(in, kObservationsHeader, "observations");
  std::map<ProfileKey, std::vector<DepthSample>> groups;
  std::set<std::pair<ProfileKey, double>> seen;
  std::vector<std::string_view> f;
  while (reader.next(f)) {
    if (f[0].empty() || f[2].empty()) reader.fail("empty reservoir_id or site_id");
    ProfileKey key{std::string(f[0]), reader.date(f[1]), std::string(f[2])};
    const double depth = reader.number(f[3], "depth_m");
    const double temp = reader.number(f[4], "temp_c");
    if (!seen.emplace(key, depth).second) {
      reader.fail("duplicate row for profile " + to_string(key) + " at depth " +
                  format_double(depth));
    }
    groups[key].push_back({depth, temp});
  }
  ProfileSet set;
  set.provenance = "observations csv (schema v1)";
  for (auto& [key, samples] : groups) {
    try {
      set.profiles.emplace_back(key, std::move(samples));
    } catch (const Error& e) {
      set.rejected.push_back({key, e.code(), e.what()});
    }
  }
  return set;
}

void DailySeries::add(const std::string& reservoir_id, const Date& date,
                      const DailyRecord& record) {
  if (!series_[reservoir_id].emplace(sys_days{date}, record).second) {
    throw Error(ErrorCode::kSchemaMismatch, "duplicate daily row for " + reservoir_id +
                                                " on " + format_date(date));
  }
}

const DailyRecord* DailySeries::find(const std::string& reservoir_id,
                                     const Date& date) const {
  auto r = series_.find(reservoir_id);
  if (r == series_.end()) return nullptr;
  auto d = r->second.find(sys_days{date});
  return d == r->second.end() ? nullptr : &d->second;
}

DailySeries parse_daily(std::istream& in) {
  CsvReader reader(in, kDailyHeader, "daily covariates");
  DailySeries series;
  std::vector<std::string_view> f;
  while (reader.next(f)) {
    DailyRecord rec{reader.number(f[2], "air_temp_c"), reader.number(f[3], "prcp_mm"),
                    reader.number(f[4], "wind_ms"), reader.number(f[5], "vol_lake"),
                    reader.number(f[6], "inflow_lake")};
    series.add(std::string(f[0]), reader.date(f[1]), rec);
  }
  return series;
}

MorphometryTable parse_morphometry(std::istream& in) {
  CsvReader reader(in, kMorphometryHeader, "morphometry");
  MorphometryTable table;
  std::vector<std::string_view> f;
  while (reader.next(f)) {
    Morphometry m{reader.number(f[1], "surface_area_m2"),
                  reader.number(f[2], "max_depth_m")};
    if (!(m.max_depth_m > 0.0)) reader.fail("max_depth_m must be positive");
    if (!table.emplace(std::string(f[0]), m).second) {
      reader.fail("duplicate reservoir " + std::string(f[0]));
    }
  }
  return table;
}

RawRow rolling_features(const DailySeries& daily, const std::string& reservoir_id,
                        const Date& date, const Morphometry& morphometry,
                        WindowConvention convention) {
  const sys_days end =
      sys_days{date} - days{convention == WindowConvention::kExclusive ? 1 : 0};
  double air_sum = 0.0, wind_sum = 0.0, prcp_sum = 0.0;
  for (int back = kWindowDays - 1; back >= 0; --back) {
    const Date day{end - days{back}};
    const DailyRecord* rec = daily.find(reservoir_id, day);
    if (rec == nullptr) {
      throw Error(ErrorCode::kWindowGap, "no daily covariates for " + reservoir_id +
                                             " on " + format_date(day));
    }
    air_sum += rec->air_temp_c;
    wind_sum += rec->wind_ms;
    prcp_sum += rec->prcp_mm;
  }
  const DailyRecord* today = daily.find(reservoir_id, date);
  if (today == nullptr) {
    throw Error(ErrorCode::kWindowGap, "no same-day covariates for " + reservoir_id +
                                           " on " + format_date(date));
  }
  RawRow row;
  row[Feature::kAirTemp7d] = air_sum / kWindowDays;
  row[Feature::kAirTemp] = today->air_temp_c;
  row[Feature::kWindAvg7] = wind_sum / kWindowDays;
  row[Feature::kVolLake] = today->vol_lake;
  row[Feature::kWind] = today->wind_ms;
  row[Feature::kSurfAreaDepth] = morphometry.surface_area_m2 / morphometry.max_depth_m;
  row[Feature::kInflowLake] = today->inflow_lake;
  row[Feature::kPrcpCum7] = prcp_sum;
  row[Feature::kPrcp] = today->prcp_mm;
  return row;
}

void attach_covariates(ProfileSet& set, const DailySeries& daily,
                       const MorphometryTable& morphometry,
                       WindowConvention convention) {
  std::vector<ObservationProfile> kept;
  kept.reserve(set.profiles.size());
  for (auto& profile : set.profiles) {
    const ProfileKey& key = profile.key();
    auto m = morphometry.find(key.reservoir_id);
    if (m == morphometry.end()) {
      set.rejected.push_back({key, ErrorCode::kNotFound,
                              "no morphometry for reservoir " + key.reservoir_id});
      continue;
    }
    try {
      profile.set_covariates(
          rolling_features(daily, key.reservoir_id, key.date, m->second, convention));
      kept.push_back(std::move(profile));
    } catch (const Error& e) {
      set.rejected.push_back({key, e.code(), e.what()});
    }
  }
  set.profiles = std::move(kept);
}

std::vector<std::size_t> FeatureTable::rows_for(std::span<const ProfileKey> keys) const {
  std::set<ProfileKey> wanted(keys.begin(), keys.end());
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < row_keys.size(); ++i) {
    if (wanted.count(row_keys[i])) rows.push_back(i);
  }
  return rows;
}

FeatureTable FeatureTable::subset(std::span<const std::size_t> rows) const {
  FeatureTable out;
  out.x = x.select_rows(rows);
  for (std::size_t r : rows) {
    out.y.push_back(y[r]);
    out.row_keys.push_back(row_keys[r]);
    out.out_of_range.push_back(out_of_range[r]);
  }
  return out;
}

std::vector<RawSample> raw_samples(const ProfileSet& set) {
  std::vector<RawSample> rows;
  for (const auto& p : set.profiles) {
    auto expanded = p.expand();
    rows.insert(rows.end(), expanded.begin(), expanded.end());
  }
  return rows;
}

FeatureTable build_feature_table(const ProfileSet& set, const Scaler& scaler) {
  FeatureTable table;
  std::vector<FeatureVector> vectors;
  for (const auto& p : set.profiles) {
    for (const RawSample& s : p.expand()) {
      vectors.push_back(scaler.apply(s));
      table.row_keys.push_back(p.key());
    }
  }
  table.x = Matrix(vectors.size(), kFeatureCount);
  for (std::size_t r = 0; r < vectors.size(); ++r) {
    std::copy(vectors[r].x.begin(), vectors[r].x.end(), table.x.row(r).begin());
    table.y.push_back(*vectors[r].y);
    table.out_of_range.push_back(vectors[r].out_of_range);
  }
  return table;
}

SplitPlan split_profiles(std::span<const ProfileKey> keys, double ratio,
                         std::uint64_t seed) {
  if (keys.size() < 2) {
    throw Error(ErrorCode::kTooFewProfiles, "a split needs at least two profiles");
  }
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw Error(ErrorCode::kInvalidParam, "split ratio must lie in (0, 1)");
  }
  std::vector<ProfileKey> sorted(keys.begin(), keys.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  std::map<std::string, std::vector<ProfileKey>> by_reservoir;
  for (const auto& k : sorted) by_reservoir[k.reservoir_id].push_back(k);

  Rng rng(seed);
  SplitPlan plan;
  plan.seed = seed;
  plan.ratio = ratio;
  std::vector<ProfileKey> pool;
  for (auto& [reservoir, group] : by_reservoir) {
    if (group.size() == 2) {
      const std::size_t pick = static_cast<std::size_t>(rng.below(2));
      plan.train.push_back(group[pick]);
      plan.test.push_back(group[1 - pick]);
    } else {
      pool.insert(pool.end(), group.begin(), group.end());
    }
  }
  rng.shuffle(pool);
  // Guard against 0.7 * 10 landing a hair above 7.
  const auto cut = std::min<std::size_t>(
      pool.size(),
      static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(pool.size()) - 1e-9)));
  plan.train.insert(plan.train.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(cut));
  plan.test.insert(plan.test.end(), pool.begin() + static_cast<std::ptrdiff_t>(cut), pool.end());
  std::sort(plan.train.begin(), plan.train.end());
  std::sort(plan.test.begin(), plan.test.end());
  return plan;
}

std::vector<std::vector<ProfileKey>> kfold(std::span<const ProfileKey> keys,
                                           std::size_t k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::kInvalidParam, "kfold needs k >= 2");
  if (keys.size() < k) {
    throw Error(ErrorCode::kTooFewProfiles,
                std::to_string(keys.size()) + " profiles cannot fill " +
                    std::to_string(k) + " folds");
  }
  std::vector<ProfileKey> pool(keys.begin(), keys.end());
  std::sort(pool.begin(), pool.end());
  Rng rng(seed);
  rng.shuffle(pool);
  std::vector<std::vector<ProfileKey>> folds(k);
  const std::size_t base = pool.size() / k;
  const std::size_t extra = pool.size() % k;
  std::size_t next = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    folds[f].assign(pool.begin() + static_cast<std::ptrdiff_t>(next),
                    pool.begin() + static_cast<std::ptrdiff_t>(next + size));
    std::sort(folds[f].begin(), folds[f].end());
    next += size;
  }
  return folds;
}

double SynthTruth::evaluate(std::span<const double> x) const {
  return this->x1 * x[0] +
         rational_numerator / (rational_slope * x[1] + rational_offset) +
         this->x3 * x[2] + this->x4 * x[3] + intercept;
}

SynthData synth_generate(const SynthConfig& config) {
  if (!(config.noise_sigma >= 0.0)) {
    throw Error(ErrorCode::kInvalidParam, "noise sigma must be >= 0");
  }
  if (config.n_profiles == 0 || config.n_reservoirs == 0) {
    throw Error(ErrorCode::kInvalidParam, "need at least one profile and reservoir");
  }
  if (config.depths_per_profile < ObservationProfile::kMinSamples) {
    throw Error(ErrorCode::kInvalidParam, "profiles need at least four depths");
  }
  const Scaler scaler = Scaler::fit({}, ScalerMode::kTable2Fixed);
  Rng rng(config.seed);
  SynthData out;
  out.profiles.provenance = "synthetic (seed " + std::to_string(config.seed) + ")";

  const std::size_t n_reservoirs = std::min(config.n_reservoirs, config.n_profiles);
  // Deepest synthetic sample sits just above the published depth maximum.
  constexpr double kMaxDepth = 31.0;
  std::vector<double> surf_ratio(n_reservoirs);
  for (std::size_t r = 0; r < n_reservoirs; ++r) {
    surf_ratio[r] = rng.uniform();
    const double raw = scaler.unscale(Feature::kSurfAreaDepth, surf_ratio[r]);
    out.morphometry["R" + std::to_string(r + 1)] = {raw * kMaxDepth, kMaxDepth};
  }

  const Date origin{std::chrono::year{2020}, std::chrono::January, std::chrono::day{1}};
  std::vector<FeatureVector> rows;
  std::vector<ProfileKey> row_keys;
  std::vector<ObservationProfile> profiles;
  for (std::size_t p = 0; p < config.n_profiles; ++p) {
    const std::size_t r = p % n_reservoirs;
    const std::size_t ordinal = p / n_reservoirs;
    const std::string reservoir = "R" + std::to_string(r + 1);
    const Date date{sys_days{origin} + days{10 * static_cast<int>(ordinal)}};
    ProfileKey key{reservoir, date, "S1"};

    std::array<double, kFeatureCount> x{};
    for (Feature f : kAllFeatures) {
      if (f == Feature::kDepthMeasure) continue;
      x[feature_slot(f)] = f == Feature::kSurfAreaDepth ? surf_ratio[r] : rng.uniform();
    }
    std::vector<double> depth_x(config.depths_per_profile);
    for (double& d : depth_x) d = rng.uniform();
    std::sort(depth_x.begin(), depth_x.end());

    RawRow covariates;
    for (Feature f : kAllFeatures) {
      if (f != Feature::kDepthMeasure) covariates[f] = scaler.unscale(f, x[feature_slot(f)]);
    }
    std::vector<DepthSample> samples;
    for (double dx : depth_x) {
      x[feature_slot(Feature::kDepthMeasure)] = dx;
      double y = out.truth.evaluate(x);
      if (config.noise_sigma > 0.0) y += config.noise_sigma * rng.normal();
      FeatureVector v;
      v.x = x;
      v.y = y;
      rows.push_back(v);
      row_keys.push_back(key);
      samples.push_back({scaler.unscale(Feature::kDepthMeasure, dx), scaler.invert_target(y)});
    }
    profiles.emplace_back(key, std::move(samples), covariates);

    // Daily carrier rows: the measurement day holds the same-day values and
    // the six antecedent days share whatever makes the window aggregates match.
    const double air = *covariates[Feature::kAirTemp];
    const double air7 = *covariates[Feature::kAirTemp7d];
    const double wind = *covariates[Feature::kWind];
    const double wind7 = *covariates[Feature::kWindAvg7];
    const double prcp = *covariates[Feature::kPrcp];
    const double prcp7 = *covariates[Feature::kPrcpCum7];
    for (int back = kWindowDays - 1; back >= 0; --back) {
      DailyRecord rec{};
      rec.vol_lake = *covariates[Feature::kVolLake];
      rec.inflow_lake = *covariates[Feature::kInflowLake];
      if (back == 0) {
        rec.air_temp_c = air;
        rec.wind_ms = wind;
        rec.prcp_mm = prcp;
      } else {
        rec.air_temp_c = (kWindowDays * air7 - air) / (kWindowDays - 1);
        rec.wind_ms = (kWindowDays * wind7 - wind) / (kWindowDays - 1);
        rec.prcp_mm = (prcp7 - prcp) / (kWindowDays - 1);
      }
      out.daily.add(reservoir, Date{sys_days{date} - days{back}}, rec);
    }
  }
  std::sort(profiles.begin(), profiles.end(),
            [](const ObservationProfile& a, const ObservationProfile& b) {
              return a.key() < b.key();
            });
  out.profiles.profiles = std::move(profiles);

  out.table.x = Matrix(rows.size(), kFeatureCount);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy(rows[i].x.begin(), rows[i].x.end(), out.table.x.row(i).begin());
    out.table.y.push_back(*rows[i].y);
    out.table.out_of_range.push_back(false);
  }
  out.table.row_keys = std::move(row_keys);
  return out;
}

void write_observations(std::ostream& out, const ProfileSet& set) {
  out << kObservationsHeader << '\n';
  for (const auto& p : set.profiles) {
    for (const auto& s : p.samples()) {
      out << p.key().reservoir_id << ',' << format_date(p.key().date) << ','
          << p.key().site_id << ',' << format_double(s.depth_m) << ','
          << format_double(s.temp_c) << '\n';
    }
  }
}

void write_daily(std::ostream& out, const DailySeries& daily) {
  out << kDailyHeader << '\n';
  daily.for_each([&](const std::string& reservoir, const Date& date,
                     const DailyRecord& r) {
    out << reservoir << ',' << format_date(date) << ',' << format_double(r.air_temp_c)
        << ',' << format_double(r.prcp_mm) << ',' << format_double(r.wind_ms) << ','
        << format_double(r.vol_lake) << ',' << format_double(r.inflow_lake) << '\n';
  });
}

void write_morphometry(std::ostream& out, const MorphometryTable& table) {
  out << kMorphometryHeader << '\n';
  for (const auto& [reservoir, m] : table) {
    out << reservoir << ',' << format_double(m.surface_area_m2) << ','
        << format_double(m.max_depth_m) << '\n';
  }
}

}  // namespace rwt
