#include "dataset.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "rwt/error.hpp"
#include "rwt/text.hpp"

namespace rwt::cli {

namespace {

using nlohmann::ordered_json;

constexpr const char* kFeaturesFile = "/features.csv";
constexpr const char* kScalerFile = "/scaler.json";
constexpr const char* kSplitFile = "/split.json";

std::string header() {
  std::string h = "reservoir_id,date,site_id,split";
  for (std::size_t i = 1; i <= kFeatureCount; ++i) h += ",x" + std::to_string(i);
  return h + ",y";
}

ordered_json bounds_json(const Bounds& b) { return {{"min", b.min}, {"max", b.max}}; }

Bounds bounds_from(const ordered_json& j) {
  return {j.at("min").get<double>(), j.at("max").get<double>()};
}

[[noreturn]] void bad(const std::string& file, const std::string& what) {
  throw Error(ErrorCode::kSchemaMismatch, file + ": " + what);
}

}  // namespace

std::vector<std::size_t> Dataset::rows(bool test) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < is_test.size(); ++i) {
    if (is_test[i] == test) out.push_back(i);
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFileNotFound, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  out << content;
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path);
}

void write_dataset(const std::string& dir, const FeatureTable& table, const SplitPlan& plan,
                   const Scaler& scaler, ScalerMode mode) {
  const std::set<ProfileKey> test(plan.test.begin(), plan.test.end());
  std::ostringstream csv;
  csv << header() << '\n';
  for (std::size_t i = 0; i < table.size(); ++i) {
    const ProfileKey& k = table.row_keys[i];
    csv << k.reservoir_id << ',' << format_date(k.date) << ',' << k.site_id << ','
        << (test.count(k) ? "test" : "train");
    for (double v : table.x.row(i)) csv << ',' << format_double(v);
    csv << ',' << format_double(table.y[i]) << '\n';
  }
  write_file(dir + kFeaturesFile, csv.str());

  ordered_json features = ordered_json::array();
  for (Feature f : kAllFeatures) {
    ordered_json b = bounds_json(scaler.bounds(f));
    features.push_back({{"name", feature_name(f)}, {"min", b["min"]}, {"max", b["max"]}});
  }
  const ordered_json sj = {
      {"mode", mode == ScalerMode::kTable2Fixed ? "table2_fixed" : "from_data"},
      {"features", features},
      {"target", bounds_json(scaler.target_bounds())}};
  write_file(dir + kScalerFile, sj.dump(2) + "\n");

  ordered_json train = ordered_json::array(), test_keys = ordered_json::array();
  for (const auto& k : plan.train) train.push_back(to_string(k));
  for (const auto& k : plan.test) test_keys.push_back(to_string(k));
  const ordered_json split = {
      {"seed", plan.seed}, {"ratio", plan.ratio}, {"train", train}, {"test", test_keys}};
  write_file(dir + kSplitFile, split.dump(2) + "\n");
}

Dataset read_dataset(const std::string& dir) {
  const std::string scaler_path = dir + kScalerFile;
  std::array<Bounds, kFeatureCount> bounds{};
  Bounds target;
  try {
    const ordered_json sj = ordered_json::parse(read_file(scaler_path));
    const auto& f = sj.at("features");
    if (f.size() != kFeatureCount) bad(scaler_path, "expected ten feature bounds");
    for (std::size_t i = 0; i < kFeatureCount; ++i) bounds[i] = bounds_from(f[i]);
    target = bounds_from(sj.at("target"));
  } catch (const nlohmann::json::exception& e) {
    bad(scaler_path, e.what());
  }

  const std::string path = dir + kFeaturesFile;
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line) || line != header()) bad(path, "unexpected header");
  Dataset d{FeatureTable{}, {}, Scaler(bounds, target)};
  std::vector<double> values;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 4 + kFeatureCount + 1) bad(path, "line " + std::to_string(line_no));
    const auto date = parse_date(f[1]);
    if (!date || (f[3] != "train" && f[3] != "test")) {
      bad(path, "line " + std::to_string(line_no));
    }
    for (std::size_t c = 4; c < f.size(); ++c) {
      const auto v = parse_double(f[c]);
      if (!v) bad(path, "line " + std::to_string(line_no) + ": bad number");
      values.push_back(*v);
    }
    d.table.y.push_back(values.back());
    values.pop_back();
    d.table.row_keys.push_back({std::string(f[0]), *date, std::string(f[2])});
    d.table.out_of_range.push_back(false);
    d.is_test.push_back(f[3] == "test");
  }
  if (d.table.y.empty()) throw Error(ErrorCode::kEmptyData, path + " has no rows");
  d.table.x.rows = d.table.y.size();
  d.table.x.cols = kFeatureCount;
  d.table.x.data = std::move(values);
  return d;
}

}  // namespace rwt::cli
