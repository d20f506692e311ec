#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "dataset.hpp"
#include "json.hpp"
#include "rwt/cli.hpp"
#include "rwt/eq_bank.hpp"
#include "rwt/error.hpp"
#include "rwt/eval_report.hpp"
#include "rwt/ingest.hpp"
#include "rwt/kan.hpp"
#include "rwt/mlp.hpp"
#include "rwt/model_io.hpp"
#include "rwt/rng.hpp"
#include "rwt/shapley.hpp"
#include "rwt/text.hpp"
#include "rwt/trees.hpp"

namespace rwt::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir + ": " + ec.message());
}

void require_dir(const std::string& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::kFileNotFound, "no such directory " + dir);
}

// manifest.json maps each artifact to the command, config hash and seed that
// produced it plus a content hash. No timestamps, so reruns match bytewise.
void record(const std::string& dir, const RunInfo& info, const std::vector<std::string>& files) {
  const std::string path = dir + "/manifest.json";
  json manifest = json::object();
  if (fs::exists(path)) {
    try {
      manifest = json::parse(read_file(path));
    } catch (const json::exception&) {
      manifest = json::object();
    }
  }
  manifest["version"] = std::string(kVersion);
  manifest["model_format"] = kModelFormatVersion;
  for (const std::string& f : files) {
    manifest["artifacts"][f] = {{"command", info.command},
                                {"config_hash", info.config_hash},
                                {"seed", info.seed},
                                {"content_fnv1a64", hex64(fnv1a64(read_file(dir + "/" + f)))}};
  }
  write_file(path, manifest.dump(2) + "\n");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  for (auto part : split(text, ',')) {
    part = trim(part);
    if (!part.empty()) out.emplace_back(part);
  }
  return out;
}

std::vector<std::uint64_t> parse_u64_list(const std::string& text, const char* what) {
  std::vector<std::uint64_t> out;
  for (const std::string& s : split_list(text)) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      out.push_back(v);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kUsageError, std::string("bad ") + what + " entry '" + s + "'");
    }
  }
  return out;
}

std::string num(double v) { return std::isfinite(v) ? format_double(v) : std::string(); }

std::vector<double> celsius(const Scaler& scaler, std::span<const double> normalized) {
  std::vector<double> out(normalized.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = scaler.invert_target(normalized[i]);
  return out;
}

// First k of a seeded shuffle of 0..n-1, returned in ascending order.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  if (k >= n) return idx;
  Rng rng(seed);
  rng.shuffle(idx);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::string model_name_of(const std::string& path) { return fs::path(path).stem().string(); }

}  // namespace

// --- ingest ---

void run_ingest(const IngestOptions& o, const RunInfo& info, std::ostream& out) {
  ensure_dir(o.out);
  std::string obs_path = o.observations, daily_path = o.daily, morph_path = o.morphometry;
  std::vector<std::string> files;
  if (o.synthetic) {
    SynthConfig sc;
    sc.n_profiles = o.profiles;
    sc.depths_per_profile = o.depths;
    sc.noise_sigma = o.noise;
    sc.seed = o.seed;
    sc.n_reservoirs = o.reservoirs;
    const SynthData synth = synth_generate(sc);
    ensure_dir(o.out + "/raw");
    std::ostringstream a, b, c;
    write_observations(a, synth.profiles);
    write_daily(b, synth.daily);
    write_morphometry(c, synth.morphometry);
    obs_path = o.out + "/raw/observations.csv";
    daily_path = o.out + "/raw/daily.csv";
    morph_path = o.out + "/raw/morphometry.csv";
    write_file(obs_path, a.str());
    write_file(daily_path, b.str());
    write_file(morph_path, c.str());
    files = {"raw/observations.csv", "raw/daily.csv", "raw/morphometry.csv"};
  } else if (obs_path.empty() || daily_path.empty() || morph_path.empty()) {
    throw Error(ErrorCode::kUsageError,
                "ingest needs --synthetic or all of --observations, --daily, --morphometry");
  }

  std::istringstream obs_in(read_file(obs_path)), daily_in(read_file(daily_path)),
      morph_in(read_file(morph_path));
  ProfileSet set = parse_observations(obs_in);
  const DailySeries daily = parse_daily(daily_in);
  const MorphometryTable morph = parse_morphometry(morph_in);
  WindowConvention window;
  if (o.window == "inclusive") {
    window = WindowConvention::kInclusive;
  } else if (o.window == "exclusive") {
    window = WindowConvention::kExclusive;
  } else {
    throw Error(ErrorCode::kUsageError, "--window must be inclusive or exclusive");
  }
  attach_covariates(set, daily, morph, window);

  // auto: the generator's own ranges for synthetic data, training rows otherwise
  const std::string scaler_mode = o.scaler == "auto" ? (o.synthetic ? "fixed" : "data") : o.scaler;
  ScalerMode mode;
  if (scaler_mode == "fixed") {
    mode = ScalerMode::kTable2Fixed;
  } else if (scaler_mode == "data") {
    mode = ScalerMode::kFromData;
  } else {
    throw Error(ErrorCode::kUsageError, "--scaler must be auto, fixed or data");
  }
  const SplitPlan plan = split_profiles(set.keys(), o.ratio, o.split_seed);
  ProfileSet train_set;
  const std::set<ProfileKey> train_keys(plan.train.begin(), plan.train.end());
  for (const auto& p : set.profiles) {
    if (train_keys.count(p.key())) train_set.profiles.push_back(p);
  }
  const Scaler scaler = Scaler::fit(raw_samples(train_set), mode);
  const FeatureTable table = build_feature_table(set, scaler);
  write_dataset(o.out, table, plan, scaler, mode);

  std::ostringstream rej;
  rej << "profile,reason,message\n";
  for (const Rejection& r : set.rejected) {
    rej << to_string(r.key) << ',' << to_string(r.reason) << ",\"" << r.message << "\"\n";
  }
  write_file(o.out + "/rejections.csv", rej.str());
  for (const char* f : {"features.csv", "scaler.json", "split.json", "rejections.csv"}) {
    files.emplace_back(f);
  }
  record(o.out, info, files);
  out << "ingest: " << set.profiles.size() << " profiles, " << table.size() << " rows ("
      << plan.train.size() << " train / " << plan.test.size() << " test profiles), "
      << set.rejected.size() << " rejected\n";
}

// --- train ---

void run_train(const TrainOptions& o, const RunInfo& info, std::ostream& out) {
  require_dir(o.data);
  const Dataset d = read_dataset(o.data);
  const FeatureTable train = d.part(false);
  if (train.size() == 0) throw Error(ErrorCode::kEmptyData, "no training rows");
  const bool quick = o.preset == "quick";
  if (!quick && o.preset != "paper") {
    throw Error(ErrorCode::kUsageError, "--preset must be paper or quick");
  }

  std::unique_ptr<Regressor> model;
  if (o.model == "tree") {
    TreeParams p;
    p.max_depth = o.max_depth.value_or(-1);
    model = std::make_unique<DecisionTree>(tree_fit(train.x, train.y, p, o.seed));
  } else if (o.model == "rf") {
    ForestParams p = ForestParams::paper();
    if (quick) p.n_estimators = 20;
    p.seed = o.seed;
    p.n_estimators = o.trees.value_or(p.n_estimators);
    p.max_depth = o.max_depth.value_or(p.max_depth);
    p.max_features = o.max_features.value_or(p.max_features);
    model = std::make_unique<Forest>(rf_fit(train.x, train.y, p));
  } else if (o.model == "gbm") {
    BoostParams p = BoostParams::paper();
    if (quick) {
      p.n_estimators = 100;
      p.learning_rate = 0.1;
    }
    p.seed = o.seed;
    p.n_estimators = o.trees.value_or(p.n_estimators);
    p.max_depth = o.max_depth.value_or(p.max_depth);
    p.learning_rate = o.learning_rate.value_or(p.learning_rate);
    model = std::make_unique<BoostedEnsemble>(gbm_fit(train.x, train.y, p));
  } else if (o.model == "mlp") {
    MlpTrainConfig c;
    if (quick) c.epochs = 100;
    c.seed = o.seed;
    c.epochs = o.epochs.value_or(c.epochs);
    c.learning_rate = o.learning_rate.value_or(c.learning_rate);
    MlpModel m = mlp_init(paper_mlp_layout(kFeatureCount), derive_seed(o.seed, 0));
    model = std::make_unique<MlpModel>(mlp_train(std::move(m), train.x, train.y, c).model);
  } else if (o.model == "kan") {
    KanTrainConfig c;
    if (quick) c.steps = 300;
    c.steps = o.steps.value_or(c.steps);
    c.learning_rate = o.learning_rate.value_or(c.learning_rate);
    c.lambda = o.lambda.value_or(c.lambda);
    const auto layout = kan_regime_layout(parse_kan_regime(o.regime), kFeatureCount);
    KanNetwork k = kan_init(layout, o.grid, o.seed);
    model = std::make_unique<KanNetwork>(kan_train(std::move(k), train.x, train.y, c).net);
  } else {
    throw Error(ErrorCode::kUsageError, "--model must be one of tree, rf, gbm, mlp, kan");
  }

  ensure_dir(o.out);
  const std::string name = (o.name.empty() ? o.model : o.name) + ".json";
  save_model(o.out + "/" + name, *model);
  record(o.out, info, {name});
  const MetricSet m = metrics(train.y, model->predict_rows(train.x));
  out << "train: " << o.model << " on " << train.size() << " rows, normalized train rmse "
      << format_double(m.rmse) << " -> " << name << "\n";
}

// --- evaluate ---

void run_evaluate(const EvaluateOptions& o, const RunInfo& info, std::ostream& out) {
  require_dir(o.data);
  const Dataset d = read_dataset(o.data);
  const FeatureTable test = d.part(true);
  if (test.size() == 0) throw Error(ErrorCode::kEmptyData, "no test rows");
  const std::vector<double> observed = celsius(d.scaler, test.y);
  std::vector<std::string> groups;
  for (const auto& k : test.row_keys) groups.push_back(k.reservoir_id);

  const auto paths = split_list(o.models);
  if (paths.empty()) throw Error(ErrorCode::kUsageError, "--models lists no files");
  std::vector<ModelPredictions> preds;
  std::set<std::string> names;
  for (const std::string& p : paths) {
    const auto model = load_model(p);
    const std::string name = model_name_of(p);
    if (!names.insert(name).second) {
      throw Error(ErrorCode::kUsageError, "duplicate model name " + name);
    }
    preds.push_back({name, celsius(d.scaler, model->predict_rows(test.x))});
  }

  ensure_dir(o.out);
  std::vector<std::string> files;
  std::ostringstream overall;
  overall << "model,n,rmse,mae,r2\n";
  for (const ModelPredictions& p : preds) {
    const MetricSet m = metrics(observed, p.pred);
    overall << p.model << ',' << m.n << ',' << num(m.rmse) << ',' << num(m.mae) << ','
            << (m.r2 ? num(*m.r2) : std::string()) << '\n';
    std::ostringstream scatter, qq;
    write_scatter_csv(scatter, observed, p.pred);
    write_qq_csv(qq, quantile_compare(observed, p.pred, o.quantiles));
    write_file(o.out + "/scatter_" + p.model + ".csv", scatter.str());
    write_file(o.out + "/qq_" + p.model + ".csv", qq.str());
    files.push_back("scatter_" + p.model + ".csv");
    files.push_back("qq_" + p.model + ".csv");
  }
  write_file(o.out + "/metrics.csv", overall.str());
  files.push_back("metrics.csv");

  std::ostringstream by_group;
  write_group_metrics_csv(by_group, per_group_metrics(groups, observed, preds));
  write_file(o.out + "/by_reservoir.csv", by_group.str());
  files.push_back("by_reservoir.csv");

  std::ostringstream jl;
  for (std::size_t i = 0; i < test.size(); ++i) {
    ordered_json rec = {{"profile", to_string(test.row_keys[i])},
                        {"depth_m", d.scaler.unscale(Feature::kDepthMeasure,
                                                     test.x(i, feature_slot(Feature::kDepthMeasure)))},
                        {"observed_c", observed[i]}};
    for (const ModelPredictions& p : preds) rec["predicted_c"][p.model] = p.pred[i];
    jl << rec.dump() << '\n';
  }
  write_file(o.out + "/predictions.jsonl", jl.str());
  files.push_back("predictions.jsonl");
  record(o.out, info, files);
  out << "evaluate: " << preds.size() << " model(s) on " << test.size() << " test rows\n";
}

// --- explain ---

void run_explain(const ExplainOptions& o, const RunInfo& info, std::ostream& out) {
  require_dir(o.data);
  const Dataset d = read_dataset(o.data);
  const auto model = load_model(o.model);
  const std::string name = model_name_of(o.model);
  const FeatureTable train = d.part(false), test = d.part(true);
  if (train.size() == 0 || test.size() == 0) {
    throw Error(ErrorCode::kEmptyData, "explain needs train and test rows");
  }
  const Matrix background = background_sample(train.x, o.background, derive_seed(o.seed, 0));
  const auto pick = sample_indices(test.size(), o.instances, derive_seed(o.seed, 1));
  const Matrix instances = test.x.select_rows(pick);
  std::vector<std::string> keys;
  for (std::size_t i : pick) keys.push_back(to_string(test.row_keys[i]) + "#" + std::to_string(i));

  const auto explanations = shap_explain(*model, instances, background, keys, o.threads);
  const auto names = default_feature_names(model->input_dim());

  ensure_dir(o.out);
  std::ostringstream jl;
  for (const ShapExplanation& e : explanations) {
    ordered_json rec = {{"key", e.key}, {"base", e.base}, {"fx", e.fx}, {"phi", e.phi},
                        {"efficiency_gap", e.reconstruction() - e.fx}};
    jl << rec.dump() << '\n';
  }
  std::ostringstream summary, heatmap, importance;
  shap_export_summary(summary, explanations, names);
  shap_export_heatmap(heatmap, explanations, names);
  const GlobalImportance g = shap_global(explanations);
  importance << "rank,feature,index,mean_abs_shap,percentage\n";
  for (std::size_t r = 0; r < g.ranking.size(); ++r) {
    const std::size_t f = g.ranking[r];
    importance << r + 1 << ',' << names[f] << ',' << f + 1 << ',' << num(g.importance[f]) << ','
               << num(g.percentage[f]) << '\n';
  }
  const std::vector<std::pair<std::string, std::string>> outputs{
      {"shap_" + name + ".jsonl", jl.str()},
      {"shap_summary_" + name + ".csv", summary.str()},
      {"shap_heatmap_" + name + ".csv", heatmap.str()},
      {"importance_" + name + ".csv", importance.str()}};
  std::vector<std::string> files;
  for (const auto& [file, content] : outputs) {
    write_file(o.out + "/" + file, content);
    files.push_back(file);
  }
  record(o.out, info, files);
  out << "explain: " << explanations.size() << " instances, background " << background.rows
      << " rows\n";
}

// --- kan-run ---

namespace {

std::vector<int> ordering_from_importance(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  std::getline(in, line);
  std::vector<int> order;
  while (std::getline(in, line)) {
    const auto f = split(line);
    if (f.size() < 3) continue;
    const auto v = parse_double(f[2]);
    if (!v) throw Error(ErrorCode::kSchemaMismatch, path + ": bad feature index");
    order.push_back(static_cast<int>(*v));
  }
  return order;
}

}  // namespace

void run_kan(const KanRunOptions& o, const RunInfo& info, std::ostream& out) {
  require_dir(o.data);
  const Dataset d = read_dataset(o.data);
  const FeatureTable train = d.part(false), test = d.part(true);

  IncrementalConfig c;
  c.regime = parse_kan_regime(o.regime);
  if (!o.ordering.empty()) {
    for (auto v : parse_u64_list(o.ordering, "ordering")) c.ordering.push_back(static_cast<int>(v));
  } else if (!o.importance.empty()) {
    c.ordering = ordering_from_importance(o.importance);
  } else {
    for (int i = 1; i <= static_cast<int>(kFeatureCount); ++i) c.ordering.push_back(i);
  }
  if (c.ordering.size() > o.max_inputs) c.ordering.resize(o.max_inputs);
  c.seeds = parse_u64_list(o.seeds, "seeds");
  c.grid_size = o.grid;
  c.train.steps = o.steps.value_or(c.train.steps);
  c.train.learning_rate = o.learning_rate.value_or(c.train.learning_rate);
  c.train.lambda = o.lambda.value_or(c.train.lambda);
  c.snap_rows = o.snap_rows;
  c.max_threads = o.threads;
  const auto records = incremental_experiment(train.x, train.y, test.x, test.y, c);

  ensure_dir(o.out);
  std::ostringstream jl, curve;
  write_incremental_jsonl(jl, records);
  write_r2_curve_csv(curve, records);
  write_file(o.out + "/kan_incremental.jsonl", jl.str());
  write_file(o.out + "/r2_curve.csv", curve.str());
  record(o.out, info, {"kan_incremental.jsonl", "r2_curve.csv"});
  out << "kan-run: " << records.size() << " networks\n";
  for (const IncrementalRecord& r : records) {
    out << "  " << r.n_inputs << " inputs, seed " << r.seed << ": r2_test "
        << format_double(r.r2_test) << "  " << r.expression_text << '\n';
  }
}

// --- eq ---

void run_eq_list(std::ostream& out) {
  for (const BankEntry& e : default_bank().entries()) {
    out << to_string(e.set) << '/' << e.n_inputs << "  r2=" << e.r2 << "  "
        << to_string(e.expression) << '\n';
  }
}

void run_eq_eval(const EqOptions& o, std::ostream& out) {
  const BankEntry& e = default_bank().lookup(parse_bank_set(o.set), o.inputs);
  std::vector<double> x(static_cast<std::size_t>(max_variable(e.expression)), 0.0);
  for (int v : variables(e.expression)) {
    const auto& given = o.x[v - 1];
    if (!given) {
      throw Error(ErrorCode::kUnboundVariable,
                  std::string(to_string(e.set)) + "/" + std::to_string(e.n_inputs) + " needs --x" +
                      std::to_string(v));
    }
    x[static_cast<std::size_t>(v - 1)] = *given;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", evaluate(e.expression, x));
  out << buf << '\n';
}

void run_eq_scan(const EqOptions& o, std::ostream& out) {
  for (const BankEntry& e : default_bank().entries()) {
    const int dims = std::max(e.n_inputs, max_variable(e.expression));
    const PoleScan s = pole_scan(e.expression, dims, o.points, o.seed);
    ordered_json rec = {{"entry", std::string(to_string(e.set)) + "/" + std::to_string(e.n_inputs)},
                        {"points", s.points},
                        {"pole_errors", s.pole_errors},
                        {"domain_errors", s.domain_errors},
                        {"min_abs_denominator", s.min_abs_denominator}};
    out << rec.dump() << '\n';
  }
}

// --- report ---

namespace {

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> row;
    for (auto f : split(line)) row.emplace_back(f);
    rows.push_back(std::move(row));
  }
  return rows;
}

MetricSet metric_from(const std::string& n, const std::string& rmse, const std::string& mae,
                      const std::string& r2) {
  MetricSet m;
  m.n = static_cast<std::size_t>(parse_double(n).value_or(0));
  m.rmse = parse_double(rmse).value_or(NAN);
  m.mae = parse_double(mae).value_or(NAN);
  if (auto v = parse_double(r2)) m.r2 = *v;
  return m;
}

}  // namespace

void run_report(const ReportOptions& o, const RunInfo& info, std::ostream& out) {
  require_dir(o.dir);
  ReportInputs in;
  std::vector<std::string> used;
  const auto have = [&](const std::string& f) { return fs::exists(o.dir + "/" + f); };
  if (have("metrics.csv")) {
    for (const auto& r : read_csv(o.dir + "/metrics.csv")) {
      if (r.size() < 5) throw Error(ErrorCode::kSchemaMismatch, "metrics.csv row");
      in.overall.push_back({r[0], metric_from(r[1], r[2], r[3], r[4])});
    }
    used.push_back("metrics.csv");
  }
  if (have("by_reservoir.csv")) {
    for (const auto& r : read_csv(o.dir + "/by_reservoir.csv")) {
      if (r.size() < 8) throw Error(ErrorCode::kSchemaMismatch, "by_reservoir.csv row");
      in.groups.push_back({r[0], r[1], metric_from(r[2], r[3], r[4], r[5]), r[6] == "1",
                           r[7] == "1"});
    }
    used.push_back("by_reservoir.csv");
  }
  std::vector<std::string> importance_files;
  for (const auto& entry : fs::directory_iterator(o.dir)) {
    const std::string f = entry.path().filename().string();
    if (f.rfind("importance_", 0) == 0 && entry.path().extension() == ".csv") {
      importance_files.push_back(f);
    }
  }
  std::sort(importance_files.begin(), importance_files.end());
  if (!importance_files.empty()) {
    const auto rows = read_csv(o.dir + "/" + importance_files.front());
    in.feature_names.resize(rows.size());
    in.importance_percentage.resize(rows.size());
    for (const auto& r : rows) {
      const auto idx = static_cast<std::size_t>(parse_double(r.at(2)).value_or(0));
      if (idx == 0 || idx > rows.size()) throw Error(ErrorCode::kSchemaMismatch, "importance row");
      in.feature_names[idx - 1] = r.at(1);
      in.importance_percentage[idx - 1] = parse_double(r.at(4)).value_or(NAN);
    }
    used.push_back(importance_files.front());
  }
  if (have("kan_incremental.jsonl")) {
    std::istringstream jl(read_file(o.dir + "/kan_incremental.jsonl"));
    std::string line;
    const auto val = [](const json& j) { return j.is_number() ? j.get<double>() : NAN; };
    while (std::getline(jl, line)) {
      if (line.empty()) continue;
      const json j = json::parse(line);
      IncrementalRecord r;
      r.n_inputs = j.at("n_inputs").get<std::size_t>();
      r.seed = j.at("seed").get<std::uint64_t>();
      r.regime = parse_kan_regime(j.at("regime").get<std::string>());
      r.r2_train = val(j.at("r2_train"));
      r.r2_test = val(j.at("r2_test"));
      r.r2_test_symbolic = val(j.at("r2_test_symbolic"));
      r.expression_text = j.at("expression_text").get<std::string>();
      in.incremental.push_back(std::move(r));
    }
    used.push_back("kan_incremental.jsonl");
  }
  std::ostringstream md;
  write_report_markdown(md, in);
  const std::string target = o.out.empty() ? o.dir : o.out;
  ensure_dir(target);
  write_file(target + "/report.md", md.str());
  record(target, info, {"report.md"});
  out << "report: " << target << "/report.md from " << used.size() << " artifact(s)\n";
}

}  // namespace rwt::cli
