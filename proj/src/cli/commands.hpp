#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace rwt::cli {

// Provenance recorded in manifest.json for every artifact a command writes.
struct RunInfo {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
};

struct IngestOptions {
  bool synthetic = false;
  std::size_t profiles = 100;
  std::size_t depths = 8;
  std::size_t reservoirs = 10;
  double noise = 0.0;
  std::uint64_t seed = 42;
  std::string observations, daily, morphometry;
  std::string scaler = "auto";
  std::string window = "inclusive";
  double ratio = 0.7;
  std::uint64_t split_seed = 42;
  std::string out;
};

struct TrainOptions {
  std::string data;
  std::string model;
  std::string name;
  std::string preset = "paper";
  std::uint64_t seed = 42;
  std::optional<std::size_t> trees;
  std::optional<int> max_depth;
  std::optional<std::size_t> max_features;
  std::optional<double> learning_rate;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> steps;
  std::optional<double> lambda;
  std::string regime = "simple";
  int grid = 8;
  std::string out;
};

struct EvaluateOptions {
  std::string data;
  std::string models;  // comma separated model files
  std::size_t quantiles = 100;
  std::string out;
};

struct ExplainOptions {
  std::string data;
  std::string model;
  std::size_t background = 64;
  std::size_t instances = 200;
  std::uint64_t seed = 42;
  std::size_t threads = 0;
  std::string out;
};

struct KanRunOptions {
  std::string data;
  std::string regime = "simple";
  std::string ordering;    // comma separated 1-based indices
  std::string importance;  // importance CSV giving the ordering
  std::string seeds = "42";
  std::size_t max_inputs = 10;
  std::optional<std::size_t> steps;
  std::optional<double> learning_rate;
  std::optional<double> lambda;
  int grid = 8;
  std::size_t snap_rows = 1000;
  std::size_t threads = 0;
  std::string out;
};

struct EqOptions {
  std::string set = "simple";
  int inputs = 1;
  std::optional<double> x[10];
  std::size_t points = 100000;
  std::uint64_t seed = 1;
};

struct ReportOptions {
  std::string dir;
  std::string out;
};

void run_ingest(const IngestOptions& o, const RunInfo& info, std::ostream& out);
void run_train(const TrainOptions& o, const RunInfo& info, std::ostream& out);
void run_evaluate(const EvaluateOptions& o, const RunInfo& info, std::ostream& out);
void run_explain(const ExplainOptions& o, const RunInfo& info, std::ostream& out);
void run_kan(const KanRunOptions& o, const RunInfo& info, std::ostream& out);
void run_eq_list(std::ostream& out);
void run_eq_eval(const EqOptions& o, std::ostream& out);
void run_eq_scan(const EqOptions& o, std::ostream& out);
void run_report(const ReportOptions& o, const RunInfo& info, std::ostream& out);

}  // namespace rwt::cli
