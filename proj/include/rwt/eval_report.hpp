#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rwt/kan.hpp"

namespace rwt {

struct MetricSet {
  double rmse = 0.0;
  double mae = 0.0;
  std::optional<double> r2;  // empty when y_true is constant
  std::size_t n = 0;
};

// Throws Error(kEmptyData) for empty input, Error(kDimensionMismatch) for
// unequal lengths. A constant y_true leaves r2 empty.
MetricSet metrics(std::span<const double> y_true, std::span<const double> y_pred);

// 1 - SSE/SST. Throws Error(kConstantTruth) when SST is zero.
double r2_score(std::span<const double> y_true, std::span<const double> y_pred);

// Linear interpolation between order statistics: h = (n - 1) p,
// Q(p) = s[floor(h)] + (h - floor(h)) (s[floor(h) + 1] - s[floor(h)]).
// `sorted` must be ascending and nonempty; p in [0, 1].
double empirical_quantile(std::span<const double> sorted, double p);

struct QuantilePair {
  double probability = 0.0;
  double observed = 0.0;
  double predicted = 0.0;
};

// Quantiles of both samples at p_k = k / (n_quantiles - 1). The samples may
// differ in length. Throws Error(kInvalidParam) for n_quantiles < 2 and
// Error(kEmptyData) for an empty sample.
std::vector<QuantilePair> quantile_compare(std::span<const double> y_true,
                                           std::span<const double> y_pred,
                                           std::size_t n_quantiles);

// Best markers over one group's models: highest r2 and lowest rmse. Every
// model equal to the best value is flagged; the *_index fields name the
// lowest such index (npos when no model has an r2).
struct BestFlags {
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::vector<bool> r2;
  std::vector<bool> rmse;
  std::size_t r2_index = npos;
  std::size_t rmse_index = npos;
};

BestFlags flag_best(std::span<const MetricSet> models);

struct ModelPredictions {
  std::string model;
  std::vector<double> pred;
};

struct GroupMetrics {
  std::string group;
  std::string model;
  MetricSet metrics;
  bool best_r2 = false;
  bool best_rmse = false;
};

// One row per (group, model): groups in ascending order, models in input
// order. Throws Error(kInvalidParam) for an empty group tag.
std::vector<GroupMetrics> per_group_metrics(std::span<const std::string> groups,
                                            std::span<const double> y_true,
                                            std::span<const ModelPredictions> models);

// --- CSV exports ---

// group,model,n,rmse,mae,r2,best_r2,best_rmse (r2 blank when undefined).
void write_group_metrics_csv(std::ostream& out, std::span<const GroupMetrics> rows);

// observed,predicted,lower_10pct,upper_10pct,within_10pct
void write_scatter_csv(std::ostream& out, std::span<const double> y_true,
                       std::span<const double> y_pred);

// probability,observed,predicted
void write_qq_csv(std::ostream& out, std::span<const QuantilePair> pairs);

// n_inputs,seed,r2_train,r2_test,r2_test_symbolic
void write_r2_curve_csv(std::ostream& out, std::span<const IncrementalRecord> records);

// --- reference values ---

struct ReferenceMetric {
  std::string_view group;
  std::string_view model;
  double r2;
  double rmse;
};

inline constexpr std::string_view kReferenceLabel =
    "published reference, not locally reproduced";

// Per-reservoir test R^2 and RMSE (degrees C) reported for the original
// field dataset, which is not distributed.
std::span<const ReferenceMetric> reference_metrics();

// --- report ---

struct ReportInputs {
  std::string title = "Reservoir water temperature report";
  std::vector<std::pair<std::string, MetricSet>> overall;  // per model, degrees C
  std::vector<GroupMetrics> groups;
  std::vector<std::string> feature_names;
  std::vector<double> importance_percentage;  // by feature, same order as names
  std::vector<IncrementalRecord> incremental;
};

// Markdown summary. Always ends with the reference table, every value
// labeled with kReferenceLabel.
void write_report_markdown(std::ostream& out, const ReportInputs& inputs);

}  // namespace rwt
