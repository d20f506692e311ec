#include "rwt/eval_report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

#include "rwt/error.hpp"
#include "rwt/text.hpp"

namespace rwt {

namespace {

void check_pair(std::span<const double> y_true, std::span<const double> y_pred) {
  if (y_true.empty()) throw Error(ErrorCode::kEmptyData, "metrics need at least one row");
  if (y_true.size() != y_pred.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "y_true has " + std::to_string(y_true.size()) + " rows, y_pred " +
                    std::to_string(y_pred.size()));
  }
}

std::optional<double> r2_or_empty(std::span<const double> y_true,
                                  std::span<const double> y_pred) {
  double mean = 0.0;
  for (double v : y_true) mean += v;
  mean /= static_cast<double>(y_true.size());
  double sse = 0.0, sst = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    sse += (y_true[i] - y_pred[i]) * (y_true[i] - y_pred[i]);
    sst += (y_true[i] - mean) * (y_true[i] - mean);
  }
  if (sst == 0.0) return std::nullopt;
  return 1.0 - sse / sst;
}

std::string num(double v) { return std::isfinite(v) ? format_double(v) : std::string(); }

std::string fixed(double v, int digits) {
  if (!std::isfinite(v)) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

constexpr std::array<ReferenceMetric, 27> kReference{{
    {"Arbuckle Reservoir", "RF", 0.989, 0.787},
    {"Arbuckle Reservoir", "XGBoost", 0.991, 0.703},
    {"Arbuckle Reservoir", "MLP", 0.978, 1.112},
    {"Fort Cobb Reservoir", "RF", 0.994, 0.645},
    {"Fort Cobb Reservoir", "XGBoost", 0.993, 0.647},
    {"Fort Cobb Reservoir", "MLP", 0.992, 0.756},
    {"Foss Reservoir", "RF", 0.985, 0.944},
    {"Foss Reservoir", "XGBoost", 0.980, 1.071},
    {"Foss Reservoir", "MLP", 0.947, 1.751},
    {"Hugo Lake", "RF", 0.598, 0.987},
    {"Hugo Lake", "XGBoost", 0.572, 1.019},
    {"Hugo Lake", "MLP", 0.524, 1.074},
    {"Lake Texoma", "RF", 0.968, 1.283},
    {"Lake Texoma", "XGBoost", 0.963, 1.381},
    {"Lake Texoma", "MLP", 0.920, 2.034},
    {"Pine Creek Lake", "RF", 0.998, 0.467},
    {"Pine Creek Lake", "XGBoost", 0.997, 0.559},
    {"Pine Creek Lake", "MLP", 0.995, 0.652},
    {"Sardis Lake", "RF", 0.363, 0.445},
    {"Sardis Lake", "XGBoost", 0.844, 0.220},
    {"Sardis Lake", "MLP", 0.761, 0.273},
    {"Tom Steed Reservoir", "RF", 0.997, 0.576},
    {"Tom Steed Reservoir", "XGBoost", 0.996, 0.624},
    {"Tom Steed Reservoir", "MLP", 0.931, 2.855},
    {"Waurika Lake", "RF", 0.989, 0.764},
    {"Waurika Lake", "XGBoost", 0.992, 0.664},
    {"Waurika Lake", "MLP", 0.855, 2.760},
}};

}  // namespace

MetricSet metrics(std::span<const double> y_true, std::span<const double> y_pred) {
  check_pair(y_true, y_pred);
  double se = 0.0, ae = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const double d = y_true[i] - y_pred[i];
    se += d * d;
    ae += std::fabs(d);
  }
  const auto n = static_cast<double>(y_true.size());
  MetricSet m;
  m.rmse = std::sqrt(se / n);
  m.mae = ae / n;
  m.r2 = r2_or_empty(y_true, y_pred);
  m.n = y_true.size();
  return m;
}

double r2_score(std::span<const double> y_true, std::span<const double> y_pred) {
  check_pair(y_true, y_pred);
  const auto r2 = r2_or_empty(y_true, y_pred);
  if (!r2) throw Error(ErrorCode::kConstantTruth, "r2 undefined for constant y_true");
  return *r2;
}

double empirical_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error(ErrorCode::kEmptyData, "quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::kInvalidParam, "p must lie in [0, 1]");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

std::vector<QuantilePair> quantile_compare(std::span<const double> y_true,
                                           std::span<const double> y_pred,
                                           std::size_t n_quantiles) {
  if (n_quantiles < 2) throw Error(ErrorCode::kInvalidParam, "need at least two quantiles");
  if (y_true.empty() || y_pred.empty()) {
    throw Error(ErrorCode::kEmptyData, "quantile comparison of an empty sample");
  }
  std::vector<double> a(y_true.begin(), y_true.end()), b(y_pred.begin(), y_pred.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<QuantilePair> out(n_quantiles);
  for (std::size_t k = 0; k < n_quantiles; ++k) {
    const double p = static_cast<double>(k) / static_cast<double>(n_quantiles - 1);
    out[k] = {p, empirical_quantile(a, p), empirical_quantile(b, p)};
  }
  return out;
}

BestFlags flag_best(std::span<const MetricSet> models) {
  BestFlags f;
  f.r2.assign(models.size(), false);
  f.rmse.assign(models.size(), false);
  for (std::size_t i = 0; i < models.size(); ++i) {
    if (models[i].r2 && (f.r2_index == BestFlags::npos || *models[i].r2 > *models[f.r2_index].r2)) {
      f.r2_index = i;
    }
    if (f.rmse_index == BestFlags::npos || models[i].rmse < models[f.rmse_index].rmse) {
      f.rmse_index = i;
    }
  }
  for (std::size_t i = 0; i < models.size(); ++i) {
    f.r2[i] = f.r2_index != BestFlags::npos && models[i].r2 &&
              *models[i].r2 == *models[f.r2_index].r2;
    f.rmse[i] = f.rmse_index != BestFlags::npos && models[i].rmse == models[f.rmse_index].rmse;
  }
  return f;
}

std::vector<GroupMetrics> per_group_metrics(std::span<const std::string> groups,
                                            std::span<const double> y_true,
                                            std::span<const ModelPredictions> models) {
  if (groups.size() != y_true.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "every row needs a group tag");
  }
  std::map<std::string, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (groups[i].empty()) throw Error(ErrorCode::kInvalidParam, "row without group tag");
    members[groups[i]].push_back(i);
  }
  for (const ModelPredictions& m : models) check_pair(y_true, m.pred);

  std::vector<GroupMetrics> rows;
  for (const auto& [group, idx] : members) {
    std::vector<double> t(idx.size()), p(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) t[k] = y_true[idx[k]];
    std::vector<MetricSet> sets;
    for (const ModelPredictions& m : models) {
      for (std::size_t k = 0; k < idx.size(); ++k) p[k] = m.pred[idx[k]];
      sets.push_back(metrics(t, p));
    }
    const BestFlags f = flag_best(sets);
    for (std::size_t j = 0; j < models.size(); ++j) {
      rows.push_back({group, models[j].model, sets[j], f.r2[j], f.rmse[j]});
    }
  }
  return rows;
}

void write_group_metrics_csv(std::ostream& out, std::span<const GroupMetrics> rows) {
  out << "group,model,n,rmse,mae,r2,best_r2,best_rmse\n";
  for (const GroupMetrics& r : rows) {
    out << r.group << ',' << r.model << ',' << r.metrics.n << ',' << num(r.metrics.rmse) << ','
        << num(r.metrics.mae) << ',' << (r.metrics.r2 ? num(*r.metrics.r2) : std::string())
        << ',' << int(r.best_r2) << ',' << int(r.best_rmse) << '\n';
  }
}

void write_scatter_csv(std::ostream& out, std::span<const double> y_true,
                       std::span<const double> y_pred) {
  check_pair(y_true, y_pred);
  out << "observed,predicted,lower_10pct,upper_10pct,within_10pct\n";
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const double a = 0.9 * y_true[i], b = 1.1 * y_true[i];
    const double lo = std::min(a, b), hi = std::max(a, b);
    const bool within = y_pred[i] >= lo && y_pred[i] <= hi;
    out << num(y_true[i]) << ',' << num(y_pred[i]) << ',' << num(lo) << ',' << num(hi) << ','
        << int(within) << '\n';
  }
}

void write_qq_csv(std::ostream& out, std::span<const QuantilePair> pairs) {
  out << "probability,observed,predicted\n";
  for (const QuantilePair& q : pairs) {
    out << num(q.probability) << ',' << num(q.observed) << ',' << num(q.predicted) << '\n';
  }
}

void write_r2_curve_csv(std::ostream& out, std::span<const IncrementalRecord> records) {
  out << "n_inputs,seed,r2_train,r2_test,r2_test_symbolic\n";
  for (const IncrementalRecord& r : records) {
    out << r.n_inputs << ',' << r.seed << ',' << num(r.r2_train) << ',' << num(r.r2_test) << ','
        << num(r.r2_test_symbolic) << '\n';
  }
}

std::span<const ReferenceMetric> reference_metrics() { return kReference; }

void write_report_markdown(std::ostream& out, const ReportInputs& in) {
  out << "# " << in.title << "\n\n";
  if (!in.overall.empty()) {
    out << "## Test metrics (degrees C)\n\n| model | n | RMSE | MAE | R2 |\n|---|---|---|---|---|\n";
    for (const auto& [model, m] : in.overall) {
      out << "| " << model << " | " << m.n << " | " << fixed(m.rmse, 3) << " | "
          << fixed(m.mae, 3) << " | " << (m.r2 ? fixed(*m.r2, 3) : "n/a") << " |\n";
    }
    out << '\n';
  }
  if (!in.groups.empty()) {
    out << "## By reservoir\n\nBest values per reservoir carry a `*`.\n\n"
           "| reservoir | model | n | R2 | RMSE |\n|---|---|---|---|---|\n";
    for (const GroupMetrics& g : in.groups) {
      out << "| " << g.group << " | " << g.model << " | " << g.metrics.n << " | "
          << (g.metrics.r2 ? fixed(*g.metrics.r2, 3) : "n/a") << (g.best_r2 ? "*" : "")
          << " | " << fixed(g.metrics.rmse, 3) << (g.best_rmse ? "*" : "") << " |\n";
    }
    out << '\n';
  }
  if (!in.importance_percentage.empty()) {
    std::vector<std::size_t> order(in.importance_percentage.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return in.importance_percentage[a] > in.importance_percentage[b];
    });
    out << "## Global feature importance\n\n| feature | share (%) |\n|---|---|\n";
    for (std::size_t i : order) {
      const std::string name =
          i < in.feature_names.size() ? in.feature_names[i] : "x" + std::to_string(i + 1);
      out << "| " << name << " | " << fixed(in.importance_percentage[i], 2) << " |\n";
    }
    out << '\n';
  }
  if (!in.incremental.empty()) {
    out << "## Incremental inputs\n\n| inputs | seed | R2 test | R2 symbolic | expression |\n"
           "|---|---|---|---|---|\n";
    for (const IncrementalRecord& r : in.incremental) {
      out << "| " << r.n_inputs << " | " << r.seed << " | " << fixed(r.r2_test, 4) << " | "
          << fixed(r.r2_test_symbolic, 4) << " | `" << r.expression_text << "` |\n";
    }
    out << '\n';
  }
  out << "## Reference values\n\n"
         "Field-data results for the original ten-reservoir set. These are a "
      << kReferenceLabel << "[^ref].\n\n| reservoir | model | R2 | RMSE |\n|---|---|---|---|\n";
  for (const ReferenceMetric& r : reference_metrics()) {
    out << "| " << r.group << " | " << r.model << " | " << fixed(r.r2, 3) << "[^ref] | "
        << fixed(r.rmse, 3) << "[^ref] |\n";
  }
  out << "\n[^ref]: " << kReferenceLabel << ".\n";
}

}  // namespace rwt
