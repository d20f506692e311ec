#include "rwt/shapley.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "rwt/error.hpp"
#include "rwt/parallel.hpp"
#include "rwt/rng.hpp"
#include "rwt/text.hpp"

namespace rwt {

namespace {

void check_inputs(const Regressor& model, std::span<const double> x, const Matrix& background) {
  check_dimension(model.input_dim(), x.size());
  if (background.rows == 0) throw Error(ErrorCode::kEmptyBackground, "background set is empty");
  check_dimension(model.input_dim(), background.cols);
  if (x.size() > kMaxShapFeatures) {
    throw Error(ErrorCode::kTooManyFeatures,
                "exact enumeration supports at most 15 features, got " +
                    std::to_string(x.size()));
  }
}

double masked_mean(const Regressor& model, std::span<const double> x, std::uint32_t mask,
                   const Matrix& background, std::vector<double>& z) {
  // Averaged as shift + mean(v - shift) so that identical predictions, which
  // occur whenever only unread features vary, average to themselves exactly.
  const std::size_t q = x.size();
  double shift = 0.0;
  double sum = 0.0;
  for (std::size_t r = 0; r < background.rows; ++r) {
    const auto b = background.row(r);
    for (std::size_t i = 0; i < q; ++i) z[i] = (mask >> i) & 1u ? x[i] : b[i];
    const double v = model.predict(z);
    if (r == 0) shift = v;
    sum += v - shift;
  }
  return shift + sum / static_cast<double>(background.rows);
}

std::uint64_t binomial(std::size_t n, std::size_t k) {
  std::uint64_t c = 1;
  for (std::size_t j = 1; j <= k; ++j) c = c * (n - k + j) / j;
  return c;
}

}  // namespace

double ShapExplanation::reconstruction() const {
  return base + std::accumulate(phi.begin(), phi.end(), 0.0);
}

Matrix background_sample(const Matrix& rows, std::size_t max_rows, std::uint64_t seed) {
  if (max_rows == 0 || rows.rows <= max_rows) return rows;
  std::vector<std::size_t> index(rows.rows);
  std::iota(index.begin(), index.end(), 0);
  Rng rng(seed);
  rng.shuffle(index);
  index.resize(max_rows);
  std::sort(index.begin(), index.end());
  return rows.select_rows(index);
}

double coalition_value(const Regressor& model, std::span<const double> x, std::uint32_t mask,
                       const Matrix& background) {
  check_inputs(model, x, background);
  if (mask >> x.size() != 0) {
    throw Error(ErrorCode::kInvalidParam, "coalition names a feature outside the model");
  }
  std::vector<double> z(x.size());
  return masked_mean(model, x, mask, background, z);
}

std::vector<double> coalition_table(const Regressor& model, std::span<const double> x,
                                    const Matrix& background) {
  check_inputs(model, x, background);
  const std::size_t full = std::size_t{1} << x.size();
  std::vector<double> table(full);
  std::vector<double> row(full);
  if (model.hybrid_predictions(x, background.row(0), row)) {
    // Same arithmetic as masked_mean, one background row at a time.
    const std::vector<double> shift = row;
    std::vector<double> sum(full, 0.0);
    for (std::size_t r = 0; r < background.rows; ++r) {
      if (r > 0) model.hybrid_predictions(x, background.row(r), row);
      for (std::size_t m = 0; m < full; ++m) sum[m] += row[m] - shift[m];
    }
    const auto n = static_cast<double>(background.rows);
    for (std::size_t m = 0; m < full; ++m) table[m] = shift[m] + sum[m] / n;
    return table;
  }
  std::vector<double> z(x.size());
  for (std::uint32_t mask = 0; mask < full; ++mask) {
    table[mask] = masked_mean(model, x, mask, background, z);
  }
  return table;
}

std::uint64_t shapley_weight_denominator(std::size_t q, std::size_t s) {
  if (q == 0 || s >= q || q > kMaxShapFeatures) {
    throw Error(ErrorCode::kInvalidParam, "weight requested outside 0 <= s < q <= 15");
  }
  return static_cast<std::uint64_t>(q) * binomial(q - 1, s);
}

double shapley_weight(std::size_t q, std::size_t s) {
  return 1.0 / static_cast<double>(shapley_weight_denominator(q, s));
}

ShapExplanation shap_exact(const Regressor& model, std::span<const double> x,
                           const Matrix& background, std::string key) {
  check_inputs(model, x, background);
  const std::size_t q = x.size();
  const std::vector<double> table = coalition_table(model, x, background);
  std::vector<double> weight(q);
  for (std::size_t s = 0; s < q; ++s) weight[s] = shapley_weight(q, s);

  ShapExplanation e;
  e.base = table.front();
  e.fx = table.back();
  e.x.assign(x.begin(), x.end());
  e.key = std::move(key);
  e.phi.assign(q, 0.0);
  for (std::size_t i = 0; i < q; ++i) {
    const std::uint32_t bit = 1u << i;
    double acc = 0.0;
    for (std::uint32_t mask = 0; mask < table.size(); ++mask) {
      if (mask & bit) continue;
      const double delta = table[mask | bit] - table[mask];
      if (delta != 0.0) acc += weight[static_cast<std::size_t>(std::popcount(mask))] * delta;
    }
    e.phi[i] = acc;
  }
  return e;
}

std::vector<ShapExplanation> shap_explain(const Regressor& model, const Matrix& instances,
                                          const Matrix& background,
                                          const std::vector<std::string>& keys,
                                          std::size_t max_threads) {
  if (!keys.empty() && keys.size() != instances.rows) {
    throw Error(ErrorCode::kDimensionMismatch, "one key per instance required");
  }
  std::vector<ShapExplanation> out(instances.rows);
  parallel_for(
      instances.rows,
      [&](std::size_t r) {
        out[r] = shap_exact(model, instances.row(r), background,
                            keys.empty() ? std::to_string(r) : keys[r]);
      },
      max_threads);
  return out;
}

GlobalImportance shap_global(std::span<const ShapExplanation> explanations) {
  if (explanations.empty()) throw Error(ErrorCode::kEmptyData, "no explanations to aggregate");
  const std::size_t q = explanations.front().phi.size();
  GlobalImportance g;
  g.importance.assign(q, 0.0);
  for (const auto& e : explanations) {
    if (e.phi.size() != q) throw Error(ErrorCode::kDimensionMismatch, "ragged explanations");
    for (std::size_t i = 0; i < q; ++i) g.importance[i] += std::abs(e.phi[i]);
  }
  for (double& v : g.importance) v /= static_cast<double>(explanations.size());
  const double total = std::accumulate(g.importance.begin(), g.importance.end(), 0.0);
  g.undefined = !(total > 0.0);
  g.percentage.assign(q, 0.0);
  if (!g.undefined) {
    for (std::size_t i = 0; i < q; ++i) g.percentage[i] = 100.0 * g.importance[i] / total;
  }
  g.ranking.resize(q);
  std::iota(g.ranking.begin(), g.ranking.end(), 0);
  std::stable_sort(g.ranking.begin(), g.ranking.end(), [&](std::size_t a, std::size_t b) {
    return g.importance[a] > g.importance[b];
  });
  return g;
}

std::vector<std::size_t> cluster_order(std::span<const ShapExplanation> explanations) {
  const std::size_t n = explanations.size();
  if (n == 0) return {};
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < explanations[a].phi.size(); ++i) {
        const double d = explanations[a].phi[i] - explanations[b].phi[i];
        s += d * d;
      }
      dist[a][b] = dist[b][a] = std::sqrt(s);
    }
  }
  // Clusters are identified by their slot; slot = smallest original index.
  std::vector<std::vector<std::size_t>> members(n);
  std::vector<bool> alive(n, true);
  for (std::size_t a = 0; a < n; ++a) members[a] = {a};
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t best_a = 0, best_b = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < n; ++a) {
      if (!alive[a]) continue;
      for (std::size_t b = a + 1; b < n; ++b) {
        if (alive[b] && dist[a][b] < best) {
          best = dist[a][b];
          best_a = a;
          best_b = b;
        }
      }
    }
    const double wa = static_cast<double>(members[best_a].size());
    const double wb = static_cast<double>(members[best_b].size());
    for (std::size_t c = 0; c < n; ++c) {
      if (!alive[c] || c == best_a || c == best_b) continue;
      const double d = (wa * dist[best_a][c] + wb * dist[best_b][c]) / (wa + wb);
      dist[best_a][c] = dist[c][best_a] = d;
    }
    members[best_a].insert(members[best_a].end(), members[best_b].begin(),
                           members[best_b].end());
    members[best_b].clear();
    alive[best_b] = false;
  }
  return members[0];
}

std::vector<std::string> default_feature_names(std::size_t q) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < q; ++i) {
    names.push_back(q == kFeatureCount ? std::string(feature_name(kAllFeatures[i]))
                                       : "x" + std::to_string(i + 1));
  }
  return names;
}

void shap_export_summary(std::ostream& out, std::span<const ShapExplanation> explanations,
                         const std::vector<std::string>& feature_names) {
  const GlobalImportance g = shap_global(explanations);
  if (feature_names.size() != g.importance.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "one name per feature required");
  }
  out << "rank,feature,instance,shap_value,feature_value\n";
  for (std::size_t rank = 0; rank < g.ranking.size(); ++rank) {
    const std::size_t f = g.ranking[rank];
    for (const auto& e : explanations) {
      out << rank + 1 << ',' << feature_names[f] << ',' << e.key << ','
          << format_double(e.phi[f]) << ',' << format_double(e.x[f]) << '\n';
    }
  }
}

void shap_export_heatmap(std::ostream& out, std::span<const ShapExplanation> explanations,
                         const std::vector<std::string>& feature_names) {
  const GlobalImportance g = shap_global(explanations);
  if (feature_names.size() != g.importance.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "one name per feature required");
  }
  const std::vector<std::size_t> order = cluster_order(explanations);
  out << "feature";
  for (std::size_t c : order) out << ',' << explanations[c].key;
  out << '\n';
  for (std::size_t f : g.ranking) {
    out << feature_names[f];
    for (std::size_t c : order) out << ',' << format_double(explanations[c].phi[f]);
    out << '\n';
  }
  out << "f(x)";
  for (std::size_t c : order) out << ',' << format_double(explanations[c].fx);
  out << "\n\nglobal_importance\nfeature,mean_abs_shap,percentage\n";
  for (std::size_t f : g.ranking) {
    out << feature_names[f] << ',' << format_double(g.importance[f]) << ','
        << (g.undefined ? std::string("undefined") : format_double(g.percentage[f])) << '\n';
  }
}

}  // namespace rwt
