#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rwt/core_data.hpp"
#include "rwt/regressor.hpp"

namespace rwt {

inline constexpr std::size_t kMaxShapFeatures = 15;

struct ShapExplanation {
  double base = 0.0;          // F(empty): mean model output over the background
  std::vector<double> phi;    // one attribution per feature
  double fx = 0.0;            // model output at the instance
  std::vector<double> x;      // the explained instance
  std::string key;

  // base + sum(phi); equals fx up to rounding.
  double reconstruction() const;
};

// Uniform subsample of at most max_rows rows, kept in their original order.
// max_rows == 0 keeps everything.
Matrix background_sample(const Matrix& rows, std::size_t max_rows, std::uint64_t seed);

// Mean over background rows b of model(z), where z takes x on the features in
// `mask` (bit i = feature i) and b elsewhere.
double coalition_value(const Regressor& model, std::span<const double> x, std::uint32_t mask,
                       const Matrix& background);

// coalition_value for every mask in [0, 2^q).
std::vector<double> coalition_table(const Regressor& model, std::span<const double> x,
                                    const Matrix& background);

// Exact weight |S|!(q-|S|-1)!/q! written as 1/denominator; the denominator is
// q * C(q-1, s), an integer for every q <= kMaxShapFeatures.
std::uint64_t shapley_weight_denominator(std::size_t q, std::size_t s);
double shapley_weight(std::size_t q, std::size_t s);

// Throws Error(kTooManyFeatures) for q > 15, Error(kEmptyBackground) when the
// background has no rows.
ShapExplanation shap_exact(const Regressor& model, std::span<const double> x,
                           const Matrix& background, std::string key = {});

// shap_exact for every row; results are ordered as the rows regardless of
// thread count.
std::vector<ShapExplanation> shap_explain(const Regressor& model, const Matrix& instances,
                                          const Matrix& background,
                                          const std::vector<std::string>& keys = {},
                                          std::size_t max_threads = 0);

struct GlobalImportance {
  std::vector<double> importance;   // mean |phi_i|, by feature index
  std::vector<double> percentage;   // share of the total, by feature index
  std::vector<std::size_t> ranking; // feature indices, most important first
  bool undefined = false;           // every attribution was zero
};

GlobalImportance shap_global(std::span<const ShapExplanation> explanations);

// Leaf order of an average-linkage, Euclidean agglomerative clustering of the
// phi vectors. Merges take the closest pair (lowest indices on ties); a merged
// cluster lists the part holding the smaller original index first.
std::vector<std::size_t> cluster_order(std::span<const ShapExplanation> explanations);

// Header: rank,feature,instance,shap_value,feature_value. Features appear in
// global rank order, instances in input order.
void shap_export_summary(std::ostream& out, std::span<const ShapExplanation> explanations,
                         const std::vector<std::string>& feature_names);

// One row per feature (global rank order) and one column per instance
// (cluster_order), an f(x) row, then a global_importance block.
void shap_export_heatmap(std::ostream& out, std::span<const ShapExplanation> explanations,
                         const std::vector<std::string>& feature_names);

// feature_name() for the canonical ten features, x1..xq otherwise.
std::vector<std::string> default_feature_names(std::size_t q);

}  // namespace rwt
