#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rwt/core_data.hpp"
#include "rwt/regressor.hpp"

namespace rwt {

// Split search and leaf values follow the second-order boosting objective
// with squared loss (gradient = prediction - target, hessian = 1):
//   leaf  w    = T(G) / (H + l2),   T = soft-threshold by l1
//   gain       = 0.5 * [T(G_L)^2/(H_L+l2) + T(G_R)^2/(H_R+l2) - T(G)^2/(H+l2)]
// With l1 = l2 = 0 the leaf is the mean target and the gain is half the SSE
// reduction. A split is kept only when gain > gamma.
//
// Candidates are midpoints between consecutive distinct sorted values of a
// feature; rows with x <= threshold go left. The winner maximizes gain; gains
// within kTieTolerance * (1 + sum of squared node targets) / 2 of the best are
// ties, broken by lower feature index, then lower threshold.
struct TreeParams {
  int max_depth = -1;  // < 0: unlimited; 0: single leaf
  std::size_t min_samples_leaf = 1;
  std::size_t max_features = 0;  // candidates per split; 0 = all allowed
  double l2 = 0.0;
  double l1 = 0.0;
  double gamma = 0.0;
  double min_child_weight = 0.0;
};

inline constexpr double kTieTolerance = 1e-10;

struct TreeNode {
  int feature = -1;  // 0-based column; -1 for leaves
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf prediction (also kept on internal nodes)
  std::size_t n_samples = 0;

  bool is_leaf() const { return feature < 0; }
};

class DecisionTree final : public Regressor {
 public:
  DecisionTree() = default;
  DecisionTree(std::vector<TreeNode> nodes, std::size_t input_dim);

  std::size_t input_dim() const override { return input_dim_; }
  double predict(std::span<const double> x) const override;
  std::string kind() const override { return "tree"; }

  bool hybrid_predictions(std::span<const double> x, std::span<const double> b,
                          std::span<double> out) const override;

  // Unchecked traversal for hot loops.
  double predict_unchecked(const double* x) const;
  // Adds this tree's prediction at every hybrid of x and b to acc[mask].
  void accumulate_hybrid(const double* x, const double* b, std::span<double> acc) const;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  int depth() const;
  std::size_t leaf_count() const;

 private:
  std::vector<TreeNode> nodes_;
  std::size_t input_dim_ = 0;
};

// Fits a regression tree to `targets` on the given rows of `x` (a row may
// appear several times, e.g. in a bootstrap sample). `features` restricts the
// candidate columns; empty means all. `seed` drives max_features sampling.
// Throws Error(kEmptyData) when there are no rows.
DecisionTree tree_fit(const Matrix& x, std::span<const double> targets,
                      const TreeParams& params, std::uint64_t seed = 0,
                      std::span<const std::size_t> rows = {},
                      std::span<const std::size_t> features = {});

struct ForestParams {
  std::size_t n_estimators = 100;
  std::size_t max_features = 4;
  int max_depth = 30;
  std::size_t min_samples_leaf = 1;
  bool bootstrap = true;  // n draws with replacement per tree
  std::uint64_t seed = 42;

  // 100 trees, 4 candidate features per split, depth 30.
  static ForestParams paper() { return {}; }
};

class Forest final : public Regressor {
 public:
  Forest(std::vector<DecisionTree> trees, ForestParams params, std::size_t input_dim);

  std::size_t input_dim() const override { return input_dim_; }
  double predict(std::span<const double> x) const override;
  std::string kind() const override { return "forest"; }
  bool hybrid_predictions(std::span<const double> x, std::span<const double> b,
                          std::span<double> out) const override;

  const std::vector<DecisionTree>& trees() const { return trees_; }
  const ForestParams& params() const { return params_; }

 private:
  std::vector<DecisionTree> trees_;
  ForestParams params_;
  std::size_t input_dim_;
};

// Tree b uses Rng(derive_seed(seed, b)) for its bootstrap and feature
// sampling, so serial and parallel fits are identical.
Forest rf_fit(const Matrix& x, std::span<const double> y, const ForestParams& params);

struct BoostParams {
  std::size_t n_estimators = 600;
  double learning_rate = 0.01;
  int max_depth = 9;
  double gamma = 0.3;
  double colsample_bytree = 1.0;
  double min_child_weight = 1.0;
  double reg_lambda = 1.0;
  double reg_alpha = 0.0;
  std::uint64_t seed = 42;

  // 600 stages, learning rate 0.01, depth 9, gamma 0.3, column ratio 1.0.
  static BoostParams paper() { return {}; }
};

class BoostedEnsemble final : public Regressor {
 public:
  BoostedEnsemble(double base_score, std::vector<DecisionTree> trees,
                  BoostParams params, std::size_t input_dim);

  std::size_t input_dim() const override { return input_dim_; }
  // base_score + learning_rate * sum_j f_j(x)
  double predict(std::span<const double> x) const override;
  std::string kind() const override { return "boosted"; }
  bool hybrid_predictions(std::span<const double> x, std::span<const double> b,
                          std::span<double> out) const override;

  double base_score() const { return base_score_; }
  const std::vector<DecisionTree>& trees() const { return trees_; }
  const BoostParams& params() const { return params_; }

 private:
  double base_score_;
  std::vector<DecisionTree> trees_;
  BoostParams params_;
  std::size_t input_dim_;
};

// Squared-error boosting. When `mse_trace` is given it receives the training
// MSE after each stage (entry j = after j + 1 trees).
BoostedEnsemble gbm_fit(const Matrix& x, std::span<const double> y,
                        const BoostParams& params,
                        std::vector<double>* mse_trace = nullptr);

}  // namespace rwt
