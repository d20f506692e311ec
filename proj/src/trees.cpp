#include "rwt/trees.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rwt/error.hpp"
#include "rwt/parallel.hpp"
#include "rwt/rng.hpp"

namespace rwt {

namespace {

double soft_threshold(double g, double l1) {
  if (g > l1) return g - l1;
  if (g < -l1) return g + l1;
  return 0.0;
}

struct Candidate {
  double gain;
  int feature;
  double threshold;
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, std::span<const double> targets, const TreeParams& params,
              std::uint64_t seed, std::vector<std::size_t> features)
      : x_(x), t_(targets), p_(params), rng_(seed), features_(std::move(features)) {}

  std::vector<TreeNode> build(std::vector<std::size_t> rows) {
    grow(rows, 0);
    return std::move(nodes_);
  }

 private:
  double score(double g, double h) const {
    const double tg = soft_threshold(g, p_.l1);
    return tg * tg / (h + p_.l2);
  }

  double leaf_value(double g, double h) const {
    return h + p_.l2 > 0.0 ? soft_threshold(g, p_.l1) / (h + p_.l2) : 0.0;
  }

  std::vector<std::size_t> candidate_features() {
    if (p_.max_features == 0 || p_.max_features >= features_.size()) return features_;
    std::vector<std::size_t> pool = features_;
    // Partial Fisher-Yates from the front.
    for (std::size_t i = 0; i < p_.max_features; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng_.below(pool.size() - i));
      std::swap(pool[i], pool[j]);
    }
    pool.resize(p_.max_features);
    std::sort(pool.begin(), pool.end());
    return pool;
  }

  int grow(std::vector<std::size_t>& rows, int depth) {
    double g = 0.0, sumsq = 0.0;
    for (std::size_t r : rows) {
      g += t_[r];
      sumsq += t_[r] * t_[r];
    }
    const double h = static_cast<double>(rows.size());
    const int index = static_cast<int>(nodes_.size());
    TreeNode node;
    node.value = leaf_value(g, h);
    node.n_samples = rows.size();
    nodes_.push_back(node);

    const bool depth_exhausted = p_.max_depth >= 0 && depth >= p_.max_depth;
    if (depth_exhausted || rows.size() < 2 * std::max<std::size_t>(p_.min_samples_leaf, 1)) {
      return index;
    }

    const double parent_score = score(g, h);
    std::vector<Candidate> candidates;
    std::vector<std::pair<double, std::size_t>> sorted(rows.size());
    for (std::size_t f : candidate_features()) {
      for (std::size_t i = 0; i < rows.size(); ++i) sorted[i] = {x_(rows[i], f), rows[i]};
      std::sort(sorted.begin(), sorted.end());
      double gl = 0.0;
      for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        gl += t_[sorted[i].second];
        const double lo = sorted[i].first;
        const double hi = sorted[i + 1].first;
        if (!(lo < hi)) continue;
        const double hl = static_cast<double>(i + 1);
        const double hr = h - hl;
        if (i + 1 < p_.min_samples_leaf || sorted.size() - i - 1 < p_.min_samples_leaf) continue;
        if (hl < p_.min_child_weight || hr < p_.min_child_weight) continue;
        const double gain = 0.5 * (score(gl, hl) + score(g - gl, hr) - parent_score);
        double threshold = 0.5 * (lo + hi);
        if (!(threshold < hi)) threshold = lo;
        candidates.push_back({gain, static_cast<int>(f), threshold});
      }
    }
    if (candidates.empty()) return index;

    double best_gain = candidates.front().gain;
    for (const auto& c : candidates) best_gain = std::max(best_gain, c.gain);
    const double tol = 0.5 * kTieTolerance * (1.0 + sumsq);
    if (!(best_gain > p_.gamma + tol)) return index;
    // Candidates were produced in (feature, threshold) order, so the first
    // one within tolerance of the best wins the tie.
    const Candidate* chosen = nullptr;
    for (const auto& c : candidates) {
      if (c.gain >= best_gain - tol) {
        chosen = &c;
        break;
      }
    }

    std::vector<std::size_t> left, right;
    for (std::size_t r : rows) {
      (x_(r, static_cast<std::size_t>(chosen->feature)) <= chosen->threshold ? left : right)
          .push_back(r);
    }
    nodes_[index].feature = chosen->feature;
    nodes_[index].threshold = chosen->threshold;
    std::vector<std::size_t>().swap(rows);
    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    nodes_[index].left = l;
    nodes_[index].right = r;
    return index;
  }

  const Matrix& x_;
  std::span<const double> t_;
  const TreeParams& p_;
  Rng rng_;
  std::vector<std::size_t> features_;
  std::vector<TreeNode> nodes_;
};

double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

DecisionTree::DecisionTree(std::vector<TreeNode> nodes, std::size_t input_dim)
    : nodes_(std::move(nodes)), input_dim_(input_dim) {
  if (nodes_.empty()) throw Error(ErrorCode::kInvalidParam, "tree without nodes");
}

double DecisionTree::predict_unchecked(const double* x) const {
  const TreeNode* node = &nodes_[0];
  while (!node->is_leaf()) {
    node = &nodes_[static_cast<std::size_t>(
        x[node->feature] <= node->threshold ? node->left : node->right)];
  }
  return node->value;
}

namespace {

struct HybridWalk {
  const std::vector<TreeNode>& nodes;
  const double* x;
  const double* b;
  std::uint32_t full;
  std::span<double> acc;

  // `in` holds features that must come from x, `out` those from b.
  void visit(int index, std::uint32_t in, std::uint32_t out) const {
    const TreeNode& node = nodes[static_cast<std::size_t>(index)];
    if (node.is_leaf()) {
      const std::uint32_t free = full & ~(in | out);
      for (std::uint32_t sub = free;; sub = (sub - 1) & free) {
        acc[in | sub] += node.value;
        if (sub == 0) break;
      }
      return;
    }
    const auto f = static_cast<std::size_t>(node.feature);
    const std::uint32_t bit = 1u << f;
    const int via_x = x[f] <= node.threshold ? node.left : node.right;
    const int via_b = b[f] <= node.threshold ? node.left : node.right;
    if (via_x == via_b || (in & bit)) {
      visit(via_x, in, out);
    } else if (out & bit) {
      visit(via_b, in, out);
    } else {
      visit(via_x, in | bit, out);
      visit(via_b, in, out | bit);
    }
  }
};

void check_hybrid(std::size_t dim, std::span<const double> x, std::span<const double> b,
                  std::span<double> out) {
  check_dimension(dim, x.size());
  check_dimension(dim, b.size());
  if (dim >= 32 || out.size() != (std::size_t{1} << dim)) {
    throw Error(ErrorCode::kDimensionMismatch, "hybrid table must hold 2^q entries");
  }
}

}  // namespace

void DecisionTree::accumulate_hybrid(const double* x, const double* b,
                                     std::span<double> acc) const {
  HybridWalk{nodes_, x, b, static_cast<std::uint32_t>(acc.size() - 1), acc}.visit(0, 0, 0);
}

bool DecisionTree::hybrid_predictions(std::span<const double> x, std::span<const double> b,
                                      std::span<double> out) const {
  check_hybrid(input_dim_, x, b, out);
  std::fill(out.begin(), out.end(), 0.0);
  accumulate_hybrid(x.data(), b.data(), out);
  return true;
}

double DecisionTree::predict(std::span<const double> x) const {
  check_dimension(input_dim_, x.size());
  return predict_unchecked(x.data());
}

int DecisionTree::depth() const {
  std::vector<int> level(nodes_.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (!nodes_[i].is_leaf()) {
      level[static_cast<std::size_t>(nodes_[i].left)] = level[i] + 1;
      level[static_cast<std::size_t>(nodes_[i].right)] = level[i] + 1;
    }
  }
  return deepest;
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(
      nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

DecisionTree tree_fit(const Matrix& x, std::span<const double> targets,
                      const TreeParams& params, std::uint64_t seed,
                      std::span<const std::size_t> rows,
                      std::span<const std::size_t> features) {
  if (x.rows == 0 || targets.empty()) throw Error(ErrorCode::kEmptyData, "no training rows");
  if (x.rows != targets.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "feature rows and targets differ in length");
  }
  if (x.cols == 0) throw Error(ErrorCode::kEmptyData, "no feature columns");
  std::vector<std::size_t> row_list(rows.begin(), rows.end());
  if (row_list.empty()) {
    row_list.resize(x.rows);
    std::iota(row_list.begin(), row_list.end(), 0);
  }
  std::vector<std::size_t> feature_list(features.begin(), features.end());
  if (feature_list.empty()) {
    feature_list.resize(x.cols);
    std::iota(feature_list.begin(), feature_list.end(), 0);
  }
  std::sort(feature_list.begin(), feature_list.end());
  TreeBuilder builder(x, targets, params, seed, std::move(feature_list));
  return DecisionTree(builder.build(std::move(row_list)), x.cols);
}

Forest::Forest(std::vector<DecisionTree> trees, ForestParams params, std::size_t input_dim)
    : trees_(std::move(trees)), params_(params), input_dim_(input_dim) {
  if (trees_.empty()) throw Error(ErrorCode::kInvalidParam, "forest without trees");
}

double Forest::predict(std::span<const double> x) const {
  check_dimension(input_dim_, x.size());
  double sum = 0.0;
  for (const auto& t : trees_) sum += t.predict_unchecked(x.data());
  return sum / static_cast<double>(trees_.size());
}

bool Forest::hybrid_predictions(std::span<const double> x, std::span<const double> b,
                                std::span<double> out) const {
  check_hybrid(input_dim_, x, b, out);
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& t : trees_) t.accumulate_hybrid(x.data(), b.data(), out);
  const auto n = static_cast<double>(trees_.size());
  for (double& v : out) v /= n;
  return true;
}

Forest rf_fit(const Matrix& x, std::span<const double> y, const ForestParams& params) {
  if (x.rows == 0 || y.empty()) throw Error(ErrorCode::kEmptyData, "no training rows");
  if (params.n_estimators == 0) {
    throw Error(ErrorCode::kInvalidParam, "forest needs at least one tree");
  }
  TreeParams tp;
  tp.max_depth = params.max_depth;
  tp.min_samples_leaf = params.min_samples_leaf;
  tp.max_features = params.max_features;
  std::vector<DecisionTree> trees(params.n_estimators);
  parallel_for(params.n_estimators, [&](std::size_t b) {
    Rng rng(derive_seed(params.seed, b));
    std::vector<std::size_t> rows;
    if (params.bootstrap) {
      rows.resize(x.rows);
      for (auto& r : rows) r = static_cast<std::size_t>(rng.below(x.rows));
    }
    trees[b] = tree_fit(x, y, tp, rng.next(), rows);
  });
  return Forest(std::move(trees), params, x.cols);
}

BoostedEnsemble::BoostedEnsemble(double base_score, std::vector<DecisionTree> trees,
                                 BoostParams params, std::size_t input_dim)
    : base_score_(base_score), trees_(std::move(trees)), params_(params),
      input_dim_(input_dim) {}

double BoostedEnsemble::predict(std::span<const double> x) const {
  check_dimension(input_dim_, x.size());
  double sum = 0.0;
  for (const auto& t : trees_) sum += t.predict_unchecked(x.data());
  return base_score_ + params_.learning_rate * sum;
}

bool BoostedEnsemble::hybrid_predictions(std::span<const double> x,
                                         std::span<const double> b,
                                         std::span<double> out) const {
  check_hybrid(input_dim_, x, b, out);
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& t : trees_) t.accumulate_hybrid(x.data(), b.data(), out);
  for (double& v : out) v = base_score_ + params_.learning_rate * v;
  return true;
}

BoostedEnsemble gbm_fit(const Matrix& x, std::span<const double> y,
                        const BoostParams& params, std::vector<double>* mse_trace) {
  if (x.rows == 0 || y.empty()) throw Error(ErrorCode::kEmptyData, "no training rows");
  if (!(params.learning_rate > 0.0 && params.learning_rate <= 1.0)) {
    throw Error(ErrorCode::kInvalidParam, "learning rate must lie in (0, 1]");
  }
  if (params.n_estimators == 0) {
    throw Error(ErrorCode::kInvalidParam, "boosting needs at least one stage");
  }
  if (!(params.colsample_bytree > 0.0 && params.colsample_bytree <= 1.0)) {
    throw Error(ErrorCode::kInvalidParam, "colsample_bytree must lie in (0, 1]");
  }
  if (params.gamma < 0.0 || params.reg_lambda < 0.0 || params.reg_alpha < 0.0 ||
      params.min_child_weight < 0.0) {
    throw Error(ErrorCode::kInvalidParam, "regularization parameters must be >= 0");
  }
  TreeParams tp;
  tp.max_depth = params.max_depth;
  tp.l2 = params.reg_lambda;
  tp.l1 = params.reg_alpha;
  tp.gamma = params.gamma;
  tp.min_child_weight = params.min_child_weight;

  const double base = mean(y);
  std::vector<double> pred(x.rows, base);
  std::vector<double> residual(x.rows);
  const std::size_t n_cols = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(params.colsample_bytree * static_cast<double>(x.cols))));
  std::vector<DecisionTree> trees;
  trees.reserve(params.n_estimators);
  if (mse_trace) mse_trace->clear();
  for (std::size_t j = 0; j < params.n_estimators; ++j) {
    for (std::size_t i = 0; i < x.rows; ++i) residual[i] = y[i] - pred[i];
    Rng rng(derive_seed(params.seed, j));
    std::vector<std::size_t> cols(x.cols);
    std::iota(cols.begin(), cols.end(), 0);
    if (n_cols < x.cols) {
      rng.shuffle(cols);
      cols.resize(n_cols);
    }
    DecisionTree tree = tree_fit(x, residual, tp, rng.next(), {}, cols);
    double sse = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) {
      pred[i] += params.learning_rate * tree.predict_unchecked(&x.data[i * x.cols]);
      sse += (y[i] - pred[i]) * (y[i] - pred[i]);
    }
    if (mse_trace) mse_trace->push_back(sse / static_cast<double>(x.rows));
    trees.push_back(std::move(tree));
  }
  return BoostedEnsemble(base, std::move(trees), params, x.cols);
}

}  // namespace rwt
