#include "rwt/model_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rwt/error.hpp"
#include "rwt/kan.hpp"
#include "rwt/mlp.hpp"
#include "rwt/trees.hpp"

namespace rwt {

namespace {

using nlohmann::ordered_json;

constexpr std::string_view kFormatTag = "rwt-model";

ordered_json tree_json(const DecisionTree& tree) {
  ordered_json nodes = ordered_json::array();
  for (const TreeNode& n : tree.nodes()) {
    nodes.push_back({{"feature", n.feature},
                     {"threshold", n.threshold},
                     {"left", n.left},
                     {"right", n.right},
                     {"value", n.value},
                     {"n_samples", n.n_samples}});
  }
  return {{"input_dim", tree.input_dim()}, {"nodes", nodes}};
}

DecisionTree tree_from(const ordered_json& j) {
  const auto dim = j.at("input_dim").get<std::size_t>();
  std::vector<TreeNode> nodes;
  for (const auto& n : j.at("nodes")) {
    TreeNode t;
    t.feature = n.at("feature").get<int>();
    t.threshold = n.at("threshold").get<double>();
    t.left = n.at("left").get<int>();
    t.right = n.at("right").get<int>();
    t.value = n.at("value").get<double>();
    t.n_samples = n.at("n_samples").get<std::size_t>();
    nodes.push_back(t);
  }
  // Children must point forward so traversal always terminates.
  const auto size = static_cast<int>(nodes.size());
  for (int i = 0; i < size; ++i) {
    const TreeNode& t = nodes[static_cast<std::size_t>(i)];
    if (t.is_leaf()) continue;
    if (static_cast<std::size_t>(t.feature) >= dim || t.left <= i || t.right <= i ||
        t.left >= size || t.right >= size) {
      throw Error(ErrorCode::kSchemaMismatch, "tree node " + std::to_string(i) + " is malformed");
    }
  }
  return DecisionTree(std::move(nodes), dim);
}

ordered_json trees_json(const std::vector<DecisionTree>& trees) {
  ordered_json out = ordered_json::array();
  for (const auto& t : trees) out.push_back(tree_json(t));
  return out;
}

std::vector<DecisionTree> trees_from(const ordered_json& j, std::size_t dim) {
  std::vector<DecisionTree> out;
  for (const auto& t : j) {
    out.push_back(tree_from(t));
    if (out.back().input_dim() != dim) {
      throw Error(ErrorCode::kSchemaMismatch, "member tree width differs from the ensemble");
    }
  }
  return out;
}

ordered_json body(const Regressor& model) {
  if (const auto* t = dynamic_cast<const DecisionTree*>(&model)) return tree_json(*t);
  if (const auto* f = dynamic_cast<const Forest*>(&model)) {
    const ForestParams& p = f->params();
    return {{"input_dim", f->input_dim()},
            {"params",
             {{"n_estimators", p.n_estimators},
              {"max_features", p.max_features},
              {"max_depth", p.max_depth},
              {"min_samples_leaf", p.min_samples_leaf},
              {"bootstrap", p.bootstrap},
              {"seed", p.seed}}},
            {"trees", trees_json(f->trees())}};
  }
  if (const auto* b = dynamic_cast<const BoostedEnsemble*>(&model)) {
    const BoostParams& p = b->params();
    return {{"input_dim", b->input_dim()},
            {"base_score", b->base_score()},
            {"params",
             {{"n_estimators", p.n_estimators},
              {"learning_rate", p.learning_rate},
              {"max_depth", p.max_depth},
              {"gamma", p.gamma},
              {"colsample_bytree", p.colsample_bytree},
              {"min_child_weight", p.min_child_weight},
              {"reg_lambda", p.reg_lambda},
              {"reg_alpha", p.reg_alpha},
              {"seed", p.seed}}},
            {"trees", trees_json(b->trees())}};
  }
  if (const auto* m = dynamic_cast<const MlpModel*>(&model)) {
    ordered_json layers = ordered_json::array();
    for (const MlpLayer& l : m->layers()) {
      layers.push_back(
          {{"in", l.in}, {"out", l.out}, {"weights", l.weights}, {"biases", l.biases}});
    }
    return {{"dropout", m->dropout_rate()}, {"layers", layers}};
  }
  if (const auto* k = dynamic_cast<const KanNetwork*>(&model)) {
    ordered_json edges = ordered_json::array();
    for (const KanEdge& e : k->edges()) edges.push_back({{"w_lin", e.w_lin}, {"coef", e.coef}});
    return {{"layout", k->layout()}, {"grid", k->grid_size()}, {"edges", edges}};
  }
  throw Error(ErrorCode::kInvalidParam, "no serializer for model kind " + model.kind());
}

std::unique_ptr<Regressor> build(const std::string& kind, const ordered_json& j) {
  if (kind == "tree") return std::make_unique<DecisionTree>(tree_from(j));
  if (kind == "forest") {
    const auto dim = j.at("input_dim").get<std::size_t>();
    const auto& p = j.at("params");
    ForestParams fp;
    fp.n_estimators = p.at("n_estimators").get<std::size_t>();
    fp.max_features = p.at("max_features").get<std::size_t>();
    fp.max_depth = p.at("max_depth").get<int>();
    fp.min_samples_leaf = p.at("min_samples_leaf").get<std::size_t>();
    fp.bootstrap = p.at("bootstrap").get<bool>();
    fp.seed = p.at("seed").get<std::uint64_t>();
    return std::make_unique<Forest>(trees_from(j.at("trees"), dim), fp, dim);
  }
  if (kind == "boosted") {
    const auto dim = j.at("input_dim").get<std::size_t>();
    const auto& p = j.at("params");
    BoostParams bp;
    bp.n_estimators = p.at("n_estimators").get<std::size_t>();
    bp.learning_rate = p.at("learning_rate").get<double>();
    bp.max_depth = p.at("max_depth").get<int>();
    bp.gamma = p.at("gamma").get<double>();
    bp.colsample_bytree = p.at("colsample_bytree").get<double>();
    bp.min_child_weight = p.at("min_child_weight").get<double>();
    bp.reg_lambda = p.at("reg_lambda").get<double>();
    bp.reg_alpha = p.at("reg_alpha").get<double>();
    bp.seed = p.at("seed").get<std::uint64_t>();
    return std::make_unique<BoostedEnsemble>(j.at("base_score").get<double>(),
                                             trees_from(j.at("trees"), dim), bp, dim);
  }
  if (kind == "mlp") {
    std::vector<MlpLayer> layers;
    for (const auto& l : j.at("layers")) {
      layers.push_back({l.at("in").get<std::size_t>(), l.at("out").get<std::size_t>(),
                        l.at("weights").get<std::vector<double>>(),
                        l.at("biases").get<std::vector<double>>()});
    }
    return std::make_unique<MlpModel>(std::move(layers), j.at("dropout").get<double>());
  }
  if (kind == "kan") {
    std::vector<KanEdge> edges;
    for (const auto& e : j.at("edges")) {
      edges.push_back({e.at("w_lin").get<double>(), e.at("coef").get<std::vector<double>>()});
    }
    return std::make_unique<KanNetwork>(j.at("layout").get<std::vector<std::size_t>>(),
                                        j.at("grid").get<int>(), std::move(edges));
  }
  throw Error(ErrorCode::kSchemaMismatch, "unknown model kind '" + kind + "'");
}

}  // namespace

std::string model_to_json(const Regressor& model) {
  ordered_json doc = {{"format", kFormatTag}, {"version", kModelFormatVersion},
                      {"kind", model.kind()}};
  doc.update(body(model));
  return doc.dump();
}

std::unique_ptr<Regressor> model_from_json(std::string_view text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParseError, std::string("model file: ") + e.what());
  }
  try {
    if (!doc.is_object() || doc.value("format", "") != kFormatTag) {
      throw Error(ErrorCode::kSchemaMismatch, "not a model document");
    }
    if (doc.value("version", -1) != kModelFormatVersion) {
      throw Error(ErrorCode::kSchemaMismatch, "unsupported model format version");
    }
    return build(doc.at("kind").get<std::string>(), doc);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaMismatch, std::string("model file: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kSchemaMismatch) throw;
    throw Error(ErrorCode::kSchemaMismatch, std::string("model file: ") + e.what());
  }
}

void save_model(const std::string& path, const Regressor& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  out << model_to_json(model) << '\n';
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path);
}

std::unique_ptr<Regressor> load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFileNotFound, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace rwt
