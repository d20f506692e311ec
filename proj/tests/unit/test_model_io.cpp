#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "rwt/error.hpp"
#include "rwt/kan.hpp"
#include "rwt/mlp.hpp"
#include "rwt/model_io.hpp"
#include "rwt/rng.hpp"
#include "rwt/trees.hpp"

namespace rwt {
namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (double& v : m.data) v = rng.uniform();
  return m;
}

std::vector<double> targets(const Matrix& x) {
  std::vector<double> y(x.rows);
  for (std::size_t i = 0; i < x.rows; ++i) y[i] = x(i, 0) * 0.7 - x(i, 1) * x(i, 2) + 0.1;
  return y;
}

void expect_same_predictions(const Regressor& a, const Regressor& b) {
  ASSERT_EQ(a.kind(), b.kind());
  ASSERT_EQ(a.input_dim(), b.input_dim());
  const Matrix probe = random_matrix(50, a.input_dim(), 99);
  for (std::size_t i = 0; i < probe.rows; ++i) {
    EXPECT_EQ(a.predict(probe.row(i)), b.predict(probe.row(i)));
  }
}

void expect_round_trip(const Regressor& model) {
  const std::string text = model_to_json(model);
  const auto back = model_from_json(text);
  expect_same_predictions(model, *back);
  EXPECT_EQ(model_to_json(*back), text);
}

TEST(ModelIo, TreeRoundTrip) {
  const Matrix x = random_matrix(60, 3, 1);
  TreeParams p;
  p.max_depth = 4;
  expect_round_trip(tree_fit(x, targets(x), p));
}

TEST(ModelIo, ForestRoundTrip) {
  const Matrix x = random_matrix(60, 3, 2);
  ForestParams p;
  p.n_estimators = 5;
  p.max_features = 2;
  p.seed = 9;
  const Forest f = rf_fit(x, targets(x), p);
  expect_round_trip(f);
  const auto back = model_from_json(model_to_json(f));
  const auto& g = dynamic_cast<const Forest&>(*back);
  EXPECT_EQ(g.params().seed, 9u);
  EXPECT_EQ(g.params().max_features, 2u);
}

TEST(ModelIo, BoostedRoundTrip) {
  const Matrix x = random_matrix(60, 3, 3);
  BoostParams p;
  p.n_estimators = 20;
  p.learning_rate = 0.1;
  p.max_depth = 3;
  const BoostedEnsemble b = gbm_fit(x, targets(x), p);
  expect_round_trip(b);
  const auto back = model_from_json(model_to_json(b));
  EXPECT_EQ(dynamic_cast<const BoostedEnsemble&>(*back).base_score(), b.base_score());
}

TEST(ModelIo, MlpRoundTrip) {
  const MlpModel m = mlp_init(std::vector<std::size_t>{3, 5, 1}, 4, 0.25);
  expect_round_trip(m);
  const auto back = model_from_json(model_to_json(m));
  EXPECT_EQ(dynamic_cast<const MlpModel&>(*back).dropout_rate(), 0.25);
}

TEST(ModelIo, KanRoundTrip) {
  KanNetwork k = kan_init(std::vector<std::size_t>{3, 2, 1}, 6, 5);
  auto params = k.parameters();
  Rng rng(6);
  for (double& v : params) v += rng.uniform(-0.3, 0.3);
  k.set_parameters(params);
  expect_round_trip(k);
  const auto back = model_from_json(model_to_json(k));
  EXPECT_EQ(dynamic_cast<const KanNetwork&>(*back).grid_size(), 6);
}

TEST(ModelIo, FileRoundTrip) {
  const MlpModel m = mlp_init(std::vector<std::size_t>{2, 3, 1}, 8);
  const std::string path = ::testing::TempDir() + "rwt_model_io.json";
  save_model(path, m);
  expect_same_predictions(m, *load_model(path));
  std::remove(path.c_str());
  try {
    load_model(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFileNotFound);
  }
}

TEST(ModelIo, RejectsBadDocuments) {
  const auto code_of = [](std::string_view text) {
    try {
      model_from_json(text);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kNotFound;
  };
  EXPECT_EQ(code_of("{not json"), ErrorCode::kParseError);
  EXPECT_EQ(code_of(R"({"format":"other","version":1,"kind":"mlp"})"),
            ErrorCode::kSchemaMismatch);
  EXPECT_EQ(code_of(R"({"format":"rwt-model","version":7,"kind":"mlp"})"),
            ErrorCode::kSchemaMismatch);
  EXPECT_EQ(code_of(R"({"format":"rwt-model","version":1,"kind":"svm"})"),
            ErrorCode::kSchemaMismatch);
  EXPECT_EQ(code_of(R"({"format":"rwt-model","version":1,"kind":"tree","input_dim":2,
                        "nodes":[{"feature":0,"threshold":0.5,"left":5,"right":6,
                                  "value":0,"n_samples":1}]})"),
            ErrorCode::kSchemaMismatch);
  EXPECT_EQ(code_of(R"({"format":"rwt-model","version":1,"kind":"mlp","dropout":0.1,
                        "layers":[{"in":2,"out":1,"weights":[1],"biases":[0]}]})"),
            ErrorCode::kSchemaMismatch);
}

}  // namespace
}  // namespace rwt
