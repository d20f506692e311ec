#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "rwt/error.hpp"
#include "rwt/mlp.hpp"
#include "rwt/rng.hpp"

namespace rwt {
namespace {

TEST(MlpInit, DeterministicWithZeroBiases) {
  const auto layout = paper_mlp_layout();
  MlpModel a = mlp_init(layout, 3);
  MlpModel b = mlp_init(layout, 3);
  EXPECT_EQ(a.parameters(), b.parameters());
  EXPECT_EQ(a.parameter_count(), 10u * 48 + 48 + 48 * 48 + 48 + 48 + 1);
  for (const auto& layer : a.layers()) {
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.in));
    for (double bias : layer.biases) EXPECT_EQ(bias, 0.0);
    for (double w : layer.weights) EXPECT_LE(std::abs(w), limit);
  }
  EXPECT_NE(mlp_init(layout, 4).parameters(), a.parameters());
}

TEST(MlpInit, RejectsBadLayouts) {
  for (const std::vector<std::size_t>& bad :
       {std::vector<std::size_t>{10, 0, 1}, {10}, {10, 4, 2}}) {
    try {
      mlp_init(bad, 1);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidLayout);
    }
  }
}

TEST(MlpForward, ZeroNetworkOutputsZero) {
  MlpModel m = mlp_init(paper_mlp_layout(), 1);
  m.set_parameters(std::vector<double>(m.parameter_count(), 0.0));
  Rng rng(2);
  for (int i = 0; i < 20; ++i) {
    std::vector<double> x(10);
    for (double& v : x) v = rng.uniform(-5, 5);
    EXPECT_EQ(mlp_forward(m, x), 0.0);
  }
}

TEST(MlpForward, SingleLinearLayerSumsInputs) {
  MlpModel m({MlpLayer{4, 1, {1, 1, 1, 1}, {0}}}, 0.0);
  EXPECT_DOUBLE_EQ(mlp_forward(m, std::vector<double>{0.5, 1.5, -2.0, 3.0}), 3.0);
}

TEST(MlpForward, ZeroDropoutTrainModeMatchesInference) {
  const std::vector<std::size_t> layout = {3, 5, 4, 1};
  MlpModel m = mlp_init(layout, 7, 0.0);
  const std::vector<double> x = {0.2, 0.9, 0.4};
  EXPECT_EQ(mlp_forward(m, x, ForwardMode::training(11)), mlp_forward(m, x));
}

TEST(MlpForward, DimensionMismatch) {
  MlpModel m = mlp_init(paper_mlp_layout(), 1);
  try {
    mlp_forward(m, std::vector<double>(9, 0.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
}

TEST(MlpForward, DropoutExpectationMatchesInference) {
  const std::vector<std::size_t> layout = {4, 16, 1};
  MlpModel m = mlp_init(layout, 21, 0.1);
  const std::vector<double> x = {0.3, 0.7, 0.1, 0.9};
  const std::vector<double> infer = mlp_pre_output(m, x);
  std::vector<double> mean(infer.size(), 0.0);
  const int masks = 20000;
  for (int s = 0; s < masks; ++s) {
    const auto a = mlp_pre_output(m, x, ForwardMode::training(static_cast<std::uint64_t>(s)));
    for (std::size_t i = 0; i < a.size(); ++i) mean[i] += a[i] / masks;
  }
  for (std::size_t i = 0; i < infer.size(); ++i) {
    EXPECT_NEAR(mean[i], infer[i], 0.01 * std::max(std::abs(infer[i]), 1e-12)) << i;
  }
}

class MlpTraining : public ::testing::Test {
 protected:
  void SetUp() override {
    Rng rng(33);
    x = Matrix(64, 2);
    y.resize(64);
    for (std::size_t i = 0; i < 64; ++i) {
      x(i, 0) = rng.uniform();
      x(i, 1) = rng.uniform();
      y[i] = 0.3 + 0.5 * x(i, 0) - 0.2 * x(i, 1);
    }
  }
  Matrix x;
  std::vector<double> y;
};

TEST_F(MlpTraining, FitsNoiselessLinearTarget) {
  const std::vector<std::size_t> layout = {2, 8, 1};
  MlpTrainConfig cfg;
  cfg.learning_rate = 0.05;
  cfg.batch_size = 8;
  auto result = mlp_train(mlp_init(layout, 5, 0.0), x, y, cfg);
  ASSERT_EQ(result.loss_trace.size(), 1000u);
  EXPECT_LT(result.loss_trace.back(), 1e-3);
  for (double p : result.model.parameters()) EXPECT_TRUE(std::isfinite(p));
}

TEST_F(MlpTraining, ZeroLearningRateLeavesParametersUnchanged) {
  const std::vector<std::size_t> layout = {2, 6, 1};
  MlpModel init = mlp_init(layout, 8);
  MlpTrainConfig cfg;
  cfg.epochs = 20;
  cfg.learning_rate = 0.0;
  auto result = mlp_train(init, x, y, cfg);
  EXPECT_EQ(result.model.parameters(), init.parameters());
  for (double loss : result.loss_trace) EXPECT_EQ(loss, result.loss_trace.front());
}

TEST_F(MlpTraining, IdenticalSeedsGiveIdenticalTraces) {
  const std::vector<std::size_t> layout = {2, 6, 6, 1};
  MlpTrainConfig cfg;
  cfg.epochs = 30;
  auto a = mlp_train(mlp_init(layout, 9), x, y, cfg);
  auto b = mlp_train(mlp_init(layout, 9), x, y, cfg);
  EXPECT_EQ(a.loss_trace, b.loss_trace);
}

TEST_F(MlpTraining, HugeLearningRateDiverges) {
  const std::vector<std::size_t> layout = {2, 6, 1};
  MlpTrainConfig cfg;
  cfg.epochs = 200;
  cfg.learning_rate = 1e6;
  try {
    mlp_train(mlp_init(layout, 9, 0.0), x, y, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDiverged);
  }
}

TEST(MlpTrainErrors, EmptyData) {
  Matrix empty(0, 2);
  EXPECT_THROW(mlp_train(mlp_init(std::vector<std::size_t>{2, 3, 1}, 1), empty, {}, {}), Error);
}

// Central-difference reference computed independently of the checker.
TEST(MlpGradient, MatchesIndependentFiniteDifferences) {
  const std::vector<std::size_t> layout = {3, 4, 1};
  MlpModel m = mlp_init(layout, 12, 0.0);
  const std::vector<double> x = {0.3, -0.6, 0.8};
  const double y = 0.25;
  const auto g = mlp_gradient(m, x, y);
  auto params = m.parameters();
  const double h = 1e-6;
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto up = params, down = params;
    up[i] += h;
    down[i] -= h;
    MlpModel mu = m, md = m;
    mu.set_parameters(up);
    md.set_parameters(down);
    const double fu = mlp_forward(mu, x) - y, fd = mlp_forward(md, x) - y;
    EXPECT_NEAR(g[i], (0.5 * fu * fu - 0.5 * fd * fd) / (2 * h), 1e-6) << i;
  }
}

TEST(MlpGradcheck, RandomNetworksPass) {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::size_t> layout = {1 + rng.below(5)};
    const std::size_t hidden = 1 + rng.below(2);
    for (std::size_t h = 0; h < hidden; ++h) layout.push_back(1 + rng.below(8));
    layout.push_back(1);
    MlpModel m = mlp_init(layout, rng.next(), 0.0);
    ASSERT_LE(m.parameter_count(), 200u);
    std::vector<double> x(layout.front());
    for (double& v : x) v = rng.uniform();
    const double err = mlp_gradcheck(m, x, rng.uniform(), 1e-5);
    EXPECT_LT(err, 1e-4) << "trial " << trial;
  }
}

TEST(MlpGradcheck, ZeroGradientPointAndRepeatability) {
  MlpModel m = mlp_init(std::vector<std::size_t>{3, 4, 1}, 1, 0.0);
  m.set_parameters(std::vector<double>(m.parameter_count(), 0.0));
  const std::vector<double> x = {0.1, 0.2, 0.3};
  EXPECT_NEAR(mlp_gradcheck(m, x, 0.0, 1e-5), 0.0, 1e-10);
  MlpModel r = mlp_init(std::vector<std::size_t>{3, 4, 1}, 2, 0.0);
  EXPECT_EQ(mlp_gradcheck(r, x, 0.4), mlp_gradcheck(r, x, 0.4));
}

TEST(MlpGradcheck, RejectsBadStep) {
  MlpModel m = mlp_init(std::vector<std::size_t>{2, 2, 1}, 1);
  EXPECT_THROW(mlp_gradcheck(m, std::vector<double>{0, 0}, 0, 0.5), Error);
}

}  // namespace
}  // namespace rwt
