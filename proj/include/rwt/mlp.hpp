#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rwt/core_data.hpp"
#include "rwt/regressor.hpp"

namespace rwt {

// Dense layer, weights stored row-major as (out x in).
struct MlpLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;
  std::vector<double> biases;
};

// Fully connected regressor: ReLU on hidden layers, identity output, inverted
// dropout on hidden activations during training only (inputs are never
// dropped).
class MlpModel final : public Regressor {
 public:
  MlpModel(std::vector<MlpLayer> layers, double dropout_rate);

  std::size_t input_dim() const override { return layers_.front().in; }
  double predict(std::span<const double> x) const override;
  std::string kind() const override { return "mlp"; }

  const std::vector<MlpLayer>& layers() const { return layers_; }
  std::vector<std::size_t> layout() const;
  double dropout_rate() const { return dropout_; }
  std::size_t parameter_count() const;

  // Flattened as (weights, biases) per layer, first layer first.
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> values);

 private:
  std::vector<MlpLayer> layers_;
  double dropout_;
};

// Published architecture: inputs -> 48 -> 48 -> 1.
std::vector<std::size_t> paper_mlp_layout(std::size_t inputs = kFeatureCount);

// He-style uniform initialization: W ~ U(-sqrt(6/fan_in), sqrt(6/fan_in)),
// biases 0. Throws Error(kInvalidLayout) for fewer than two layers, a zero
// width, or a final width other than 1.
MlpModel mlp_init(std::span<const std::size_t> layout, std::uint64_t seed,
                  double dropout_rate = 0.1);

struct ForwardMode {
  bool train = false;
  std::uint64_t mask_seed = 0;

  static ForwardMode infer() { return {}; }
  static ForwardMode training(std::uint64_t seed) { return {true, seed}; }
};

double mlp_forward(const MlpModel& model, std::span<const double> x,
                   ForwardMode mode = ForwardMode::infer());

// Activations feeding the output layer (after dropout in training mode).
std::vector<double> mlp_pre_output(const MlpModel& model, std::span<const double> x,
                                   ForwardMode mode = ForwardMode::infer());

struct MlpTrainConfig {
  std::size_t epochs = 1000;
  std::size_t batch_size = 32;
  double learning_rate = 0.01;
  double momentum = 0.0;
  std::uint64_t seed = 42;
};

struct MlpTrainResult {
  MlpModel model;
  std::vector<double> loss_trace;  // full-data inference MSE after each epoch
};

// Mini-batch gradient descent on mean squared error with per-epoch shuffles.
// Throws Error(kEmptyData) or Error(kDiverged) when the loss stops being finite.
MlpTrainResult mlp_train(MlpModel model, const Matrix& x, std::span<const double> y,
                         const MlpTrainConfig& config);

// Backprop gradient of 0.5 * (f(x) - y)^2 in parameters() order, no dropout.
std::vector<double> mlp_gradient(const MlpModel& model, std::span<const double> x,
                                 double y);

// Max over parameters of |g_bp - g_fd| / max(|g_bp| + |g_fd|, 1e-12) using
// central differences of step eps. Hidden units whose pre-activation lies
// within reach of the ReLU kink are first moved off it by shifting their bias.
double mlp_gradcheck(const MlpModel& model, std::span<const double> x, double y,
                     double eps = 1e-5);

}  // namespace rwt
