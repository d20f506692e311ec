#include "rwt/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rwt/error.hpp"
#include "rwt/rng.hpp"

namespace rwt {

namespace {

// Per-sample forward state.
struct Trace {
  std::vector<std::vector<double>> pre;   // pre-activations per layer
  std::vector<std::vector<double>> act;   // act[0] = input, act[l+1] = layer l output
  std::vector<std::vector<double>> keep;  // dropout multipliers per hidden layer
};

void forward_trace(const MlpModel& model, std::span<const double> x, Rng* mask_rng,
                   Trace& t) {
  const auto& layers = model.layers();
  const double p = model.dropout_rate();
  t.pre.resize(layers.size());
  t.act.resize(layers.size() + 1);
  t.keep.resize(layers.size());
  t.act[0].assign(x.begin(), x.end());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const MlpLayer& layer = layers[l];
    const bool hidden = l + 1 < layers.size();
    auto& z = t.pre[l];
    auto& a = t.act[l + 1];
    z.assign(layer.out, 0.0);
    a.assign(layer.out, 0.0);
    t.keep[l].assign(layer.out, 1.0);
    const auto& in = t.act[l];
    for (std::size_t o = 0; o < layer.out; ++o) {
      double sum = layer.biases[o];
      const double* w = &layer.weights[o * layer.in];
      for (std::size_t i = 0; i < layer.in; ++i) sum += w[i] * in[i];
      z[o] = sum;
      if (!hidden) {
        a[o] = sum;
        continue;
      }
      double value = sum > 0.0 ? sum : 0.0;
      if (mask_rng != nullptr && p > 0.0) {
        t.keep[l][o] = mask_rng->uniform() < p ? 0.0 : 1.0 / (1.0 - p);
        value *= t.keep[l][o];
      }
      a[o] = value;
    }
  }
}

// Adds scale * d(output)/d(params) to grad (parameters() layout).
void backward(const MlpModel& model, const Trace& t, double scale,
              std::vector<double>& grad) {
  const auto& layers = model.layers();
  std::vector<std::size_t> offset(layers.size());
  std::size_t pos = 0;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    offset[l] = pos;
    pos += layers[l].weights.size() + layers[l].biases.size();
  }
  std::vector<double> delta = {scale};
  for (std::size_t l = layers.size(); l-- > 0;) {
    const MlpLayer& layer = layers[l];
    double* gw = &grad[offset[l]];
    double* gb = gw + layer.weights.size();
    const auto& in = t.act[l];
    for (std::size_t o = 0; o < layer.out; ++o) {
      gb[o] += delta[o];
      for (std::size_t i = 0; i < layer.in; ++i) gw[o * layer.in + i] += delta[o] * in[i];
    }
    if (l == 0) break;
    std::vector<double> prev(layer.in, 0.0);
    for (std::size_t o = 0; o < layer.out; ++o) {
      for (std::size_t i = 0; i < layer.in; ++i) {
        prev[i] += layer.weights[o * layer.in + i] * delta[o];
      }
    }
    for (std::size_t i = 0; i < layer.in; ++i) {
      prev[i] *= t.pre[l - 1][i] > 0.0 ? t.keep[l - 1][i] : 0.0;
    }
    delta = std::move(prev);
  }
}

// Allocation-free inference used by predict().
double infer(const std::vector<MlpLayer>& layers, std::span<const double> x) {
  thread_local std::vector<double> a, b;
  a.assign(x.begin(), x.end());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const MlpLayer& layer = layers[l];
    const bool hidden = l + 1 < layers.size();
    b.resize(layer.out);
    for (std::size_t o = 0; o < layer.out; ++o) {
      double sum = layer.biases[o];
      const double* w = &layer.weights[o * layer.in];
      for (std::size_t i = 0; i < layer.in; ++i) sum += w[i] * a[i];
      b[o] = hidden && !(sum > 0.0) ? 0.0 : sum;
    }
    a.swap(b);
  }
  return a[0];
}

double inference_mse(const MlpModel& model, const Matrix& x, std::span<const double> y) {
  double sse = 0.0;
  for (std::size_t r = 0; r < x.rows; ++r) {
    const double d = model.predict(x.row(r)) - y[r];
    sse += d * d;
  }
  return sse / static_cast<double>(x.rows);
}

}  // namespace

MlpModel::MlpModel(std::vector<MlpLayer> layers, double dropout_rate)
    : layers_(std::move(layers)), dropout_(dropout_rate) {
  if (layers_.empty()) throw Error(ErrorCode::kInvalidLayout, "network without layers");
  if (!(dropout_ >= 0.0 && dropout_ < 1.0)) {
    throw Error(ErrorCode::kInvalidParam, "dropout rate must lie in [0, 1)");
  }
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const MlpLayer& layer = layers_[l];
    if (layer.in == 0 || layer.out == 0 || layer.weights.size() != layer.in * layer.out ||
        layer.biases.size() != layer.out ||
        (l > 0 && layers_[l - 1].out != layer.in)) {
      throw Error(ErrorCode::kInvalidLayout, "inconsistent layer shapes");
    }
  }
  if (layers_.back().out != 1) {
    throw Error(ErrorCode::kInvalidLayout, "regressor output width must be 1");
  }
}

double MlpModel::predict(std::span<const double> x) const {
  check_dimension(input_dim(), x.size());
  return infer(layers_, x);
}

std::vector<std::size_t> MlpModel::layout() const {
  std::vector<std::size_t> sizes = {layers_.front().in};
  for (const auto& l : layers_) sizes.push_back(l.out);
  return sizes;
}

std::size_t MlpModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.weights.size() + l.biases.size();
  return n;
}

std::vector<double> MlpModel::parameters() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const auto& l : layers_) {
    out.insert(out.end(), l.weights.begin(), l.weights.end());
    out.insert(out.end(), l.biases.begin(), l.biases.end());
  }
  return out;
}

void MlpModel::set_parameters(std::span<const double> values) {
  if (values.size() != parameter_count()) {
    throw Error(ErrorCode::kDimensionMismatch, "parameter vector has the wrong length");
  }
  std::size_t pos = 0;
  for (auto& l : layers_) {
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(pos), l.weights.size(),
                l.weights.begin());
    pos += l.weights.size();
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(pos), l.biases.size(),
                l.biases.begin());
    pos += l.biases.size();
  }
}

std::vector<std::size_t> paper_mlp_layout(std::size_t inputs) { return {inputs, 48, 48, 1}; }

MlpModel mlp_init(std::span<const std::size_t> layout, std::uint64_t seed,
                  double dropout_rate) {
  if (layout.size() < 2) throw Error(ErrorCode::kInvalidLayout, "need input and output layers");
  for (std::size_t w : layout) {
    if (w == 0) throw Error(ErrorCode::kInvalidLayout, "zero-width layer");
  }
  if (layout.back() != 1) throw Error(ErrorCode::kInvalidLayout, "output width must be 1");
  Rng rng(seed);
  std::vector<MlpLayer> layers;
  for (std::size_t l = 0; l + 1 < layout.size(); ++l) {
    MlpLayer layer{layout[l], layout[l + 1], {}, {}};
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.in));
    layer.weights.resize(layer.in * layer.out);
    for (double& w : layer.weights) w = rng.uniform(-limit, limit);
    layer.biases.assign(layer.out, 0.0);
    layers.push_back(std::move(layer));
  }
  return MlpModel(std::move(layers), dropout_rate);
}

double mlp_forward(const MlpModel& model, std::span<const double> x, ForwardMode mode) {
  check_dimension(model.input_dim(), x.size());
  if (!mode.train) return infer(model.layers(), x);
  Trace t;
  Rng rng(mode.mask_seed);
  forward_trace(model, x, &rng, t);
  return t.act.back()[0];
}

std::vector<double> mlp_pre_output(const MlpModel& model, std::span<const double> x,
                                   ForwardMode mode) {
  check_dimension(model.input_dim(), x.size());
  Trace t;
  Rng rng(mode.mask_seed);
  forward_trace(model, x, mode.train ? &rng : nullptr, t);
  return t.act[t.act.size() - 2];
}

MlpTrainResult mlp_train(MlpModel model, const Matrix& x, std::span<const double> y,
                         const MlpTrainConfig& config) {
  if (x.rows == 0 || y.size() != x.rows) {
    throw Error(ErrorCode::kEmptyData, "training needs matching, nonempty X and y");
  }
  check_dimension(model.input_dim(), x.cols);
  if (config.batch_size == 0) throw Error(ErrorCode::kInvalidParam, "batch size must be > 0");
  if (config.learning_rate < 0.0 || config.momentum < 0.0 || config.momentum >= 1.0) {
    throw Error(ErrorCode::kInvalidParam, "learning rate >= 0 and momentum in [0, 1) required");
  }
  Rng rng(config.seed);
  std::vector<double> params = model.parameters();
  std::vector<double> velocity(params.size(), 0.0);
  std::vector<double> grad(params.size());
  std::vector<std::size_t> order(x.rows);
  std::iota(order.begin(), order.end(), 0);
  MlpTrainResult result{model, {}};
  result.loss_trace.reserve(config.epochs);
  Trace t;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const double scale = 2.0 / static_cast<double>(end - start);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t r = order[k];
        forward_trace(result.model, x.row(r), &rng, t);
        backward(result.model, t, scale * (t.act.back()[0] - y[r]), grad);
      }
      for (std::size_t i = 0; i < params.size(); ++i) {
        velocity[i] = config.momentum * velocity[i] - config.learning_rate * grad[i];
        params[i] += velocity[i];
      }
      result.model.set_parameters(params);
    }
    const double loss = inference_mse(result.model, x, y);
    if (!std::isfinite(loss)) {
      throw Error(ErrorCode::kDiverged,
                  "loss became non-finite at epoch " + std::to_string(epoch + 1));
    }
    result.loss_trace.push_back(loss);
  }
  return result;
}

std::vector<double> mlp_gradient(const MlpModel& model, std::span<const double> x,
                                 double y) {
  check_dimension(model.input_dim(), x.size());
  Trace t;
  forward_trace(model, x, nullptr, t);
  std::vector<double> grad(model.parameter_count(), 0.0);
  backward(model, t, t.act.back()[0] - y, grad);
  return grad;
}

double mlp_gradcheck(const MlpModel& model, std::span<const double> x, double y,
                     double eps) {
  if (!(eps > 0.0 && eps <= 1e-2)) {
    throw Error(ErrorCode::kInvalidParam, "finite-difference step must lie in (0, 1e-2]");
  }
  check_dimension(model.input_dim(), x.size());
  // Copy without dropout, then move hidden pre-activations off the kink.
  MlpModel probe(model.layers(), 0.0);
  {
    std::vector<MlpLayer> layers = probe.layers();
    for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
      Trace t;
      forward_trace(MlpModel(layers, 0.0), x, nullptr, t);
      double reach = 1.0;
      for (double a : t.act[l]) reach += std::abs(a);
      const double margin = 100.0 * eps * reach;
      for (std::size_t o = 0; o < layers[l].out; ++o) {
        const double z = t.pre[l][o];
        if (std::abs(z) < margin) layers[l].biases[o] += (z >= 0.0 ? 2.0 : -2.0) * margin - z;
      }
    }
    probe = MlpModel(std::move(layers), 0.0);
  }
  const std::vector<double> analytic = mlp_gradient(probe, x, y);
  std::vector<double> params = probe.parameters();
  const auto loss = [&](const std::vector<double>& p) {
    MlpModel m = probe;
    m.set_parameters(p);
    const double d = mlp_forward(m, x) - y;
    return 0.5 * d * d;
  };
  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + eps;
    const double up = loss(params);
    params[i] = saved - eps;
    const double down = loss(params);
    params[i] = saved;
    const double numeric = (up - down) / (2.0 * eps);
    const double err = std::abs(analytic[i] - numeric) /
                       std::max(std::abs(analytic[i]) + std::abs(numeric), 1e-12);
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace rwt
