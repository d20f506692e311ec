#include "rwt/kan.hpp"

#include <algorithm>
#include <cmath>

#include "rwt/bspline.hpp"
#include "rwt/error.hpp"
#include "rwt/rng.hpp"

namespace rwt {

namespace {

void validate_layout(std::span<const std::size_t> layout, int grid_size) {
  if (layout.size() < 2) throw Error(ErrorCode::kInvalidLayout, "KAN needs at least two layers");
  for (std::size_t w : layout) {
    if (w == 0) throw Error(ErrorCode::kInvalidLayout, "KAN layer width must be positive");
  }
  if (layout.back() != 1) throw Error(ErrorCode::kInvalidLayout, "KAN output width must be 1");
  if (grid_size < kMinGridSize) {
    throw Error(ErrorCode::kInvalidLayout, "KAN grid size must be at least 4");
  }
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

struct EdgeState {
  BasisWindow w;
  double phi = 0.0;
  double slope = 0.0;
};

// Accumulates the objective gradient of one row into grad.
// Returns the row's squared error and adds its edge magnitudes to `magnitude`.
double backprop_row(const KanNetwork& net, std::span<const double> x, double y, double scale,
                    double lambda_over_n, std::span<double> grad, double& magnitude) {
  const auto& layout = net.layout();
  const std::size_t layers = net.layer_count();
  const int grid = net.grid_size();
  const std::size_t per_edge = bspline_coef_count(grid) + 1;

  thread_local std::vector<EdgeState> states;
  thread_local std::vector<double> nodes, upstream, down;
  thread_local std::vector<std::size_t> node_at;
  states.resize(net.edges().size());
  node_at.assign(layers + 2, 0);
  for (std::size_t l = 0; l <= layers; ++l) node_at[l + 1] = node_at[l] + layout[l];
  nodes.assign(node_at[layers + 1], 0.0);
  std::copy(x.begin(), x.end(), nodes.begin());

  std::size_t k = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    for (std::size_t q = 0; q < layout[l + 1]; ++q) {
      double sum = 0.0;
      for (std::size_t p = 0; p < layout[l]; ++p, ++k) {
        const KanEdge& e = net.edges()[k];
        const double u = nodes[node_at[l] + p];
        EdgeState& st = states[k];
        st.w = bspline_window(u, grid);
        st.phi = e.w_lin * u;
        st.slope = e.w_lin;
        for (int j = 0; j < 4; ++j) {
          st.phi += e.coef[st.w.first + j] * st.w.value[j];
          st.slope += e.coef[st.w.first + j] * st.w.slope[j];
        }
        magnitude += std::abs(st.phi);
        sum += st.phi;
      }
      nodes[node_at[l + 1] + q] = sum;
    }
  }

  const double err = nodes[node_at[layers]] - y;
  upstream.assign(1, 2.0 * scale * err);
  std::size_t end = net.edges().size();
  for (std::size_t l = layers; l-- > 0;) {
    const std::size_t in_w = layout[l], out_w = layout[l + 1];
    const std::size_t begin = end - in_w * out_w;
    down.assign(in_w, 0.0);
    for (std::size_t q = 0; q < out_w; ++q) {
      for (std::size_t p = 0; p < in_w; ++p) {
        const std::size_t idx = begin + q * in_w + p;
        const EdgeState& st = states[idx];
        const double factor = upstream[q] + lambda_over_n * sign(st.phi);
        const std::size_t base = idx * per_edge;
        grad[base] += factor * nodes[node_at[l] + p];
        for (int j = 0; j < 4; ++j) grad[base + 1 + st.w.first + j] += factor * st.w.value[j];
        down[p] += factor * st.slope;
      }
    }
    upstream.swap(down);
    end = begin;
  }
  return err * err;
}

}  // namespace

KanNetwork::KanNetwork(std::vector<std::size_t> layout, int grid_size, std::vector<KanEdge> edges)
    : layout_(std::move(layout)), grid_(grid_size), edges_(std::move(edges)) {
  validate_layout(layout_, grid_);
  const std::size_t coefs = bspline_coef_count(grid_);
  offsets_.assign(layout_.size(), 0);
  for (std::size_t l = 0; l + 1 < layout_.size(); ++l) {
    offsets_[l + 1] = offsets_[l] + layout_[l] * layout_[l + 1];
  }
  if (edges_.size() != offsets_.back()) {
    throw Error(ErrorCode::kInvalidLayout, "KAN edge count does not match layout");
  }
  for (const KanEdge& e : edges_) {
    if (e.coef.size() != coefs) {
      throw Error(ErrorCode::kInvalidLayout, "KAN edge coefficient count does not match grid");
    }
  }
}

const KanEdge& KanNetwork::edge(std::size_t layer, std::size_t out, std::size_t in) const {
  return edges_[edge_offset(layer) + out * layout_[layer] + in];
}

KanEdge& KanNetwork::edge(std::size_t layer, std::size_t out, std::size_t in) {
  return edges_[edge_offset(layer) + out * layout_[layer] + in];
}

double KanNetwork::edge_value(std::size_t layer, std::size_t out, std::size_t in,
                              double u) const {
  const KanEdge& e = edge(layer, out, in);
  return e.w_lin * u + bspline_value(e.coef, grid_, u);
}

double KanNetwork::edge_slope(std::size_t layer, std::size_t out, std::size_t in,
                              double u) const {
  const KanEdge& e = edge(layer, out, in);
  return e.w_lin + bspline_slope(e.coef, grid_, u);
}

std::vector<std::vector<double>> KanNetwork::activations(std::span<const double> x) const {
  check_dimension(input_dim(), x.size());
  std::vector<std::vector<double>> acts;
  acts.reserve(layout_.size());
  acts.emplace_back(x.begin(), x.end());
  for (std::size_t l = 0; l + 1 < layout_.size(); ++l) {
    std::vector<double> next(layout_[l + 1], 0.0);
    for (std::size_t q = 0; q < next.size(); ++q) {
      for (std::size_t p = 0; p < layout_[l]; ++p) next[q] += edge_value(l, q, p, acts[l][p]);
    }
    acts.push_back(std::move(next));
  }
  return acts;
}

double KanNetwork::predict(std::span<const double> x) const {
  check_dimension(input_dim(), x.size());
  std::vector<double> cur(x.begin(), x.end()), next;
  for (std::size_t l = 0; l + 1 < layout_.size(); ++l) {
    next.assign(layout_[l + 1], 0.0);
    for (std::size_t q = 0; q < next.size(); ++q) {
      for (std::size_t p = 0; p < layout_[l]; ++p) next[q] += edge_value(l, q, p, cur[p]);
    }
    cur.swap(next);
  }
  return cur[0];
}

std::size_t KanNetwork::parameter_count() const {
  return edges_.size() * (bspline_coef_count(grid_) + 1);
}

std::vector<double> KanNetwork::parameters() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const KanEdge& e : edges_) {
    out.push_back(e.w_lin);
    out.insert(out.end(), e.coef.begin(), e.coef.end());
  }
  return out;
}

void KanNetwork::set_parameters(std::span<const double> values) {
  if (values.size() != parameter_count()) {
    throw Error(ErrorCode::kDimensionMismatch, "KAN parameter vector has the wrong length");
  }
  std::size_t i = 0;
  for (KanEdge& e : edges_) {
    e.w_lin = values[i++];
    for (double& c : e.coef) c = values[i++];
  }
}

std::string_view to_string(KanRegime regime) {
  return regime == KanRegime::kSimple ? "simple" : "complex";
}

KanRegime parse_kan_regime(std::string_view text) {
  if (text == "simple") return KanRegime::kSimple;
  if (text == "complex") return KanRegime::kComplex;
  throw Error(ErrorCode::kInvalidParam, "regime must be simple or complex");
}

std::vector<std::size_t> kan_regime_layout(KanRegime regime, std::size_t inputs) {
  return {inputs, regime == KanRegime::kSimple ? std::size_t{2} : std::size_t{3}, 1};
}

KanNetwork kan_init(std::span<const std::size_t> layout, int grid_size, std::uint64_t seed) {
  validate_layout(layout, grid_size);
  Rng rng(seed);
  const std::size_t coefs = bspline_coef_count(grid_size);
  std::vector<KanEdge> edges;
  for (std::size_t l = 0; l + 1 < layout.size(); ++l) {
    const double fan_in = static_cast<double>(layout[l]);
    for (std::size_t k = 0; k < layout[l] * layout[l + 1]; ++k) {
      KanEdge e;
      e.w_lin = (1.0 + rng.uniform(-0.1, 0.1)) / fan_in;
      e.coef.resize(coefs);
      for (double& c : e.coef) c = rng.uniform(-0.01, 0.01);
      edges.push_back(std::move(e));
    }
  }
  return KanNetwork({layout.begin(), layout.end()}, grid_size, std::move(edges));
}

double kan_forward(const KanNetwork& net, std::span<const double> x) { return net.predict(x); }

double kan_objective(const KanNetwork& net, const Matrix& x, std::span<const double> y,
                     double lambda) {
  if (x.rows == 0 || x.rows != y.size()) {
    throw Error(ErrorCode::kEmptyData, "KAN objective needs matching nonempty rows");
  }
  check_dimension(net.input_dim(), x.cols);
  double sse = 0.0, magnitude = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    const auto acts = net.activations(x.row(i));
    const double d = acts.back()[0] - y[i];
    sse += d * d;
    if (lambda > 0.0) {
      for (std::size_t l = 0; l < net.layer_count(); ++l) {
        for (std::size_t q = 0; q < net.layout()[l + 1]; ++q) {
          for (std::size_t p = 0; p < net.layout()[l]; ++p) {
            magnitude += std::abs(net.edge_value(l, q, p, acts[l][p]));
          }
        }
      }
    }
  }
  const double n = static_cast<double>(x.rows);
  return sse / n + lambda * magnitude / n;
}

std::vector<double> kan_gradient(const KanNetwork& net, const Matrix& x,
                                 std::span<const double> y, double lambda) {
  if (x.rows == 0 || x.rows != y.size()) {
    throw Error(ErrorCode::kEmptyData, "KAN gradient needs matching nonempty rows");
  }
  check_dimension(net.input_dim(), x.cols);
  std::vector<double> grad(net.parameter_count(), 0.0);
  const double n = static_cast<double>(x.rows);
  double magnitude = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    backprop_row(net, x.row(i), y[i], 1.0 / n, lambda / n, grad, magnitude);
  }
  return grad;
}

KanTrainResult kan_train(KanNetwork net, const Matrix& x, std::span<const double> y,
                         const KanTrainConfig& config) {
  if (x.rows == 0 || x.rows != y.size()) {
    throw Error(ErrorCode::kEmptyData, "KAN training needs matching nonempty rows");
  }
  if (!(config.lambda >= 0.0)) throw Error(ErrorCode::kInvalidParam, "lambda must be >= 0");
  if (!(config.learning_rate > 0.0)) {
    throw Error(ErrorCode::kInvalidParam, "learning rate must be positive");
  }
  check_dimension(net.input_dim(), x.cols);

  std::vector<double> params = net.parameters();
  std::vector<double> m(params.size(), 0.0), v(params.size(), 0.0);
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kAdamEps = 1e-8;
  double beta1_t = 1.0, beta2_t = 1.0;

  KanTrainResult result{net, {}};
  result.loss_trace.reserve(config.steps);
  const double n = static_cast<double>(x.rows);
  std::vector<double> grad(params.size());
  for (std::size_t step = 0; step < config.steps; ++step) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double sse = 0.0, magnitude = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) {
      sse += backprop_row(net, x.row(i), y[i], 1.0 / n, config.lambda / n, grad, magnitude);
    }
    const double loss = sse / n + config.lambda * magnitude / n;
    if (!std::isfinite(loss)) throw Error(ErrorCode::kDiverged, "KAN objective is not finite");
    result.loss_trace.push_back(loss);

    if (config.optimizer == KanOptimizer::kAdam) {
      beta1_t *= kBeta1;
      beta2_t *= kBeta2;
      for (std::size_t k = 0; k < params.size(); ++k) {
        m[k] = kBeta1 * m[k] + (1.0 - kBeta1) * grad[k];
        v[k] = kBeta2 * v[k] + (1.0 - kBeta2) * grad[k] * grad[k];
        const double mh = m[k] / (1.0 - beta1_t), vh = v[k] / (1.0 - beta2_t);
        params[k] -= config.learning_rate * mh / (std::sqrt(vh) + kAdamEps);
      }
    } else {
      for (std::size_t k = 0; k < params.size(); ++k) {
        m[k] = config.momentum * m[k] + grad[k];
        params[k] -= config.learning_rate * m[k];
      }
    }
    net.set_parameters(params);
  }
  for (double p : params) {
    if (!std::isfinite(p)) throw Error(ErrorCode::kDiverged, "KAN parameters are not finite");
  }
  result.net = std::move(net);
  return result;
}

double kan_gradcheck(const KanNetwork& net, const Matrix& x, std::span<const double> y,
                     double lambda, double eps) {
  if (!(eps > 0.0 && eps <= 1e-2)) {
    throw Error(ErrorCode::kInvalidParam, "finite-difference step must lie in (0, 1e-2]");
  }
  KanNetwork probe = net;
  if (lambda > 0.0) {
    const double margin = 1e3 * eps;
    for (std::size_t l = 0; l < probe.layer_count(); ++l) {
      std::vector<std::vector<double>> inputs;
      for (std::size_t i = 0; i < x.rows; ++i) inputs.push_back(probe.activations(x.row(i))[l]);
      for (std::size_t q = 0; q < probe.layout()[l + 1]; ++q) {
        for (std::size_t p = 0; p < probe.layout()[l]; ++p) {
          double lo = INFINITY, hi = -INFINITY;
          for (const auto& a : inputs) {
            const double v = probe.edge_value(l, q, p, a[p]);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
          }
          if (lo > margin || hi < -margin) continue;
          // The basis sums to one everywhere, so this lifts phi uniformly.
          const double shift = 2.0 * margin - lo;
          for (double& c : probe.edge(l, q, p).coef) c += shift;
        }
      }
    }
  }
  const std::vector<double> analytic = kan_gradient(probe, x, y, lambda);
  const double loss = kan_objective(probe, x, y, lambda);
  const double floor = 1e-6 * (1.0 + std::abs(loss));
  std::vector<double> params = probe.parameters();
  KanNetwork work = probe;
  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + eps;
    work.set_parameters(params);
    const double up = kan_objective(work, x, y, lambda);
    params[i] = saved - eps;
    work.set_parameters(params);
    const double down = kan_objective(work, x, y, lambda);
    params[i] = saved;
    const double numeric = (up - down) / (2.0 * eps);
    const double err = std::abs(analytic[i] - numeric) /
                       std::max(std::abs(analytic[i]) + std::abs(numeric), floor);
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace rwt
