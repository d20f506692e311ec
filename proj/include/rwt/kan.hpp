#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rwt/core_data.hpp"
#include "rwt/expr.hpp"
#include "rwt/regressor.hpp"

namespace rwt {

// phi(u) = w_lin * u + spline(u), spline on the uniform grid over [0, 1].
struct KanEdge {
  double w_lin = 0.0;
  std::vector<double> coef;
};

inline constexpr int kDefaultKanGrid = 8;

// Layered Kolmogorov-Arnold network. Node q of layer l+1 is the plain sum of
// its incoming edge functions; the last layer has a single node. Edges of
// layer l are stored out-major: index q * width(l) + p.
class KanNetwork final : public Regressor {
 public:
  // Throws Error(kInvalidLayout) for fewer than two layers, a zero width, a
  // final width other than 1, G < kMinGridSize or edge shapes that disagree.
  KanNetwork(std::vector<std::size_t> layout, int grid_size, std::vector<KanEdge> edges);

  std::size_t input_dim() const override { return layout_.front(); }
  double predict(std::span<const double> x) const override;
  std::string kind() const override { return "kan"; }

  const std::vector<std::size_t>& layout() const { return layout_; }
  int grid_size() const { return grid_; }
  std::size_t layer_count() const { return layout_.size() - 1; }

  const KanEdge& edge(std::size_t layer, std::size_t out, std::size_t in) const;
  KanEdge& edge(std::size_t layer, std::size_t out, std::size_t in);
  double edge_value(std::size_t layer, std::size_t out, std::size_t in, double u) const;
  double edge_slope(std::size_t layer, std::size_t out, std::size_t in, double u) const;

  const std::vector<KanEdge>& edges() const { return edges_; }
  std::size_t parameter_count() const;
  // Per edge in storage order: w_lin, then the spline coefficients.
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> values);

  // Node values of every layer, inputs first.
  std::vector<std::vector<double>> activations(std::span<const double> x) const;

 private:
  std::size_t edge_offset(std::size_t layer) const { return offsets_[layer]; }

  std::vector<std::size_t> layout_;
  int grid_;
  std::vector<KanEdge> edges_;
  std::vector<std::size_t> offsets_;
};

enum class KanRegime { kSimple, kComplex };

std::string_view to_string(KanRegime regime);
KanRegime parse_kan_regime(std::string_view text);

// Simple: [d, 2, 1]. Complex: [d, 3, 1].
std::vector<std::size_t> kan_regime_layout(KanRegime regime, std::size_t inputs);

// Spline coefficients ~ U(-0.01, 0.01). w_lin = (1 + U(-0.1, 0.1)) / fan_in,
// so each layer starts close to a scaled identity sum.
KanNetwork kan_init(std::span<const std::size_t> layout, int grid_size, std::uint64_t seed);

// Throws Error(kDimensionMismatch) on width mismatch. Inputs outside [0, 1]
// follow the linear spline extension.
double kan_forward(const KanNetwork& net, std::span<const double> x);

enum class KanOptimizer { kGradientDescent, kAdam };

struct KanTrainConfig {
  std::size_t steps = 3000;
  double learning_rate = 0.1;
  double lambda = 1e-5;  // weight of the edge magnitude penalty
  KanOptimizer optimizer = KanOptimizer::kGradientDescent;
  double momentum = 0.9;  // gradient descent only
};

struct KanTrainResult {
  KanNetwork net;
  std::vector<double> loss_trace;  // objective before each step
};

// Objective: MSE + lambda * sum over edges of mean |phi_e| on the batch.
double kan_objective(const KanNetwork& net, const Matrix& x, std::span<const double> y,
                     double lambda);
// Analytic gradient of kan_objective in parameters() order.
std::vector<double> kan_gradient(const KanNetwork& net, const Matrix& x,
                                 std::span<const double> y, double lambda);

// Full-batch training. Throws Error(kEmptyData), Error(kInvalidParam) for a
// negative lambda or non-positive step size, Error(kDiverged) on a
// non-finite objective.
KanTrainResult kan_train(KanNetwork net, const Matrix& x, std::span<const double> y,
                         const KanTrainConfig& config);

// Max over parameters of |g - g_fd| / max(|g| + |g_fd|, 1e-6 * (1 + |L|)),
// central differences of step eps. The floor sits above the roundoff of the
// difference quotient. Edges whose output comes within 1e3 * eps of zero on
// the batch are first shifted off the |phi| kink by a constant.
double kan_gradcheck(const KanNetwork& net, const Matrix& x, std::span<const double> y,
                     double lambda, double eps = 1e-5);

// --- symbolic snapping ---

enum class SnapFamily {
  kConstant,
  kLinear,
  kRational,         // c / (u - p) + d
  kRationalSquared,  // c / (u - p)^2 + d
  kQuadratic,        // c * (u - m)^2 + d
  kCos,              // c * cos(a*u + b) + d
  kTan,
  kTanh,
  kExp,              // c * exp(a*u) + d
  kLog,              // c * log(+-(u - p)) + d
  kGaussian,         // c * exp(-k * (u - m)^2) + d
};

std::string_view to_string(SnapFamily family);
int snap_parameter_count(SnapFamily family);

struct SnapLibrary {
  KanRegime mode = KanRegime::kSimple;
  std::vector<SnapFamily> families;

  static SnapLibrary simple();
  static SnapLibrary complex();
  static SnapLibrary for_regime(KanRegime regime);
};

inline constexpr double kSnapMinR2 = 0.9;
inline constexpr double kSnapParamPenalty = 0.01;
inline constexpr std::size_t kSnapGridPoints = 201;

struct EdgeSnap {
  std::size_t layer = 0;
  std::size_t out = 0;
  std::size_t in = 0;
  double lo = 0.0;  // reachable input range on the sample
  double hi = 0.0;
  SnapFamily family = SnapFamily::kConstant;
  double r2 = 0.0;
  double score = 0.0;
  bool failed = false;  // best candidate below kSnapMinR2
  std::string formula;  // in terms of u
};

struct SnapResult {
  Expr expression;
  std::vector<EdgeSnap> edges;
  double tolerance = 0.0;  // max |expression - network| over the sample rows
  std::vector<std::string> warnings;
  // Set when the expression came from per-input snaps of an additive network;
  // `inputs` then holds those fits (layer 0, out 0).
  bool additive = false;
  std::vector<EdgeSnap> inputs;
};

// Snaps every edge on kSnapGridPoints points of its reachable range, composes
// the fits along the topology and simplifies. Network input p maps to
// variable variable_index[p] (default p + 1). Constants are rounded to six
// significant digits, and those below 1e-12 dropped, before the tolerance is
// measured. Edges whose variation
// is below 1e-4 of the output range on the sample snap to constants. With one
// hidden layer whose output edges all snap affine, each input's summed
// contribution is also snapped directly; that additive form replaces the
// composed one when its tolerance is no larger.
SnapResult kan_snap(const KanNetwork& net, const SnapLibrary& library, const Matrix& sample,
                    std::span<const int> variable_index = {});

// Evaluates an expression on a row of network inputs using the same mapping.
double evaluate_mapped(const Expr& e, std::span<const double> row,
                       std::span<const int> variable_index);

// --- incremental input experiment ---

struct IncrementalConfig {
  KanRegime regime = KanRegime::kSimple;
  std::vector<int> ordering;  // 1-based feature indices, most important first
  std::vector<std::uint64_t> seeds{42};
  int grid_size = kDefaultKanGrid;
  KanTrainConfig train;
  std::size_t snap_rows = 1000;
  std::size_t max_threads = 0;
};

struct IncrementalRecord {
  std::size_t n_inputs = 0;
  KanRegime regime = KanRegime::kSimple;
  std::uint64_t seed = 0;
  double r2_train = 0.0;
  double r2_test = 0.0;
  double r2_test_symbolic = 0.0;
  std::string expression_text;
  SnapResult snap;
};

// Trains one network per (prefix length, seed) on the columns named by the
// ordering prefix. Records come back ordered by prefix length, then seed.
// Throws Error(kInvalidParam) when the ordering repeats or leaves 1..cols.
std::vector<IncrementalRecord> incremental_experiment(const Matrix& x_train,
                                                      std::span<const double> y_train,
                                                      const Matrix& x_test,
                                                      std::span<const double> y_test,
                                                      const IncrementalConfig& config);

void write_incremental_jsonl(std::ostream& out, std::span<const IncrementalRecord> records);

}  // namespace rwt
