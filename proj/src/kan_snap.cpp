#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>

#include "rwt/error.hpp"
#include "rwt/kan.hpp"
#include "rwt/parallel.hpp"

namespace rwt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFlatRange = 1e-10;
// Edges varying less than this fraction of the output range become constants.
constexpr double kNegligibleEdge = 1e-4;
constexpr int kSignificantDigits = 6;
constexpr double kZeroConstant = 1e-12;

// Samples of one edge on t in [0, 1], t = (u - lo) / w.
struct EdgeSamples {
  std::vector<double> t;
  std::vector<double> f;
  double sst = 0.0;
};

using Basis = std::function<double(double)>;

struct LinearFit {
  double sse = kInf;
  std::vector<double> coef;  // one per basis column, then the intercept
};

// Least squares on the given columns plus an intercept.
LinearFit fit_columns(const EdgeSamples& s, const std::vector<Basis>& columns) {
  const auto n = static_cast<Eigen::Index>(s.t.size());
  const auto k = static_cast<Eigen::Index>(columns.size());
  Eigen::MatrixXd a(n, k + 1);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = s.t[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < k; ++j) {
      const double v = columns[static_cast<std::size_t>(j)](t);
      if (!std::isfinite(v)) return {};
      a(i, j) = v;
    }
    a(i, k) = 1.0;
    b(i) = s.f[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
  LinearFit fit;
  fit.sse = (a * c - b).squaredNorm();
  if (!std::isfinite(fit.sse)) return {};
  fit.coef.assign(c.data(), c.data() + c.size());
  return fit;
}

double minimize_1d(const std::function<double(double)>& f, double lo, double hi,
                   double& best_x) {
  constexpr int kGrid = 60;
  double best = kInf;
  best_x = lo;
  int best_i = 0;
  for (int i = 0; i <= kGrid; ++i) {
    const double x = lo + (hi - lo) * i / kGrid;
    const double v = f(x);
    if (v < best) {
      best = v;
      best_x = x;
      best_i = i;
    }
  }
  const double a = lo + (hi - lo) * std::max(best_i - 1, 0) / kGrid;
  const double b = lo + (hi - lo) * std::min(best_i + 1, kGrid) / kGrid;
  const auto r = boost::math::tools::brent_find_minima(f, a, b, 40);
  if (r.second < best) {
    best = r.second;
    best_x = r.first;
  }
  return best;
}

double minimize_2d(const std::function<double(double, double)>& f, double lo1, double hi1,
                   double lo2, double hi2, double& x1, double& x2) {
  constexpr int kGrid = 24;
  double best = kInf;
  x1 = lo1;
  x2 = lo2;
  for (int i = 0; i <= kGrid; ++i) {
    for (int j = 0; j <= kGrid; ++j) {
      const double a = lo1 + (hi1 - lo1) * i / kGrid;
      const double b = lo2 + (hi2 - lo2) * j / kGrid;
      const double v = f(a, b);
      if (v < best) {
        best = v;
        x1 = a;
        x2 = b;
      }
    }
  }
  double w1 = (hi1 - lo1) / kGrid, w2 = (hi2 - lo2) / kGrid;
  for (int round = 0; round < 6; ++round) {
    const auto r1 = boost::math::tools::brent_find_minima(
        [&](double a) { return f(a, x2); }, std::max(lo1, x1 - w1), std::min(hi1, x1 + w1), 40);
    if (r1.second < best) {
      best = r1.second;
      x1 = r1.first;
    }
    const auto r2 = boost::math::tools::brent_find_minima(
        [&](double b) { return f(x1, b); }, std::max(lo2, x2 - w2), std::min(hi2, x2 + w2), 40);
    if (r2.second < best) {
      best = r2.second;
      x2 = r2.first;
    }
    w1 *= 0.5;
    w2 *= 0.5;
  }
  return best;
}

// A fitted candidate, expressed as a builder over the edge argument in
// u-space.
struct Candidate {
  SnapFamily family = SnapFamily::kConstant;
  double sse = kInf;
  std::function<Expr(const Expr&)> build;
};

Expr c(double v) { return Expr::constant(v); }

Expr affine(const Expr& arg, double slope, double offset) {
  return Expr::add(Expr::mul(c(slope), arg), c(offset));
}

// Pole offsets searched on both sides of the reachable range, as log10 of
// the distance in t units.
constexpr double kPoleLogLo = -2.0, kPoleLogHi = 2.0;

Candidate fit_family(SnapFamily family, const EdgeSamples& s, double lo, double w) {
  Candidate out;
  out.family = family;
  switch (family) {
    case SnapFamily::kConstant: {
      const LinearFit fit = fit_columns(s, {});
      const double d = fit.coef.at(0);
      out.sse = fit.sse;
      out.build = [d](const Expr&) { return c(d); };
      return out;
    }
    case SnapFamily::kLinear: {
      const LinearFit fit = fit_columns(s, {[](double t) { return t; }});
      const double a = fit.coef[0] / w, b = fit.coef[1] - fit.coef[0] * lo / w;
      out.sse = fit.sse;
      out.build = [a, b](const Expr& arg) { return affine(arg, a, b); };
      return out;
    }
    case SnapFamily::kRational:
    case SnapFamily::kRationalSquared:
    case SnapFamily::kLog: {
      const int power = family == SnapFamily::kRationalSquared ? 2 : 1;
      for (int side = 0; side < 2; ++side) {
        const auto pole = [side](double s_log) {
          const double d = std::pow(10.0, s_log);
          return side == 0 ? -d : 1.0 + d;
        };
        const auto column = [&, side](double p) -> Basis {
          if (family == SnapFamily::kLog) {
            return [p, side](double t) { return std::log(side == 0 ? t - p : p - t); };
          }
          return [p, power](double t) { return 1.0 / std::pow(t - p, power); };
        };
        const auto sse = [&](double s_log) { return fit_columns(s, {column(pole(s_log))}).sse; };
        double best_s = 0.0;
        const double v = minimize_1d(sse, kPoleLogLo, kPoleLogHi, best_s);
        if (!(v < out.sse)) continue;
        const double p = pole(best_s);
        const LinearFit fit = fit_columns(s, {column(p)});
        out.sse = fit.sse;
        const double x0 = lo + p * w, k = fit.coef[0], d = fit.coef[1];
        if (family == SnapFamily::kLog) {
          const double shift = d - k * std::log(w);
          out.build = [=](const Expr& arg) {
            const Expr inner = side == 0 ? Expr::add(arg, c(-x0)) : Expr::add(Expr::neg(arg), c(x0));
            return Expr::add(Expr::mul(c(k), Expr::call(NodeKind::kLog, inner)), c(shift));
          };
        } else {
          const double num = k * std::pow(w, power);
          out.build = [=](const Expr& arg) {
            Expr den = Expr::add(arg, c(-x0));
            if (power == 2) den = Expr::pow(den, 2);
            return Expr::add(Expr::div(c(num), den), c(d));
          };
        }
      }
      return out;
    }
    case SnapFamily::kQuadratic: {
      const LinearFit fit =
          fit_columns(s, {[](double t) { return t * t; }, [](double t) { return t; }});
      const double a2 = fit.coef[0], a1 = fit.coef[1], a0 = fit.coef[2];
      if (std::abs(a2) < 1e-12) return out;
      const double tv = -a1 / (2.0 * a2);
      const double cx = a2 / (w * w), xv = lo + tv * w, d = a0 - a1 * a1 / (4.0 * a2);
      out.sse = fit.sse;
      out.build = [=](const Expr& arg) {
        return Expr::add(Expr::mul(c(cx), Expr::pow(Expr::add(arg, c(-xv)), 2)), c(d));
      };
      return out;
    }
    case SnapFamily::kCos: {
      const auto cols = [](double om) -> std::vector<Basis> {
        return {[om](double t) { return std::cos(om * t); },
                [om](double t) { return std::sin(om * t); }};
      };
      double om = 1.0;
      minimize_1d([&](double o) { return fit_columns(s, cols(o)).sse; }, 0.1,
                  4.0 * std::numbers::pi, om);
      const LinearFit fit = fit_columns(s, cols(om));
      if (fit.coef.empty()) return out;
      const double r = std::hypot(fit.coef[0], fit.coef[1]);
      const double theta = std::atan2(fit.coef[1], fit.coef[0]);
      const double d = fit.coef[2], a = om / w, b = -om * lo / w - theta;
      out.sse = fit.sse;
      out.build = [=](const Expr& arg) {
        return Expr::add(Expr::mul(c(r), Expr::call(NodeKind::kCos, affine(arg, a, b))), c(d));
      };
      return out;
    }
    case SnapFamily::kTan:
    case SnapFamily::kTanh:
    case SnapFamily::kGaussian: {
      // (slope-like, center-like) parameters in t-space.
      double lo1, hi1, lo2, hi2;
      std::function<double(double, double, double)> g;
      if (family == SnapFamily::kTan) {
        // tan(a*t + b) with a*t + b kept inside (-1.55, 1.55) on [0, 1].
        lo1 = 0.05, hi1 = 3.0, lo2 = 0.0, hi2 = 1.0;
        g = [](double a, double beta, double t) {
          const double b = -1.55 + beta * (3.1 - a);
          return std::tan(a * t + b);
        };
      } else if (family == SnapFamily::kTanh) {
        lo1 = 0.1, hi1 = 20.0, lo2 = -0.5, hi2 = 1.5;
        g = [](double a, double m, double t) { return std::tanh(a * (t - m)); };
      } else {
        lo1 = 0.5, hi1 = 100.0, lo2 = -0.5, hi2 = 1.5;
        g = [](double k, double m, double t) { return std::exp(-k * (t - m) * (t - m)); };
      }
      const auto col = [&](double p1, double p2) -> std::vector<Basis> {
        return {[=](double t) { return g(p1, p2, t); }};
      };
      double p1 = lo1, p2 = lo2;
      minimize_2d([&](double a, double b) { return fit_columns(s, col(a, b)).sse; }, lo1, hi1,
                  lo2, hi2, p1, p2);
      const LinearFit fit = fit_columns(s, col(p1, p2));
      if (fit.coef.empty()) return out;
      const double k = fit.coef[0], d = fit.coef[1];
      out.sse = fit.sse;
      if (family == SnapFamily::kTan) {
        const double b = -1.55 + p2 * (3.1 - p1);
        const double a = p1 / w, off = b - p1 * lo / w;
        out.build = [=](const Expr& arg) {
          return Expr::add(Expr::mul(c(k), Expr::call(NodeKind::kTan, affine(arg, a, off))), c(d));
        };
      } else if (family == SnapFamily::kTanh) {
        const double a = p1 / w, off = -p1 * (lo + p2 * w) / w;
        out.build = [=](const Expr& arg) {
          return Expr::add(Expr::mul(c(k), Expr::call(NodeKind::kTanh, affine(arg, a, off))), c(d));
        };
      } else {
        const double kx = -p1 / (w * w), xm = lo + p2 * w;
        out.build = [=](const Expr& arg) {
          const Expr sq = Expr::mul(c(kx), Expr::pow(Expr::add(arg, c(-xm)), 2));
          return Expr::add(Expr::mul(c(k), Expr::call(NodeKind::kExp, sq)), c(d));
        };
      }
      return out;
    }
    case SnapFamily::kExp: {
      const auto cols = [](double a) -> std::vector<Basis> {
        return {[a](double t) { return std::exp(a * t); }};
      };
      double a = 1.0;
      minimize_1d([&](double v) { return fit_columns(s, cols(v)).sse; }, -10.0, 10.0, a);
      const LinearFit fit = fit_columns(s, cols(a));
      if (fit.coef.empty()) return out;
      const double k = fit.coef[0] * std::exp(-a * lo / w), d = fit.coef[1], ax = a / w;
      out.sse = fit.sse;
      out.build = [=](const Expr& arg) {
        return Expr::add(Expr::mul(c(k), Expr::call(NodeKind::kExp, Expr::mul(c(ax), arg))),
                         c(d));
      };
      return out;
    }
  }
  return out;
}

double round_significant(double v) {
  if (std::abs(v) < kZeroConstant) return 0.0;
  if (!std::isfinite(v)) return v;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", kSignificantDigits, v);
  return std::strtod(buf, nullptr);
}

Expr round_tree(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::kConst:
      return c(round_significant(e.value()));
    case NodeKind::kVar:
      return e;
    case NodeKind::kAdd:
      return Expr::add(round_tree(e.child(0)), round_tree(e.child(1)));
    case NodeKind::kMul:
      return Expr::mul(round_tree(e.child(0)), round_tree(e.child(1)));
    case NodeKind::kDiv:
      return Expr::div(round_tree(e.child(0)), round_tree(e.child(1)));
    case NodeKind::kPow:
      return Expr::pow(round_tree(e.child(0)), e.exponent());
    case NodeKind::kNeg:
      return Expr::neg(round_tree(e.child(0)));
    default:
      return Expr::call(e.kind(), round_tree(e.child(0)));
  }
}

Expr round_constants(const Expr& e) { return round_tree(simplify(round_tree(e))); }

std::string replace_all(std::string text, const std::string& from, const std::string& to) {
  for (std::size_t at = text.find(from); at != std::string::npos;
       at = text.find(from, at + to.size())) {
    text.replace(at, from.size(), to);
  }
  return text;
}

using Builder = std::function<Expr(const Expr&)>;

// Fits every library family to f on kSnapGridPoints points of [r.lo, r.hi]
// and fills the fit fields of r.
Builder snap_function(const std::function<double(double)>& f, const SnapLibrary& library,
                      double flat, EdgeSnap& r) {
  const double width = r.hi - r.lo;
  EdgeSamples s;
  s.t.resize(kSnapGridPoints);
  s.f.resize(kSnapGridPoints);
  double mean = 0.0, fmin = kInf, fmax = -kInf;
  for (std::size_t i = 0; i < kSnapGridPoints; ++i) {
    const double t = static_cast<double>(i) / (kSnapGridPoints - 1);
    s.t[i] = t;
    s.f[i] = f(r.lo + t * width);
    mean += s.f[i];
    fmin = std::min(fmin, s.f[i]);
    fmax = std::max(fmax, s.f[i]);
  }
  mean /= kSnapGridPoints;
  for (double v : s.f) s.sst += (v - mean) * (v - mean);

  if (fmax - fmin <= flat || width <= kFlatRange) {
    r.family = SnapFamily::kConstant;
    r.r2 = 1.0;
    r.score = 1.0 - kSnapParamPenalty;
    r.failed = false;
    return [mean](const Expr&) { return c(mean); };
  }
  Builder best;
  r.score = -kInf;
  for (SnapFamily family : library.families) {
    Candidate cand = fit_family(family, s, r.lo, width);
    if (!cand.build || !std::isfinite(cand.sse)) continue;
    const double r2 = 1.0 - cand.sse / s.sst;
    const double score = r2 - kSnapParamPenalty * snap_parameter_count(family);
    if (score > r.score) {
      r.score = score;
      r.r2 = r2;
      r.family = family;
      best = cand.build;
    }
  }
  r.failed = r.r2 < kSnapMinR2;
  return best;
}

std::string formula_text(const Builder& build) {
  return replace_all(to_string(simplify(build(Expr::variable(1)))), "x1", "u");
}

double sample_tolerance(const Expr& e, const KanNetwork& net, const Matrix& sample,
                        std::span<const int> variable_index, std::vector<std::string>& warnings) {
  double tol = 0.0;
  try {
    for (std::size_t i = 0; i < sample.rows; ++i) {
      const double v = evaluate_mapped(e, sample.row(i), variable_index);
      tol = std::max(tol, std::abs(v - net.predict(sample.row(i))));
    }
  } catch (const Error& err) {
    warnings.push_back(std::string("expression not evaluable on the sample: ") + err.what());
    return kInf;
  }
  return tol;
}

}  // namespace

std::string_view to_string(SnapFamily family) {
  switch (family) {
    case SnapFamily::kConstant: return "constant";
    case SnapFamily::kLinear: return "linear";
    case SnapFamily::kRational: return "rational";
    case SnapFamily::kRationalSquared: return "rational_squared";
    case SnapFamily::kQuadratic: return "quadratic";
    case SnapFamily::kCos: return "cos";
    case SnapFamily::kTan: return "tan";
    case SnapFamily::kTanh: return "tanh";
    case SnapFamily::kExp: return "exp";
    case SnapFamily::kLog: return "log";
    case SnapFamily::kGaussian: return "gaussian";
  }
  return "unknown";
}

int snap_parameter_count(SnapFamily family) {
  switch (family) {
    case SnapFamily::kConstant: return 1;
    case SnapFamily::kLinear: return 2;
    case SnapFamily::kRational:
    case SnapFamily::kRationalSquared:
    case SnapFamily::kQuadratic:
    case SnapFamily::kExp:
    case SnapFamily::kLog: return 3;
    case SnapFamily::kCos:
    case SnapFamily::kTan:
    case SnapFamily::kTanh:
    case SnapFamily::kGaussian: return 4;
  }
  return 4;
}

SnapLibrary SnapLibrary::simple() {
  return {KanRegime::kSimple,
          {SnapFamily::kConstant, SnapFamily::kLinear, SnapFamily::kRational,
           SnapFamily::kRationalSquared}};
}

SnapLibrary SnapLibrary::complex() {
  return {KanRegime::kComplex,
          {SnapFamily::kConstant, SnapFamily::kLinear, SnapFamily::kRational,
           SnapFamily::kRationalSquared, SnapFamily::kCos, SnapFamily::kTan, SnapFamily::kTanh,
           SnapFamily::kExp, SnapFamily::kLog, SnapFamily::kQuadratic, SnapFamily::kGaussian}};
}

SnapLibrary SnapLibrary::for_regime(KanRegime regime) {
  return regime == KanRegime::kSimple ? simple() : complex();
}

double evaluate_mapped(const Expr& e, std::span<const double> row,
                       std::span<const int> variable_index) {
  std::vector<double> x(kMaxVariables, 0.0);
  for (std::size_t p = 0; p < row.size(); ++p) {
    const int idx = variable_index.empty() ? static_cast<int>(p) + 1 : variable_index[p];
    x[static_cast<std::size_t>(idx - 1)] = row[p];
  }
  return evaluate(e, x);
}

SnapResult kan_snap(const KanNetwork& net, const SnapLibrary& library, const Matrix& sample,
                    std::span<const int> variable_index) {
  if (sample.rows == 0) throw Error(ErrorCode::kEmptyData, "snapping needs sample rows");
  check_dimension(net.input_dim(), sample.cols);
  if (!variable_index.empty() && variable_index.size() != net.input_dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "variable map must cover every input");
  }
  for (int idx : variable_index) {
    if (idx < 1 || idx > kMaxVariables) {
      throw Error(ErrorCode::kInvalidParam, "variable index must lie in 1..10");
    }
  }
  const auto& layout = net.layout();
  const std::size_t layers = net.layer_count();

  // Reachable range of every node on the sample.
  std::vector<std::vector<double>> lo(layers), hi(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    lo[l].assign(layout[l], kInf);
    hi[l].assign(layout[l], -kInf);
  }
  double out_lo = kInf, out_hi = -kInf;
  for (std::size_t i = 0; i < sample.rows; ++i) {
    const auto acts = net.activations(sample.row(i));
    out_lo = std::min(out_lo, acts.back()[0]);
    out_hi = std::max(out_hi, acts.back()[0]);
    for (std::size_t l = 0; l < layers; ++l) {
      for (std::size_t p = 0; p < layout[l]; ++p) {
        lo[l][p] = std::min(lo[l][p], acts[l][p]);
        hi[l][p] = std::max(hi[l][p], acts[l][p]);
      }
    }
  }

  std::vector<EdgeSnap> reports;
  for (std::size_t l = 0; l < layers; ++l) {
    for (std::size_t q = 0; q < layout[l + 1]; ++q) {
      for (std::size_t p = 0; p < layout[l]; ++p) {
        EdgeSnap r;
        r.layer = l;
        r.out = q;
        r.in = p;
        r.lo = lo[l][p];
        r.hi = hi[l][p];
        reports.push_back(r);
      }
    }
  }

  const double flat = std::max(kFlatRange, kNegligibleEdge * (out_hi - out_lo));
  std::vector<Builder> builds(reports.size());
  parallel_for(reports.size(), [&](std::size_t k) {
    EdgeSnap& r = reports[k];
    builds[k] = snap_function([&](double u) { return net.edge_value(r.layer, r.out, r.in, u); },
                              library, flat, r);
  });

  std::vector<Expr> inputs;
  for (std::size_t p = 0; p < layout[0]; ++p) {
    inputs.push_back(
        Expr::variable(variable_index.empty() ? static_cast<int>(p) + 1 : variable_index[p]));
  }
  SnapResult result;
  std::vector<Expr> nodes = inputs;
  std::size_t k = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    std::vector<Expr> next;
    for (std::size_t q = 0; q < layout[l + 1]; ++q) {
      Expr sum;
      for (std::size_t p = 0; p < layout[l]; ++p, ++k) {
        const Expr term = builds[k](nodes[p]);
        sum = p == 0 ? term : Expr::add(sum, term);
        reports[k].formula = formula_text(builds[k]);
        if (reports[k].failed) {
          result.warnings.push_back("edge " + std::to_string(l) + ":" + std::to_string(q) + ":" +
                                    std::to_string(p) +
                                    " best fit R2 below 0.9; spline residual not represented");
        }
      }
      next.push_back(simplify(sum));
    }
    nodes = std::move(next);
  }
  result.edges = reports;
  result.expression = round_constants(simplify(nodes[0]));
  result.tolerance = sample_tolerance(result.expression, net, sample, variable_index,
                                      result.warnings);

  // One hidden layer whose output edges all snapped affine: the network is
  // additive in its inputs, so snap each input's summed contribution.
  if (layers == 2) {
    const std::size_t hidden = layout[1];
    const std::size_t first_out = layout[0] * hidden;
    std::vector<double> slope(hidden), offset(hidden);
    bool affine_out = true;
    for (std::size_t q = 0; q < hidden; ++q) {
      const SnapFamily fam = reports[first_out + q].family;
      if (fam != SnapFamily::kLinear && fam != SnapFamily::kConstant) affine_out = false;
      const Expr f = simplify(builds[first_out + q](Expr::variable(1)));
      offset[q] = evaluate(f, std::vector<double>{0.0});
      slope[q] = evaluate(f, std::vector<double>{1.0}) - offset[q];
    }
    if (affine_out) {
      std::vector<EdgeSnap> merged(layout[0]);
      std::vector<Builder> merged_builds(layout[0]);
      parallel_for(layout[0], [&](std::size_t p) {
        EdgeSnap& r = merged[p];
        r.in = p;
        r.lo = lo[0][p];
        r.hi = hi[0][p];
        merged_builds[p] = snap_function(
            [&](double u) {
              double v = 0.0;
              for (std::size_t q = 0; q < hidden; ++q) v += slope[q] * net.edge_value(0, q, p, u);
              return v;
            },
            library, flat, r);
      });
      double constant = 0.0;
      for (double b : offset) constant += b;
      Expr sum = c(constant);
      std::vector<std::string> warnings;
      for (std::size_t p = 0; p < layout[0]; ++p) {
        sum = Expr::add(sum, merged_builds[p](inputs[p]));
        merged[p].formula = formula_text(merged_builds[p]);
      }
      const Expr additive = round_constants(simplify(sum));
      const double tol = sample_tolerance(additive, net, sample, variable_index, warnings);
      if (tol <= result.tolerance) {
        result.expression = additive;
        result.tolerance = tol;
        result.additive = true;
        result.inputs = std::move(merged);
      }
    }
  }
  return result;
}

}  // namespace rwt
