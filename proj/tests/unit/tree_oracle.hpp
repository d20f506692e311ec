#pragma once

// Brute-force reference for CART split selection. Every (feature, midpoint)
// candidate is scored by recomputing the child sums of squared errors from
// scratch; nothing here shares code with the production builder.

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <vector>

#include "rwt/core_data.hpp"
#include "rwt/trees.hpp"

namespace rwt::testing {

struct OracleSplit {
  int feature;
  double threshold;
  double sse;
};

inline double sse_about_mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double m = 0.0;
  for (double a : v) m += a;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double a : v) s += (a - m) * (a - m);
  return s;
}

// Best split of `rows` under the documented tie rule, or nullopt when no
// candidate improves the SSE by more than the tie tolerance.
inline std::optional<OracleSplit> oracle_best_split(const Matrix& x,
                                                    const std::vector<double>& y,
                                                    const std::vector<std::size_t>& rows,
                                                    std::size_t min_leaf) {
  std::vector<double> node_y;
  double sumsq = 0.0;
  for (auto r : rows) {
    node_y.push_back(y[r]);
    sumsq += y[r] * y[r];
  }
  const double parent = sse_about_mean(node_y);
  std::vector<OracleSplit> all;
  for (std::size_t f = 0; f < x.cols; ++f) {
    std::set<double> distinct;
    for (auto r : rows) distinct.insert(x(r, f));
    std::vector<double> values(distinct.begin(), distinct.end());
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
      const double thr = 0.5 * (values[i] + values[i + 1]);
      std::vector<double> left, right;
      for (auto r : rows) (x(r, f) <= thr ? left : right).push_back(y[r]);
      if (left.size() < min_leaf || right.size() < min_leaf) continue;
      all.push_back({static_cast<int>(f), thr, sse_about_mean(left) + sse_about_mean(right)});
    }
  }
  if (all.empty()) return std::nullopt;
  double best = all.front().sse;
  for (const auto& c : all) best = std::min(best, c.sse);
  const double tol = kTieTolerance * (1.0 + sumsq);
  if (!(parent - best > tol)) return std::nullopt;
  for (const auto& c : all) {
    if (c.sse <= best + tol) return c;
  }
  return std::nullopt;
}

}  // namespace rwt::testing
