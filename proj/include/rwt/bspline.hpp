#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "rwt/error.hpp"

namespace rwt {

// Uniform cubic B-spline on [0, 1] with G intervals and G + 3 coefficients.
// Outside [0, 1] the spline continues along its end tangent, so it stays C1
// everywhere and linear in the coefficients.
inline constexpr int kMinGridSize = 4;

struct BasisWindow {
  std::size_t first = 0;            // index of the first nonzero coefficient
  std::array<double, 4> value{};    // basis values at u (extension applied)
  std::array<double, 4> slope{};    // d/du of those values
};

// Throws Error(kInvalidLayout) for G < kMinGridSize.
std::size_t bspline_coef_count(int grid_size);

namespace detail {

// Local cubic pieces on one interval, t in [0, 1].
inline void local_basis(double t, std::array<double, 4>& b, std::array<double, 4>& db) {
  const double s = 1.0 - t;
  const double t2 = t * t, t3 = t2 * t;
  b = {s * s * s / 6.0, (3.0 * t3 - 6.0 * t2 + 4.0) / 6.0,
       (-3.0 * t3 + 3.0 * t2 + 3.0 * t + 1.0) / 6.0, t3 / 6.0};
  db = {-s * s / 2.0, (9.0 * t2 - 12.0 * t) / 6.0, (-9.0 * t2 + 6.0 * t + 3.0) / 6.0,
        t2 / 2.0};
}

}  // namespace detail

inline BasisWindow bspline_window(double u, int grid_size) {
  if (grid_size < kMinGridSize) {
    throw Error(ErrorCode::kInvalidLayout, "spline grid needs at least 4 intervals");
  }
  const double g = static_cast<double>(grid_size);
  BasisWindow w;
  std::array<double, 4> b, db;
  if (u < 0.0 || u > 1.0) {
    const bool low = u < 0.0;
    const double edge = low ? 0.0 : 1.0;
    detail::local_basis(edge, b, db);
    w.first = low ? 0 : static_cast<std::size_t>(grid_size - 1);
    for (int j = 0; j < 4; ++j) {
      w.slope[j] = db[j] * g;
      w.value[j] = b[j] + w.slope[j] * (u - edge);
    }
    return w;
  }
  const double x = u * g;
  const int k = x < g - 1.0 ? static_cast<int>(x) : grid_size - 1;
  detail::local_basis(x - k, b, db);
  w.first = static_cast<std::size_t>(k);
  w.value = b;
  for (int j = 0; j < 4; ++j) w.slope[j] = db[j] * g;
  return w;
}

double bspline_value(std::span<const double> coef, int grid_size, double u);
double bspline_slope(std::span<const double> coef, int grid_size, double u);

// Least-squares coefficients reproducing f at the sample points; needs at
// least G + 3 distinct points.
std::vector<double> bspline_fit(std::span<const double> u, std::span<const double> f,
                                int grid_size);

}  // namespace rwt
