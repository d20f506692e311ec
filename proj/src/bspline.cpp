#include "rwt/bspline.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "rwt/error.hpp"

namespace rwt {

std::size_t bspline_coef_count(int grid_size) {
  if (grid_size < kMinGridSize) {
    throw Error(ErrorCode::kInvalidLayout, "spline grid needs at least 4 intervals");
  }
  return static_cast<std::size_t>(grid_size) + 3;
}

double bspline_value(std::span<const double> coef, int grid_size, double u) {
  const BasisWindow w = bspline_window(u, grid_size);
  double s = 0.0;
  for (int j = 0; j < 4; ++j) s += coef[w.first + j] * w.value[j];
  return s;
}

double bspline_slope(std::span<const double> coef, int grid_size, double u) {
  const BasisWindow w = bspline_window(u, grid_size);
  double s = 0.0;
  for (int j = 0; j < 4; ++j) s += coef[w.first + j] * w.slope[j];
  return s;
}

std::vector<double> bspline_fit(std::span<const double> u, std::span<const double> f,
                                int grid_size) {
  const std::size_t m = bspline_coef_count(grid_size);
  if (u.size() != f.size() || u.size() < m) {
    throw Error(ErrorCode::kInvalidParam, "spline fit needs at least G + 3 samples");
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(u.size()),
                                            static_cast<Eigen::Index>(m));
  Eigen::VectorXd b(static_cast<Eigen::Index>(u.size()));
  for (std::size_t i = 0; i < u.size(); ++i) {
    const BasisWindow w = bspline_window(u[i], grid_size);
    for (int j = 0; j < 4; ++j) {
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(w.first + j)) = w.value[j];
    }
    b(static_cast<Eigen::Index>(i)) = f[i];
  }
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
  return std::vector<double>(c.data(), c.data() + c.size());
}

}  // namespace rwt
