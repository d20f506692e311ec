#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "rwt/core_data.hpp"

namespace rwt {

// Common prediction contract for every trained model. Inputs and outputs are
// in normalized space.
class Regressor {
 public:
  virtual ~Regressor() = default;

  virtual std::size_t input_dim() const = 0;
  // Throws Error(kDimensionMismatch) when x.size() != input_dim().
  virtual double predict(std::span<const double> x) const = 0;
  virtual std::string kind() const = 0;

  // Optional fast path for coalition enumeration. For every mask S below
  // 2^input_dim() writes predict(z) to out[S], where z takes x on the bits of
  // S and b elsewhere, bit-identical to calling predict. Returns false when
  // the model has no such evaluator.
  virtual bool hybrid_predictions(std::span<const double> x, std::span<const double> b,
                                  std::span<double> out) const;

  std::vector<double> predict_rows(const Matrix& x) const;
};

void check_dimension(std::size_t expected, std::size_t actual);

}  // namespace rwt
