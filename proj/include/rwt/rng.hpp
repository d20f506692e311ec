#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace rwt {

// Mixes a base seed with a stream index (splitmix64 finalizer). Used to give
// every tree, fold, or experiment job its own reproducible substream, so the
// result does not depend on the order in which workers run.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Deterministic generator on top of std::mt19937_64. The conversions below are
// spelled out instead of using <random> distributions, whose output is
// implementation-defined; this keeps splits and synthetic data identical
// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; one draw consumes two uniforms.
  double normal();

  // Uniform integer in [0, n) by rejection; n > 0.
  std::uint64_t below(std::uint64_t n);

  // Fisher-Yates, walking from the back.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rwt
