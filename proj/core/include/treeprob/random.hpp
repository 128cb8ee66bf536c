#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace treeprob {

/// Seedable pseudo-random source. Draws are derived from the raw engine
/// output by fixed formulas, so a seed reproduces bit-identical values on
/// any standard library.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n);

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard exponential variate.
  double exponential();

 private:
  std::mt19937_64 engine_;
};

}  // namespace treeprob
