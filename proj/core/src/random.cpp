#include "treeprob/random.hpp"

#include <cmath>
#include <limits>

namespace treeprob {

std::uint64_t Rng::below(std::uint64_t n) {
  // Rejection sampling keeps the result unbiased.
  const auto limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  for (;;) {
    const auto x = next();
    if (x < limit) {
      return x % n;
    }
  }
}

double Rng::exponential() { return -std::log1p(-uniform()); }

}  // namespace treeprob
