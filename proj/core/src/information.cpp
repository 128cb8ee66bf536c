#include "treeprob/information.hpp"

#include <cmath>
#include <limits>

namespace treeprob {

double entropy_bits(std::span<const double> p) {
  double h = 0.0;
  for (const auto x : p) {
    if (x > 0.0) {
      h -= x * std::log2(x);
    }
  }
  return h;
}

double divergence_term_bits(double p, double q) {
  if (p <= 0.0) {
    return 0.0;
  }
  if (q <= 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return p * std::log2(p / q);
}

}  // namespace treeprob
