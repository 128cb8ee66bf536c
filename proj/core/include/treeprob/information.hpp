#pragma once

#include <span>

namespace treeprob {

/// Shannon entropy in bits, with 0 log 0 = 0.
double entropy_bits(std::span<const double> p);

/// One term p log2(p/q) of a divergence: 0 when p = 0, +inf when q = 0 < p.
double divergence_term_bits(double p, double q);

}  // namespace treeprob
