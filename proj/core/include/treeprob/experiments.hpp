#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "treeprob/approximation.hpp"
#include "treeprob/tree.hpp"

namespace treeprob {

struct GeneratorParams {
  std::size_t alphabet_size = 2;
  std::size_t max_depth = 4;
  double branching_probability = 0.5;  // chance that a non-root node is expanded
  std::uint64_t seed = 1;
  std::size_t max_nodes = 200;
  bool complete = false;  // expanded nodes get every label, not a random subset
};

/// Throws ParamsInvalid.
void validate(const GeneratorParams& params);

/// Labels "0" .. "k-1".
std::vector<Label> default_alphabet(std::size_t size);

/// Random tree. The root is always expanded; every other node below
/// max_depth is expanded with the branching probability while the node
/// budget allows. Leaf masses are a symmetric random point of the simplex,
/// exact in rational mode.
template <Scalar T>
BasicTree<T> generate_random_tree(const GeneratorParams& params);

/// Full alphabet-ary tree of the given depth with random leaf masses.
template <Scalar T>
BasicTree<T> generate_complete_tree(std::size_t alphabet_size, std::size_t depth, std::uint64_t seed);

/// Same shape as `tree`, fresh leaf masses drawn like generate_random_tree.
template <Scalar T>
BasicTree<T> resample_leaf_masses(const BasicTree<T>& tree, std::uint64_t seed);

/// Node values drawn uniformly from [-1, 1].
template <Scalar T>
NodeFunctional<T> random_functional(const BasicTree<T>& tree, std::uint64_t seed);

/// Random distribution over `labels`; with `full_support` false some masses
/// may be zero (never all of them).
template <Scalar T>
FiniteDistribution<T> random_distribution(std::span<const Label> labels, Rng& rng, bool full_support);

/// Greedy matcher: expand the leaf with the largest product probability
/// (ties by label path) with a full set of children while the leaf count
/// stays within `leaf_budget`, then quantize the product leaf probabilities
/// to a dyadic leaf distribution.
template <Scalar T>
BasicTree<T> grow_matcher_tree(const ProductSpec<T>& spec, std::size_t leaf_budget);

/// Dyadic distribution approximating `target` (values in (0, 1], summing to
/// at most one): each value is rounded down to a power of two, then entries
/// are doubled in order of largest ratio target/current (ties by position)
/// until the total is exactly one.
template <Scalar T>
std::vector<T> dyadic_quantize(std::span<const T> target);

struct SweepRow {
  std::size_t leaf_count = 0;
  double mean_length = 0.0;            // E[w(L)], branches
  double normalized_divergence = 0.0;  // bits per branch
  double entropy_rate = 0.0;           // bits per branch
  double entropy_rate_gap = 0.0;       // bits per branch
  double max_tail = 0.0;               // P[d(P_{S_B}, P_{S*}) >= epsilon]
};

/// One row per budget (in the given order, budgets strictly increasing).
/// Rows are computed concurrently.
template <Scalar T>
std::vector<SweepRow> convergence_sweep(const ProductSpec<T>& spec, std::span<const std::size_t> budgets,
                                        double epsilon);

/// Writes the header and one line per row; floats use the shortest
/// round-trip decimal.
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

#define TREEPROB_EXPERIMENTS_EXTERN(T)                                                                         \
  extern template BasicTree<T> generate_random_tree<T>(const GeneratorParams&);                                \
  extern template BasicTree<T> generate_complete_tree<T>(std::size_t, std::size_t, std::uint64_t);             \
  extern template BasicTree<T> resample_leaf_masses<T>(const BasicTree<T>&, std::uint64_t);                    \
  extern template NodeFunctional<T> random_functional<T>(const BasicTree<T>&, std::uint64_t);                  \
  extern template FiniteDistribution<T> random_distribution<T>(std::span<const Label>, Rng&, bool);            \
  extern template BasicTree<T> grow_matcher_tree<T>(const ProductSpec<T>&, std::size_t);                       \
  extern template std::vector<T> dyadic_quantize<T>(std::span<const T>);                                       \
  extern template std::vector<SweepRow> convergence_sweep<T>(const ProductSpec<T>&, std::span<const std::size_t>, \
                                                             double);

TREEPROB_EXPERIMENTS_EXTERN(double)
TREEPROB_EXPERIMENTS_EXTERN(Rational)
#undef TREEPROB_EXPERIMENTS_EXTERN

}  // namespace treeprob
