#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "treeprob/random.hpp"
#include "treeprob/tree.hpp"

namespace treeprob {

/// Probability mass over a declared finite alphabet of labels. Zero masses
/// are allowed; the alphabet is the key set.
template <Scalar T>
class FiniteDistribution {
 public:
  /// Throws InvalidDistribution on negative masses, an empty alphabet, or a
  /// total that is not one.
  explicit FiniteDistribution(std::map<Label, T> mass);

  const std::map<Label, T>& masses() const { return mass_; }
  std::size_t size() const { return mass_.size(); }
  bool contains(const Label& label) const { return mass_.contains(label); }
  std::vector<Label> alphabet() const;

  /// Throws UnknownLabel outside the alphabet.
  const T& operator()(const Label& label) const;

  friend bool operator==(const FiniteDistribution&, const FiniteDistribution&) = default;

 private:
  std::map<Label, T> mass_;
};

/// d(P,Q) = sum |P(a) - Q(a)|, in [0, 2]. Throws AlphabetMismatch.
template <Scalar T>
T variational_distance(const FiniteDistribution<T>& p, const FiniteDistribution<T>& q);

/// D(P || Q) in bits. Throws AlphabetMismatch.
template <Scalar T>
double divergence(const FiniteDistribution<T>& p, const FiniteDistribution<T>& q);

template <Scalar T>
double entropy(const FiniteDistribution<T>& p);

/// Slack allowed when judging D >= d^2 / (2 ln 2) in floating point.
inline constexpr double kPinskerTolerance = 1e-12;

/// d^2 / (2 ln 2): the Pinsker lower bound on divergence in bits.
double pinsker_bound(double squared_distance);

struct PinskerCheck {
  double divergence = 0.0;  // bits
  double distance = 0.0;
  double bound = 0.0;  // bits
  bool holds = true;
};

template <Scalar T>
PinskerCheck pinsker_check(const FiniteDistribution<T>& p, const FiniteDistribution<T>& q);

/// The branching distribution P_{S*} assigned at every branching node. Its
/// alphabet is the set of branch labels, each with positive probability.
template <Scalar T>
class ProductSpec {
 public:
  explicit ProductSpec(FiniteDistribution<T> base);

  const FiniteDistribution<T>& base() const { return base_; }
  std::size_t alphabet_size() const { return base_.size(); }

  /// Throws UnknownLabel.
  const T& probability(const Label& label) const { return base_(label); }

 private:
  FiniteDistribution<T> base_;
};

/// Q+_j: product of P_{S*}(label) along the path to j. Not renormalized, so
/// leaf values sum to less than one on non-complete shapes.
template <Scalar T>
NodeProbabilities<T> product_node_probabilities(const BasicTree<T>& shape, const ProductSpec<T>& spec);

/// D(P_L || P+) = sum_i P_L(i) log2(P_L(i) / Q+_i), straight from the definition.
template <Scalar T>
double divergence_to_product(const BasicTree<T>& tree, const ProductSpec<T>& spec);

/// The same divergence as sum_j Q_j D(P_{S_j} || P_{S*}).
template <Scalar T>
double divergence_to_product_branch_sum(const BasicTree<T>& tree, const ProductSpec<T>& spec);

struct TailEntry {
  double epsilon = 0.0;
  double probability = 0.0;   // P[d(P_{S_B}, P_{S'_B}) >= epsilon], exact under P_B
  double markov_bound = 0.0;  // E[d] / epsilon
  bool markov_holds = true;
};

struct PinskerTreeReport {
  double normalized_divergence = 0.0;  // bits per branch
  double mean_distance = 0.0;          // E[d(P_{S_B}, P_{S'_B})]
  double mean_sq_distance = 0.0;       // E[d^2(P_{S_B}, P_{S'_B})]
  double bound = 0.0;                  // mean_sq_distance / (2 ln 2)
  bool holds = true;
  std::vector<TailEntry> tail;

  bool all_hold() const;
};

/// Pinsker's inequality for trees against a same-shape reference tree.
///
/// Nodes of p without a counterpart in q get distance 2; the normalized
/// divergence is +inf in that case.
template <Scalar T>
PinskerTreeReport tree_pinsker_report(const BasicTree<T>& p, const BasicTree<T>& q, std::span<const double> epsilons);

/// Pinsker's inequality for trees against the product distribution P+.
template <Scalar T>
PinskerTreeReport tree_pinsker_report(const BasicTree<T>& p, const ProductSpec<T>& spec,
                                      std::span<const double> epsilons);

/// A functional g on distributions together with a declared bound
/// g_max >= |g(P) - g(P_{S*})| over the simplex.
struct BoundedFunctional {
  std::string name;
  std::function<double(const FiniteDistribution<double>&)> evaluate;
  double bound = 0.0;
};

/// Entropy in bits, bounded by log2 of the alphabet size.
BoundedFunctional entropy_functional(std::size_t alphabet_size);

/// Samples random points of the spec's simplex and checks the declared bound.
bool spot_check_bound(const BoundedFunctional& g, const ProductSpec<double>& spec, Rng& rng, std::size_t samples);

/// |E[g(P_{S_B})] - g(P_{S*})| with B ~ P_B.
template <Scalar T>
double functional_convergence_gap(const BasicTree<T>& tree, const ProductSpec<T>& spec, const BoundedFunctional& g);

/// |H(P_L)/E[w(L)] - H(P_{S*})|, bits per branch.
template <Scalar T>
double entropy_rate_gap(const BasicTree<T>& tree, const ProductSpec<T>& spec);

#define TREEPROB_APPROX_EXTERN(T)                                                                                  \
  extern template class FiniteDistribution<T>;                                                                     \
  extern template T variational_distance<T>(const FiniteDistribution<T>&, const FiniteDistribution<T>&);           \
  extern template double divergence<T>(const FiniteDistribution<T>&, const FiniteDistribution<T>&);                \
  extern template double entropy<T>(const FiniteDistribution<T>&);                                                 \
  extern template PinskerCheck pinsker_check<T>(const FiniteDistribution<T>&, const FiniteDistribution<T>&);       \
  extern template class ProductSpec<T>;                                                                            \
  extern template NodeProbabilities<T> product_node_probabilities<T>(const BasicTree<T>&, const ProductSpec<T>&);  \
  extern template double divergence_to_product<T>(const BasicTree<T>&, const ProductSpec<T>&);                     \
  extern template double divergence_to_product_branch_sum<T>(const BasicTree<T>&, const ProductSpec<T>&);          \
  extern template PinskerTreeReport tree_pinsker_report<T>(const BasicTree<T>&, const BasicTree<T>&,               \
                                                           std::span<const double>);                               \
  extern template PinskerTreeReport tree_pinsker_report<T>(const BasicTree<T>&, const ProductSpec<T>&,             \
                                                           std::span<const double>);                               \
  extern template double functional_convergence_gap<T>(const BasicTree<T>&, const ProductSpec<T>&,                 \
                                                       const BoundedFunctional&);                                  \
  extern template double entropy_rate_gap<T>(const BasicTree<T>&, const ProductSpec<T>&);

TREEPROB_APPROX_EXTERN(double)
TREEPROB_APPROX_EXTERN(Rational)
#undef TREEPROB_APPROX_EXTERN

}  // namespace treeprob
