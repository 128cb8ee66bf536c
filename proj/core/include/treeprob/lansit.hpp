#pragma once

#include <utility>
#include <vector>

#include "treeprob/tree.hpp"

namespace treeprob {

/// Both sides of a leaf-average / node-sum identity.
///
/// `node_side` is evaluated by contracting deepest sibling sets into their
/// parent one at a time; `direct_node_side` sums over branching nodes in one
/// pass. The two must agree with each other and with `leaf_side`.
template <Scalar T>
struct LansitReport {
  T leaf_side{};
  T node_side{};
  T direct_node_side{};
  T residual{};  // leaf_side - node_side

  bool passed() const {
    return residual_ok<T>(residual, leaf_side) && residual_ok<T>(T{node_side - direct_node_side}, leaf_side);
  }
};

/// P_B(j) = Q_j / E[w(L)] over the branching nodes.
template <Scalar T>
struct BranchingNodeDistribution {
  std::vector<std::pair<NodeIndex, T>> mass;  // tree.branching_nodes() order
  T mean_length{};                            // E[w(L)], in branches
};

/// E[f(L)] - f(root) against sum_j Q_j E[Δf(S_j)].
template <Scalar T>
LansitReport<T> lansit_check(const BasicTree<T>& tree, const NodeFunctional<T>& f);

/// sum_j Q_j E[Δf(S_j)] by repeated leaf merging, deepest sibling set first.
template <Scalar T>
T node_sum_by_contraction(const BasicTree<T>& tree, const NodeFunctional<T>& f);

/// sum_j Q_j E[Δf(S_j)] computed directly from Q and the P_{S_j}.
template <Scalar T>
T node_sum_direct(const BasicTree<T>& tree, const NodeFunctional<T>& f);

/// E[w(L)] = sum over branching nodes of Q_j. Zero for a degenerate tree.
template <Scalar T>
T expected_path_length(const BasicTree<T>& tree);

/// H(P_L) in bits, as sum_j Q_j H(P_{S_j}).
template <Scalar T>
double leaf_entropy(const BasicTree<T>& tree);

/// D(P_L || P_L') in bits, as sum_j Q_j D(P_{S_j} || P_{S'_j}).
/// +inf when p puts mass where q has none; ShapeMismatch if shapes disagree.
template <Scalar T>
double tree_divergence(const BasicTree<T>& p, const BasicTree<T>& q);

/// Throws DegenerateTree when the root is a leaf.
template <Scalar T>
BranchingNodeDistribution<T> branching_node_distribution(const BasicTree<T>& tree);

/// (E[f(L)] - f(root)) / E[w(L)] against E[Δf(S_B)] with B ~ P_B.
template <Scalar T>
LansitReport<T> differential_lansit_check(const BasicTree<T>& tree, const NodeFunctional<T>& f);

/// E[H(P_{S_B})], equal to H(P_L)/E[w(L)]; bits per branch.
template <Scalar T>
double entropy_rate(const BasicTree<T>& tree);

/// E[D(P_{S_B} || P_{S'_B})] with P_B taken from p; bits per branch.
template <Scalar T>
double normalized_divergence(const BasicTree<T>& p, const BasicTree<T>& q);

/// f(j) = -log2 Q_j.
template <Scalar T>
NodeFunctional<double> self_information(const BasicTree<T>& tree);

/// f(j) = log2(Q_j / Q'_j) on the nodes of p; +inf where q has no counterpart.
template <Scalar T>
NodeFunctional<double> log_likelihood_ratio(const BasicTree<T>& p, const BasicTree<T>& q);

#define TREEPROB_LANSIT_EXTERN(T)                                                                          \
  extern template LansitReport<T> lansit_check<T>(const BasicTree<T>&, const NodeFunctional<T>&);          \
  extern template T node_sum_by_contraction<T>(const BasicTree<T>&, const NodeFunctional<T>&);             \
  extern template T node_sum_direct<T>(const BasicTree<T>&, const NodeFunctional<T>&);                     \
  extern template T expected_path_length<T>(const BasicTree<T>&);                                          \
  extern template double leaf_entropy<T>(const BasicTree<T>&);                                             \
  extern template double tree_divergence<T>(const BasicTree<T>&, const BasicTree<T>&);                     \
  extern template BranchingNodeDistribution<T> branching_node_distribution<T>(const BasicTree<T>&);        \
  extern template LansitReport<T> differential_lansit_check<T>(const BasicTree<T>&, const NodeFunctional<T>&); \
  extern template double entropy_rate<T>(const BasicTree<T>&);                                             \
  extern template double normalized_divergence<T>(const BasicTree<T>&, const BasicTree<T>&);               \
  extern template NodeFunctional<double> self_information<T>(const BasicTree<T>&);                         \
  extern template NodeFunctional<double> log_likelihood_ratio<T>(const BasicTree<T>&, const BasicTree<T>&);

TREEPROB_LANSIT_EXTERN(double)
TREEPROB_LANSIT_EXTERN(Rational)
#undef TREEPROB_LANSIT_EXTERN

}  // namespace treeprob
