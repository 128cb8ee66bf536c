#pragma once

// Shared test fixtures and brute-force oracles. The oracles work from leaf
// masses and label paths only; none of them calls the node-sum code they are
// used to check.

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "treeprob/tree.hpp"

namespace treeprob::testing {

/// The worked example: leaves {2, 5, 6}, branching nodes {0, 1, 3}.
inline std::vector<Edge> example_edges() {
  return {{"0", {"a"}, "1"}, {"0", {"b"}, "2"}, {"1", {"a"}, "3"}, {"3", {"a"}, "5"}, {"3", {"b"}, "6"}};
}

template <Scalar T>
LeafMassMap<T> example_masses() {
  if constexpr (is_exact_v<T>) {
    return {{"2", Rational(1, 4)}, {"5", Rational(1, 2)}, {"6", Rational(1, 4)}};
  } else {
    return {{"2", 0.25}, {"5", 0.5}, {"6", 0.25}};
  }
}

template <Scalar T>
BasicTree<T> example_tree() {
  return build_tree<T>(example_edges(), example_masses<T>());
}

template <Scalar T>
BasicTree<T> example_tree_with(const T& m2, const T& m5, const T& m6) {
  return build_tree<T>(example_edges(), LeafMassMap<T>{{"2", m2}, {"5", m5}, {"6", m6}});
}

inline const char* kExampleDocument = R"({
  "version": "1",
  "root": 0,
  "edges": [[0, "a", 1], [0, "b", 2], [1, "a", 3], [3, "a", 5], [3, "b", 6]],
  "leaf_mass": {"2": "1/4", "5": "1/2", "6": "1/4"}
})";

/// Node probability by brute force: sum of leaf masses whose root path passes j.
template <Scalar T>
T brute_force_q(const BasicTree<T>& tree, NodeIndex j) {
  T q{0};
  for (const auto i : tree.leaves()) {
    for (auto k = i; k != kNoNode; k = tree.parent(k)) {
      if (k == j) {
        q += tree.leaf_mass(i);
        break;
      }
    }
  }
  return q;
}

template <Scalar T>
std::size_t depth_by_walk(const BasicTree<T>& tree, NodeIndex j) {
  std::size_t d = 0;
  for (; j != tree.root(); j = tree.parent(j)) {
    ++d;
  }
  return d;
}

/// Leaf-side expectation sum_i P_L(i) f(i) - f(root).
template <Scalar T>
T leaf_side(const BasicTree<T>& tree, const std::vector<T>& f) {
  T s{0};
  for (const auto i : tree.leaves()) {
    s += tree.leaf_mass(i) * f[i];
  }
  return T{s - f[tree.root()]};
}

template <Scalar T>
double leaf_entropy_oracle(const BasicTree<T>& tree) {
  double h = 0.0;
  for (const auto i : tree.leaves()) {
    const auto p = to_double(tree.leaf_mass(i));
    h -= p * std::log2(p);
  }
  return h;
}

template <Scalar T>
std::map<std::vector<Label>, T> leaf_distribution_by_path(const BasicTree<T>& tree) {
  std::map<std::vector<Label>, T> out;
  for (const auto i : tree.leaves()) {
    out[tree.label_path(i)] = tree.leaf_mass(i);
  }
  return out;
}

/// sum_i P_L(i) log2(P_L(i) / P_L'(i)) with leaves matched by label path.
template <Scalar T>
double leaf_divergence_oracle(const BasicTree<T>& p, const BasicTree<T>& q) {
  const auto qp = leaf_distribution_by_path(q);
  double d = 0.0;
  for (const auto& [path, mass] : leaf_distribution_by_path(p)) {
    const auto it = qp.find(path);
    if (it == qp.end()) {
      return INFINITY;
    }
    d += to_double(mass) * std::log2(to_double(T{mass / it->second}));
  }
  return d;
}

/// Chain rule sum_k E[H(X_k | X^{k-1})] from a joint distribution over
/// equal-length sequences, marginalizing prefixes directly.
inline double chain_rule_entropy(const std::map<std::vector<Label>, double>& joint) {
  if (joint.empty()) {
    return 0.0;
  }
  const auto n = joint.begin()->first.size();
  double total = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    std::map<std::vector<Label>, double> prefix;  // P(x^{k-1})
    std::map<std::vector<Label>, double> extended;  // P(x^k)
    for (const auto& [seq, p] : joint) {
      prefix[std::vector<Label>(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(k - 1))] += p;
      extended[std::vector<Label>(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(k))] += p;
    }
    for (const auto& [seq, p] : extended) {
      if (p > 0.0) {
        const auto cond = p / prefix[std::vector<Label>(seq.begin(), seq.end() - 1)];
        total -= p * std::log2(cond);
      }
    }
  }
  return total;
}

inline bool near_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(1.0, std::abs(b));
}

}  // namespace treeprob::testing
