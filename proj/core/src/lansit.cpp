#include "treeprob/lansit.hpp"

#include <cmath>
#include <limits>
#include <queue>

#include "treeprob/information.hpp"

namespace treeprob {
namespace {

template <Scalar T>
void require_complete(const BasicTree<T>& tree, const NodeFunctional<T>& f) {
  if (f.values.size() != tree.size()) {
    throw Error(Errc::FunctionalIncomplete, "functional has " + std::to_string(f.values.size()) +
                                                " values for a tree of " + std::to_string(tree.size()) + " nodes");
  }
}

template <Scalar T>
void require_branching(const BasicTree<T>& tree) {
  if (tree.is_degenerate()) {
    throw Error(Errc::DegenerateTree, "root '" + tree.id(tree.root()) + "' is a leaf, E[w(L)] = 0");
  }
}

// E[f(L)] - f(root)
template <Scalar T>
T leaf_average_increment(const BasicTree<T>& tree, const NodeFunctional<T>& f) {
  T sum{0};
  for (const auto i : tree.leaves()) {
    sum += tree.leaf_mass(i) * f(i);
  }
  return T{sum - f(tree.root())};
}

// D(P_{S_j} || P_{S'_k}) for p's branching node j aligned to q's node k.
template <Scalar T>
double branch_divergence(const BasicTree<T>& p, const NodeProbabilities<T>& qp, NodeIndex j, const BasicTree<T>& q,
                         const NodeProbabilities<T>& qq, NodeIndex k) {
  double d = 0.0;
  for (const auto c : p.children(j)) {
    const auto pc = to_double(T{qp[c] / qp[j]});
    const auto kc = q.child_with_label(k, p.label(c));
    const auto qc = kc == kNoNode ? 0.0 : to_double(T{qq[kc] / qq[k]});
    d += divergence_term_bits(pc, qc);
  }
  return d;
}

template <Scalar T>
std::vector<double> per_branch_divergence(const BasicTree<T>& p, const BasicTree<T>& q) {
  const auto to_q = align_by_labels(p, q);
  const auto qp = node_probabilities(p);
  const auto qq = node_probabilities(q);
  std::vector<double> d;
  d.reserve(p.branching_nodes().size());
  for (const auto j : p.branching_nodes()) {
    // Unaligned nodes sit below a support violation that is already +inf.
    d.push_back(to_q[j] == kNoNode ? 0.0 : branch_divergence(p, qp, j, q, qq, to_q[j]));
  }
  return d;
}

}  // namespace

template <Scalar T>
T node_sum_by_contraction(const BasicTree<T>& tree, const NodeFunctional<T>& f) {
  require_complete(tree, f);
  std::vector<std::size_t> depth(tree.size(), 0);
  for (NodeIndex j = 1; j < tree.size(); ++j) {
    depth[j] = depth[tree.parent(j)] + 1;
  }
  // mass[i] is P_L(i) for the leaves of the current, partially merged tree.
  std::vector<T> mass(tree.size(), T{0});
  for (const auto i : tree.leaves()) {
    mass[i] = tree.leaf_mass(i);
  }
  using Entry = std::pair<std::size_t, NodeIndex>;
  std::priority_queue<Entry> deepest;
  for (const auto j : tree.branching_nodes()) {
    deepest.emplace(depth[j], j);
  }
  T total{0};
  while (!deepest.empty()) {
    const auto j = deepest.top().second;
    deepest.pop();
    // All successors of j are leaves now: deeper sets were merged first.
    T q_j{0};
    for (const auto c : tree.children(j)) {
      q_j += mass[c];
    }
    T expected_delta{0};
    for (const auto c : tree.children(j)) {
      expected_delta += (mass[c] / q_j) * f.delta(tree, c);
    }
    total += q_j * expected_delta;
    mass[j] = q_j;  // j becomes a leaf with P_L(j) = Q_j
  }
  return total;
}

template <Scalar T>
T node_sum_direct(const BasicTree<T>& tree, const NodeFunctional<T>& f) {
  require_complete(tree, f);
  const auto q = node_probabilities(tree);
  const auto dists = branching_distributions(tree, q);
  T total{0};
  for (const auto& dist : dists) {
    T expected_delta{0};
    const auto children = tree.children(dist.node);
    for (std::size_t k = 0; k < children.size(); ++k) {
      expected_delta += dist.mass[k].second * f.delta(tree, children[k]);
    }
    total += q[dist.node] * expected_delta;
  }
  return total;
}

template <Scalar T>
LansitReport<T> lansit_check(const BasicTree<T>& tree, const NodeFunctional<T>& f) {
  require_complete(tree, f);
  LansitReport<T> report;
  report.leaf_side = leaf_average_increment(tree, f);
  report.node_side = node_sum_by_contraction(tree, f);
  report.direct_node_side = node_sum_direct(tree, f);
  report.residual = report.leaf_side - report.node_side;
  return report;
}

template <Scalar T>
T expected_path_length(const BasicTree<T>& tree) {
  const auto q = node_probabilities(tree);
  T sum{0};
  for (const auto j : tree.branching_nodes()) {
    sum += q[j];
  }
  return sum;
}

template <Scalar T>
double leaf_entropy(const BasicTree<T>& tree) {
  const auto q = node_probabilities(tree);
  WeightedSum<T> h;
  std::vector<double> p;
  for (const auto& dist : branching_distributions(tree, q)) {
    p.clear();
    for (const auto& [label, mass] : dist.mass) {
      p.push_back(to_double(mass));
    }
    h.add(q[dist.node], entropy_bits(p));
  }
  return h.value();
}

template <Scalar T>
double tree_divergence(const BasicTree<T>& p, const BasicTree<T>& q) {
  const auto d = per_branch_divergence(p, q);
  const auto qp = node_probabilities(p);
  WeightedSum<T> total;
  for (std::size_t k = 0; k < d.size(); ++k) {
    total.add(qp[p.branching_nodes()[k]], d[k]);
  }
  return total.value();
}

template <Scalar T>
BranchingNodeDistribution<T> branching_node_distribution(const BasicTree<T>& tree) {
  require_branching(tree);
  const auto q = node_probabilities(tree);
  BranchingNodeDistribution<T> result;
  for (const auto j : tree.branching_nodes()) {
    result.mean_length += q[j];
  }
  for (const auto j : tree.branching_nodes()) {
    result.mass.emplace_back(j, T{q[j] / result.mean_length});
  }
  return result;
}

template <Scalar T>
LansitReport<T> differential_lansit_check(const BasicTree<T>& tree, const NodeFunctional<T>& f) {
  require_complete(tree, f);
  const auto pb = branching_node_distribution(tree);
  const auto dists = branching_distributions(tree);
  LansitReport<T> report;
  report.leaf_side = leaf_average_increment(tree, f) / pb.mean_length;
  for (std::size_t k = 0; k < dists.size(); ++k) {
    const auto children = tree.children(dists[k].node);
    T expected_delta{0};
    for (std::size_t c = 0; c < children.size(); ++c) {
      expected_delta += dists[k].mass[c].second * f.delta(tree, children[c]);
    }
    report.node_side += pb.mass[k].second * expected_delta;
  }
  report.direct_node_side = node_sum_direct(tree, f) / pb.mean_length;
  report.residual = report.leaf_side - report.node_side;
  return report;
}

template <Scalar T>
double entropy_rate(const BasicTree<T>& tree) {
  const auto pb = branching_node_distribution(tree);
  const auto dists = branching_distributions(tree);
  WeightedSum<T> rate;
  std::vector<double> p;
  for (std::size_t k = 0; k < dists.size(); ++k) {
    p.clear();
    for (const auto& [label, mass] : dists[k].mass) {
      p.push_back(to_double(mass));
    }
    rate.add(pb.mass[k].second, entropy_bits(p));
  }
  return rate.value();
}

template <Scalar T>
double normalized_divergence(const BasicTree<T>& p, const BasicTree<T>& q) {
  const auto pb = branching_node_distribution(p);
  const auto d = per_branch_divergence(p, q);
  WeightedSum<T> total;
  for (std::size_t k = 0; k < d.size(); ++k) {
    total.add(pb.mass[k].second, d[k]);
  }
  return total.value();
}

template <Scalar T>
NodeFunctional<double> self_information(const BasicTree<T>& tree) {
  const auto q = node_probabilities(tree);
  NodeFunctional<double> f;
  f.values.reserve(tree.size());
  for (NodeIndex j = 0; j < tree.size(); ++j) {
    f.values.push_back(-std::log2(to_double(q[j])));
  }
  return f;
}

template <Scalar T>
NodeFunctional<double> log_likelihood_ratio(const BasicTree<T>& p, const BasicTree<T>& q) {
  const auto to_q = align_by_labels(p, q);
  const auto qp = node_probabilities(p);
  const auto qq = node_probabilities(q);
  NodeFunctional<double> f;
  f.values.reserve(p.size());
  for (NodeIndex j = 0; j < p.size(); ++j) {
    f.values.push_back(to_q[j] == kNoNode ? std::numeric_limits<double>::infinity()
                                          : std::log2(to_double(T{qp[j] / qq[to_q[j]]})));
  }
  return f;
}

#define TREEPROB_LANSIT_INSTANTIATE(T)                                                               \
  template LansitReport<T> lansit_check<T>(const BasicTree<T>&, const NodeFunctional<T>&);           \
  template T node_sum_by_contraction<T>(const BasicTree<T>&, const NodeFunctional<T>&);              \
  template T node_sum_direct<T>(const BasicTree<T>&, const NodeFunctional<T>&);                      \
  template T expected_path_length<T>(const BasicTree<T>&);                                           \
  template double leaf_entropy<T>(const BasicTree<T>&);                                              \
  template double tree_divergence<T>(const BasicTree<T>&, const BasicTree<T>&);                      \
  template BranchingNodeDistribution<T> branching_node_distribution<T>(const BasicTree<T>&);         \
  template LansitReport<T> differential_lansit_check<T>(const BasicTree<T>&, const NodeFunctional<T>&); \
  template double entropy_rate<T>(const BasicTree<T>&);                                              \
  template double normalized_divergence<T>(const BasicTree<T>&, const BasicTree<T>&);                \
  template NodeFunctional<double> self_information<T>(const BasicTree<T>&);                          \
  template NodeFunctional<double> log_likelihood_ratio<T>(const BasicTree<T>&, const BasicTree<T>&);

TREEPROB_LANSIT_INSTANTIATE(double)
TREEPROB_LANSIT_INSTANTIATE(Rational)

}  // namespace treeprob
