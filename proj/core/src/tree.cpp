#include "treeprob/tree.hpp"

#include <algorithm>
#include <set>

namespace treeprob {

template <Scalar T>
BasicTree<T>::BasicTree(detail::ValidatedTag, std::vector<Node> nodes) : nodes_(std::move(nodes)) {
  for (NodeIndex j = 0; j < nodes_.size(); ++j) {
    (nodes_[j].children.empty() ? leaves_ : branching_).push_back(j);
    index_.emplace(nodes_[j].id, j);
  }
}

template <Scalar T>
std::optional<NodeIndex> BasicTree<T>::find(std::string_view id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) {
    return std::nullopt;
  }
  return it->second;
}

template <Scalar T>
NodeIndex BasicTree<T>::child_with_label(NodeIndex j, const Label& label) const {
  for (const auto c : nodes_[j].children) {
    if (nodes_[c].label == label) {
      return c;
    }
  }
  return kNoNode;
}

template <Scalar T>
std::vector<Label> BasicTree<T>::alphabet() const {
  std::set<Label> labels;
  for (NodeIndex j = 1; j < nodes_.size(); ++j) {
    labels.insert(nodes_[j].label);
  }
  return {labels.begin(), labels.end()};
}

template <Scalar T>
std::vector<Label> BasicTree<T>::label_path(NodeIndex j) const {
  std::vector<Label> path;
  for (; j != root(); j = nodes_[j].parent) {
    path.push_back(nodes_[j].label);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

namespace {

struct RawNode {
  std::string id;
  NodeIndex parent = kNoNode;
  Label label;
  std::vector<NodeIndex> children;
};

class RawGraph {
 public:
  NodeIndex intern(const std::string& id) {
    const auto [it, inserted] = index_.emplace(id, nodes_.size());
    if (inserted) {
      nodes_.emplace_back().id = id;
    }
    return it->second;
  }

  std::optional<NodeIndex> find(std::string_view id) const {
    const auto it = index_.find(id);
    return it == index_.end() ? std::nullopt : std::optional{it->second};
  }

  std::vector<RawNode>& nodes() { return nodes_; }

 private:
  std::vector<RawNode> nodes_;
  std::map<std::string, NodeIndex, std::less<>> index_;
};

NodeIndex resolve_root(RawGraph& graph, const std::optional<std::string>& declared) {
  auto& nodes = graph.nodes();
  std::vector<NodeIndex> parentless;
  for (NodeIndex j = 0; j < nodes.size(); ++j) {
    if (nodes[j].parent == kNoNode) {
      parentless.push_back(j);
    }
  }
  if (parentless.empty()) {
    throw Error(Errc::CycleDetected, "every node has a parent");
  }
  if (parentless.size() > 1) {
    throw Error(Errc::MultipleRoots,
                "nodes '" + nodes[parentless[0]].id + "' and '" + nodes[parentless[1]].id + "' both lack a parent");
  }
  if (declared && nodes[parentless.front()].id != *declared) {
    throw Error(Errc::MultipleRoots,
                "declared root '" + *declared + "' has a parent; '" + nodes[parentless.front()].id + "' has none");
  }
  return parentless.front();
}

}  // namespace

template <Scalar T>
BasicTree<T> build_tree(std::span<const Edge> edges, const LeafMassMap<T>& leaf_mass,
                        const std::optional<std::string>& root) {
  RawGraph graph;
  for (const auto& edge : edges) {
    const auto p = graph.intern(edge.parent);
    const auto c = graph.intern(edge.child);
    auto& nodes = graph.nodes();
    if (p == c) {
      throw Error(Errc::CycleDetected, "self-loop at node '" + edge.parent + "'");
    }
    if (nodes[c].parent != kNoNode) {
      throw Error(Errc::MultipleParents, "node '" + edge.child + "' has parents '" + nodes[nodes[c].parent].id +
                                             "' and '" + edge.parent + "'");
    }
    nodes[c].parent = p;
    nodes[c].label = edge.label;
    nodes[p].children.push_back(c);
  }
  if (root) {
    graph.intern(*root);
  } else if (edges.empty()) {
    if (leaf_mass.size() != 1) {
      throw Error(Errc::MultipleRoots, "edgeless tree needs exactly one node, got " + std::to_string(leaf_mass.size()));
    }
    graph.intern(leaf_mass.begin()->first);
  }

  auto& nodes = graph.nodes();
  const auto root_index = resolve_root(graph, root);

  // Reachability: with unique parents, anything unreached sits on a cycle.
  std::vector<NodeIndex> order;
  order.reserve(nodes.size());
  std::vector<NodeIndex> stack{root_index};
  while (!stack.empty()) {
    const auto j = stack.back();
    stack.pop_back();
    order.push_back(j);
    const auto& children = nodes[j].children;
    stack.insert(stack.end(), children.rbegin(), children.rend());
  }
  if (order.size() != nodes.size()) {
    std::vector<bool> reached(nodes.size(), false);
    for (const auto j : order) {
      reached[j] = true;
    }
    const auto it = std::find(reached.begin(), reached.end(), false);
    throw Error(Errc::CycleDetected, "node '" + nodes[static_cast<NodeIndex>(it - reached.begin())].id +
                                         "' is not reachable from the root");
  }

  for (const auto& node : nodes) {
    std::set<Label> seen;
    for (const auto c : node.children) {
      if (!seen.insert(nodes[c].label).second) {
        throw Error(Errc::DuplicateSiblingLabel,
                    "node '" + node.id + "' has two children labeled '" + nodes[c].label.symbol + "'");
      }
    }
  }

  std::vector<T> mass(nodes.size(), T{0});
  T total{0};
  for (const auto& [id, value] : leaf_mass) {
    const auto j = graph.find(id);
    if (!j) {
      throw Error(Errc::UnknownNode, "leaf mass given for unknown node '" + id + "'");
    }
    if (!nodes[*j].children.empty()) {
      throw Error(Errc::MassOnBranchingNode, "leaf mass given for branching node '" + id + "'");
    }
    if (!(value >= 0)) {
      throw Error(Errc::NegativeMass, "node '" + id + "' has mass " + format_scalar(value));
    }
    mass[*j] = value;
    total += value;
  }
  if (!is_unit_mass(total)) {
    throw Error(Errc::MassNotNormalized, "leaf masses sum to " + format_scalar(total));
  }

  // Keep a node iff positive mass lies below it; `order` is preorder.
  std::vector<bool> keep(nodes.size(), false);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto j = *it;
    if (nodes[j].children.empty()) {
      keep[j] = mass[j] > 0;
    } else {
      keep[j] = std::any_of(nodes[j].children.begin(), nodes[j].children.end(), [&](NodeIndex c) { return keep[c]; });
    }
  }

  std::vector<NodeIndex> remap(nodes.size(), kNoNode);
  std::vector<typename BasicTree<T>::Node> out;
  for (const auto j : order) {
    if (!keep[j]) {
      continue;
    }
    remap[j] = out.size();
    auto& node = out.emplace_back();
    node.id = nodes[j].id;
    node.label = nodes[j].label;
    node.leaf_mass = mass[j];
    if (j != root_index) {
      node.parent = remap[nodes[j].parent];
      out[node.parent].children.push_back(remap[j]);
    }
  }
  return BasicTree<T>(detail::ValidatedTag{}, std::move(out));
}

template <Scalar To, Scalar From>
BasicTree<To> convert_tree(const BasicTree<From>& tree) {
  std::vector<typename BasicTree<To>::Node> out;
  out.reserve(tree.size());
  for (NodeIndex j = 0; j < tree.size(); ++j) {
    const auto& n = tree.node(j);
    out.push_back({n.id, n.parent, n.label, n.children, scalar_cast<To>(n.leaf_mass)});
  }
  return BasicTree<To>(detail::ValidatedTag{}, std::move(out));
}

template <Scalar T>
std::vector<Edge> edges_of(const BasicTree<T>& tree) {
  std::vector<Edge> edges;
  edges.reserve(tree.size());
  for (NodeIndex j = 1; j < tree.size(); ++j) {
    edges.push_back({tree.id(tree.parent(j)), tree.label(j), tree.id(j)});
  }
  return edges;
}

template <Scalar T>
LeafMassMap<T> leaf_masses_of(const BasicTree<T>& tree) {
  LeafMassMap<T> masses;
  for (const auto i : tree.leaves()) {
    masses.emplace(tree.id(i), tree.leaf_mass(i));
  }
  return masses;
}

template <Scalar T>
BasicTree<T> with_leaf_masses(const BasicTree<T>& tree, std::span<const T> masses) {
  if (masses.size() != tree.leaves().size()) {
    throw Error(Errc::ParamsInvalid, "expected " + std::to_string(tree.leaves().size()) + " leaf masses, got " +
                                         std::to_string(masses.size()));
  }
  LeafMassMap<T> by_id;
  for (std::size_t k = 0; k < masses.size(); ++k) {
    by_id.emplace(tree.id(tree.leaves()[k]), masses[k]);
  }
  const auto edges = edges_of(tree);
  return build_tree<T>(edges, by_id, tree.id(tree.root()));
}

template <Scalar T>
NodeProbabilities<T> node_probabilities(const BasicTree<T>& tree) {
  NodeProbabilities<T> result{std::vector<T>(tree.size(), T{0})};
  auto& q = result.q;
  for (NodeIndex j = tree.size(); j-- > 0;) {
    if (tree.is_leaf(j)) {
      q[j] = tree.leaf_mass(j);
    }
    if (j != tree.root()) {
      q[tree.parent(j)] += q[j];
    }
  }
  return result;
}

template <Scalar T>
T BranchingDistribution<T>::probability(const Label& label) const {
  for (const auto& [l, p] : mass) {
    if (l == label) {
      return p;
    }
  }
  return T{0};
}

template <Scalar T>
std::vector<BranchingDistribution<T>> branching_distributions(const BasicTree<T>& tree,
                                                              const NodeProbabilities<T>& q) {
  std::vector<BranchingDistribution<T>> result;
  result.reserve(tree.branching_nodes().size());
  for (const auto j : tree.branching_nodes()) {
    auto& dist = result.emplace_back();
    dist.node = j;
    for (const auto c : tree.children(j)) {
      dist.mass.emplace_back(tree.label(c), T{q[c] / q[j]});
    }
  }
  return result;
}

template <Scalar T>
std::vector<BranchingDistribution<T>> branching_distributions(const BasicTree<T>& tree) {
  return branching_distributions(tree, node_probabilities(tree));
}

template <Scalar T>
NodeFunctional<T> NodeFunctional<T>::from_map(const BasicTree<T>& tree,
                                              const std::map<std::string, T, std::less<>>& by_id) {
  NodeFunctional f;
  f.values.reserve(tree.size());
  for (NodeIndex j = 0; j < tree.size(); ++j) {
    const auto it = by_id.find(tree.id(j));
    if (it == by_id.end()) {
      throw Error(Errc::FunctionalIncomplete, "no value for node '" + tree.id(j) + "'");
    }
    f.values.push_back(it->second);
  }
  return f;
}

template <Scalar T>
NodeFunctional<T> path_lengths(const BasicTree<T>& tree) {
  NodeFunctional<T> w{std::vector<T>(tree.size(), T{0})};
  for (NodeIndex j = 1; j < tree.size(); ++j) {
    w.values[j] = w.values[tree.parent(j)] + 1;
  }
  return w;
}

template <Scalar T>
std::vector<NodeIndex> align_by_labels(const BasicTree<T>& p, const BasicTree<T>& q) {
  std::vector<NodeIndex> to_q(p.size(), kNoNode);
  to_q[p.root()] = q.root();
  for (NodeIndex j = 0; j < p.size(); ++j) {
    if (j != p.root()) {
      const auto parent = to_q[p.parent(j)];
      to_q[j] = parent == kNoNode ? kNoNode : q.child_with_label(parent, p.label(j));
    }
    const auto k = to_q[j];
    if (k != kNoNode && p.is_leaf(j) != q.is_leaf(k)) {
      throw Error(Errc::ShapeMismatch, "node '" + p.id(j) + "' is a " + (p.is_leaf(j) ? "leaf" : "branching node") +
                                           " but its counterpart '" + q.id(k) + "' is not");
    }
  }
  return to_q;
}

#define TREEPROB_TREE_INSTANTIATE(T)                                                                        \
  template class BasicTree<T>;                                                                              \
  template BasicTree<T> build_tree<T>(std::span<const Edge>, const LeafMassMap<T>&,                         \
                                      const std::optional<std::string>&);                                  \
  template std::vector<Edge> edges_of<T>(const BasicTree<T>&);                                              \
  template LeafMassMap<T> leaf_masses_of<T>(const BasicTree<T>&);                                           \
  template BasicTree<T> with_leaf_masses<T>(const BasicTree<T>&, std::span<const T>);                       \
  template NodeProbabilities<T> node_probabilities<T>(const BasicTree<T>&);                                 \
  template struct BranchingDistribution<T>;                                                                 \
  template std::vector<BranchingDistribution<T>> branching_distributions<T>(const BasicTree<T>&,            \
                                                                            const NodeProbabilities<T>&);   \
  template std::vector<BranchingDistribution<T>> branching_distributions<T>(const BasicTree<T>&);           \
  template struct NodeFunctional<T>;                                                                        \
  template NodeFunctional<T> path_lengths<T>(const BasicTree<T>&);                                          \
  template std::vector<NodeIndex> align_by_labels<T>(const BasicTree<T>&, const BasicTree<T>&);

TREEPROB_TREE_INSTANTIATE(double)
TREEPROB_TREE_INSTANTIATE(Rational)

template BasicTree<double> convert_tree<double, Rational>(const BasicTree<Rational>&);
template BasicTree<Rational> convert_tree<Rational, double>(const BasicTree<double>&);
template BasicTree<double> convert_tree<double, double>(const BasicTree<double>&);
template BasicTree<Rational> convert_tree<Rational, Rational>(const BasicTree<Rational>&);

}  // namespace treeprob
