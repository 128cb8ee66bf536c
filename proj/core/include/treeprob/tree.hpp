#pragma once

#include <compare>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "treeprob/error.hpp"
#include "treeprob/numeric.hpp"

namespace treeprob {

using NodeIndex = std::size_t;
inline constexpr NodeIndex kNoNode = std::numeric_limits<NodeIndex>::max();

/// Branch label. Labels, not node identifiers, carry meaning across trees.
struct Label {
  std::string symbol;

  friend auto operator<=>(const Label&, const Label&) = default;
};

struct Edge {
  std::string parent;
  Label label;
  std::string child;

  friend bool operator==(const Edge&, const Edge&) = default;
};

template <Scalar T>
using LeafMassMap = std::map<std::string, T, std::less<>>;

namespace detail {
struct ValidatedTag {};
}  // namespace detail

/// Rooted, branch-labeled tree with a probability mass on its leaves.
///
/// Instances are immutable and always validated: the mass sums to one, every
/// leaf carries positive mass and every branching node has at least one
/// child. Nodes are stored in preorder, so a parent's index is always smaller
/// than its children's and bottom-up passes are a reverse scan.
template <Scalar T>
class BasicTree {
 public:
  struct Node {
    std::string id;
    NodeIndex parent = kNoNode;
    Label label;  // label of the edge from the parent; empty at the root
    std::vector<NodeIndex> children;
    T leaf_mass{};  // zero on branching nodes

    friend bool operator==(const Node&, const Node&) = default;
  };

  // Callers must supply a validated preorder layout; use build_tree().
  BasicTree(detail::ValidatedTag, std::vector<Node> nodes);

  std::size_t size() const { return nodes_.size(); }
  NodeIndex root() const { return 0; }

  const Node& node(NodeIndex j) const { return nodes_[j]; }
  const std::string& id(NodeIndex j) const { return nodes_[j].id; }
  NodeIndex parent(NodeIndex j) const { return nodes_[j].parent; }
  const Label& label(NodeIndex j) const { return nodes_[j].label; }
  std::span<const NodeIndex> children(NodeIndex j) const { return nodes_[j].children; }
  const T& leaf_mass(NodeIndex j) const { return nodes_[j].leaf_mass; }

  bool is_leaf(NodeIndex j) const { return nodes_[j].children.empty(); }
  bool is_branching(NodeIndex j) const { return !is_leaf(j); }

  /// Leaves and branching nodes, each in preorder.
  std::span<const NodeIndex> leaves() const { return leaves_; }
  std::span<const NodeIndex> branching_nodes() const { return branching_; }

  /// Root is a leaf, so the tree has no branching nodes and E[w(L)] = 0.
  bool is_degenerate() const { return branching_.empty(); }

  std::optional<NodeIndex> find(std::string_view id) const;

  /// Child of `j` reached by `label`, or kNoNode.
  NodeIndex child_with_label(NodeIndex j, const Label& label) const;

  /// Sorted distinct labels used on the edges.
  std::vector<Label> alphabet() const;

  /// Labels on the path from the root to `j`.
  std::vector<Label> label_path(NodeIndex j) const;

  friend bool operator==(const BasicTree& a, const BasicTree& b) { return a.nodes_ == b.nodes_; }

 private:
  std::vector<Node> nodes_;
  std::vector<NodeIndex> leaves_;
  std::vector<NodeIndex> branching_;
  std::map<std::string, NodeIndex, std::less<>> index_;
};

using Tree = BasicTree<double>;
using ExactTree = BasicTree<Rational>;

/// Builds and validates a tree from an edge list and leaf masses.
///
/// Zero-mass leaves, and branches that lead only to them, are pruned. A
/// childless node missing from `leaf_mass` counts as zero mass. When `root`
/// is omitted it is inferred as the unique parentless node (or the single
/// mass key of an edgeless tree).
template <Scalar T>
BasicTree<T> build_tree(std::span<const Edge> edges, const LeafMassMap<T>& leaf_mass,
                        const std::optional<std::string>& root = std::nullopt);

template <Scalar To, Scalar From>
BasicTree<To> convert_tree(const BasicTree<From>& tree);

/// Edge list in preorder; feeding it back to build_tree reproduces the tree.
template <Scalar T>
std::vector<Edge> edges_of(const BasicTree<T>& tree);

template <Scalar T>
LeafMassMap<T> leaf_masses_of(const BasicTree<T>& tree);

/// Same shape with new leaf masses, given in `tree.leaves()` order. The
/// result is re-validated and zero masses are pruned.
template <Scalar T>
BasicTree<T> with_leaf_masses(const BasicTree<T>& tree, std::span<const T> masses);

/// Q_j: total leaf mass below each node.
template <Scalar T>
struct NodeProbabilities {
  std::vector<T> q;

  const T& operator[](NodeIndex j) const { return q[j]; }
  std::size_t size() const { return q.size(); }
};

template <Scalar T>
NodeProbabilities<T> node_probabilities(const BasicTree<T>& tree);

/// P_{S_j}: distribution over the successor labels of branching node j.
template <Scalar T>
struct BranchingDistribution {
  NodeIndex node = kNoNode;
  std::vector<std::pair<Label, T>> mass;  // child order; all strictly positive

  /// Zero for labels that are not successors of `node`.
  T probability(const Label& label) const;
};

/// One entry per branching node, in `tree.branching_nodes()` order.
template <Scalar T>
std::vector<BranchingDistribution<T>> branching_distributions(const BasicTree<T>& tree,
                                                              const NodeProbabilities<T>& q);

template <Scalar T>
std::vector<BranchingDistribution<T>> branching_distributions(const BasicTree<T>& tree);

/// Real-valued function on the nodes of one tree.
template <Scalar T>
struct NodeFunctional {
  std::vector<T> values;

  /// Looks up every node id of `tree` in `by_id`; throws FunctionalIncomplete.
  static NodeFunctional from_map(const BasicTree<T>& tree, const std::map<std::string, T, std::less<>>& by_id);

  const T& operator()(NodeIndex j) const { return values[j]; }

  /// f(j) - f(parent of j), for non-root j.
  template <Scalar U>
  T delta(const BasicTree<U>& tree, NodeIndex j) const {
    return values[j] - values[tree.parent(j)];
  }
};

/// w(j): number of edges from the root to j.
template <Scalar T>
NodeFunctional<T> path_lengths(const BasicTree<T>& tree);

/// Aligns `p` onto `q` by label paths.
///
/// Entry j is the node of `q` reached by p's label path to j, or kNoNode when
/// q has no such node (q assigns it zero probability). Throws ShapeMismatch
/// when an aligned pair disagrees on being a leaf.
template <Scalar T>
std::vector<NodeIndex> align_by_labels(const BasicTree<T>& p, const BasicTree<T>& q);

#define TREEPROB_TREE_EXTERN(T)                                                                        \
  extern template class BasicTree<T>;                                                                  \
  extern template BasicTree<T> build_tree<T>(std::span<const Edge>, const LeafMassMap<T>&,             \
                                             const std::optional<std::string>&);                      \
  extern template std::vector<Edge> edges_of<T>(const BasicTree<T>&);                                  \
  extern template LeafMassMap<T> leaf_masses_of<T>(const BasicTree<T>&);                               \
  extern template BasicTree<T> with_leaf_masses<T>(const BasicTree<T>&, std::span<const T>);           \
  extern template NodeProbabilities<T> node_probabilities<T>(const BasicTree<T>&);                     \
  extern template struct BranchingDistribution<T>;                                                     \
  extern template std::vector<BranchingDistribution<T>> branching_distributions<T>(                    \
      const BasicTree<T>&, const NodeProbabilities<T>&);                                               \
  extern template std::vector<BranchingDistribution<T>> branching_distributions<T>(const BasicTree<T>&); \
  extern template struct NodeFunctional<T>;                                                            \
  extern template NodeFunctional<T> path_lengths<T>(const BasicTree<T>&);                              \
  extern template std::vector<NodeIndex> align_by_labels<T>(const BasicTree<T>&, const BasicTree<T>&);

TREEPROB_TREE_EXTERN(double)
TREEPROB_TREE_EXTERN(Rational)
#undef TREEPROB_TREE_EXTERN

extern template BasicTree<double> convert_tree<double, Rational>(const BasicTree<Rational>&);
extern template BasicTree<Rational> convert_tree<Rational, double>(const BasicTree<double>&);
extern template BasicTree<double> convert_tree<double, double>(const BasicTree<double>&);
extern template BasicTree<Rational> convert_tree<Rational, Rational>(const BasicTree<Rational>&);

}  // namespace treeprob
