#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "treeprob/experiments.hpp"
#include "treeprob/tree.hpp"

namespace treeprob {
namespace {

using testing::example_edges;
using testing::example_masses;
using testing::example_tree;

std::vector<std::string> ids(const ExactTree& tree, std::span<const NodeIndex> nodes) {
  std::vector<std::string> out;
  for (const auto j : nodes) {
    out.push_back(tree.id(j));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Errc build_error(const std::vector<Edge>& edges, const LeafMassMap<Rational>& masses,
                 std::optional<std::string> root = std::nullopt) {
  try {
    build_tree<Rational>(edges, masses, root);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return Errc::ParseError;
}

TEST(BuildTree, ExampleTreeSets) {
  const auto tree = example_tree<Rational>();
  EXPECT_EQ(ids(tree, tree.leaves()), (std::vector<std::string>{"2", "5", "6"}));
  EXPECT_EQ(ids(tree, tree.branching_nodes()), (std::vector<std::string>{"0", "1", "3"}));
  EXPECT_EQ(tree.id(tree.root()), "0");
  EXPECT_EQ(tree.size(), 6u);
  EXPECT_FALSE(tree.is_degenerate());
}

TEST(BuildTree, SingleNodeIsDegenerate) {
  const auto tree = build_tree<Rational>({}, {{"0", Rational(1)}});
  EXPECT_EQ(tree.size(), 1u);
  EXPECT_TRUE(tree.is_leaf(tree.root()));
  EXPECT_TRUE(tree.is_degenerate());
  EXPECT_EQ(tree.leaves().size(), 1u);
}

TEST(BuildTree, ZeroMassLeafIsPruned) {
  // Oracle: the same tree built without the extra leaf at all.
  auto edges = example_edges();
  edges.push_back({"0", {"c"}, "7"});
  auto masses = example_masses<Rational>();
  masses["7"] = 0;
  EXPECT_EQ(build_tree<Rational>(edges, masses), example_tree<Rational>());
}

TEST(BuildTree, BranchLeadingOnlyToZeroMassIsPruned) {
  auto edges = example_edges();
  edges.push_back({"2", {"a"}, "8"});  // 2 is no longer a leaf...
  edges.push_back({"0", {"c"}, "9"});
  edges.push_back({"9", {"a"}, "10"});
  edges.push_back({"9", {"b"}, "11"});
  LeafMassMap<Rational> masses{{"8", Rational(1, 4)}, {"5", Rational(1, 2)}, {"6", Rational(1, 4)}};
  const auto tree = build_tree<Rational>(edges, masses);  // 10 and 11 carry no mass
  EXPECT_FALSE(tree.find("9"));
  EXPECT_FALSE(tree.find("10"));
  EXPECT_EQ(tree.size(), 7u);
}

TEST(BuildTree, Errors) {
  const LeafMassMap<Rational> one{{"1", Rational(1)}};
  EXPECT_EQ(build_error({{"0", {"a"}, "1"}, {"1", {"a"}, "0"}}, one), Errc::CycleDetected);
  EXPECT_EQ(build_error({{"0", {"a"}, "0"}}, {{"0", Rational(1)}}), Errc::CycleDetected);
  // root plus a detached cycle
  EXPECT_EQ(build_error({{"0", {"a"}, "1"}, {"2", {"a"}, "3"}, {"3", {"a"}, "2"}}, one), Errc::CycleDetected);
  EXPECT_EQ(build_error({{"0", {"a"}, "1"}, {"2", {"a"}, "3"}}, {{"1", Rational(1, 2)}, {"3", Rational(1, 2)}}),
            Errc::MultipleRoots);
  EXPECT_EQ(build_error({{"0", {"a"}, "1"}}, one, "1"), Errc::MultipleRoots);
  EXPECT_EQ(build_error({{"0", {"a"}, "2"}, {"1", {"a"}, "2"}}, {{"2", Rational(1)}}), Errc::MultipleParents);
  EXPECT_EQ(build_error({{"0", {"a"}, "1"}, {"0", {"a"}, "2"}}, {{"1", Rational(1, 2)}, {"2", Rational(1, 2)}}),
            Errc::DuplicateSiblingLabel);
  EXPECT_EQ(build_error(example_edges(), {{"2", Rational(1, 4)}, {"5", Rational(1, 2)}, {"6", Rational(1, 5)}}),
            Errc::MassNotNormalized);
  EXPECT_EQ(build_error(example_edges(), {{"2", Rational(3, 4)}, {"5", Rational(1, 2)}, {"6", Rational(-1, 4)}}),
            Errc::NegativeMass);
  EXPECT_EQ(build_error(example_edges(), {{"3", Rational(1)}}), Errc::MassOnBranchingNode);
  EXPECT_EQ(build_error(example_edges(), {{"9", Rational(1)}}), Errc::UnknownNode);
}

TEST(BuildTree, FloatModeToleratesRounding) {
  EXPECT_NO_THROW(build_tree<double>(example_edges(), {{"2", 0.25 + 1e-10}, {"5", 0.5}, {"6", 0.25}}));
  EXPECT_THROW(build_tree<double>(example_edges(), {{"2", 0.25 + 1e-8}, {"5", 0.5}, {"6", 0.25}}), Error);
}

TEST(NodeProbabilities, ExampleValues) {
  const auto tree = example_tree<Rational>();
  const auto q = node_probabilities(tree);
  EXPECT_EQ(q[*tree.find("1")], Rational(3, 4));
  EXPECT_EQ(q[*tree.find("3")], Rational(3, 4));
  EXPECT_EQ(q[tree.root()], Rational(1));
}

TEST(NodeProbabilities, MatchBruteForceAndConserveMass) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    GeneratorParams params;
    params.seed = seed;
    params.alphabet_size = 3;
    params.max_depth = 6;
    params.branching_probability = 0.6;
    const auto tree = generate_random_tree<Rational>(params);
    const auto q = node_probabilities(tree);
    ASSERT_EQ(q[tree.root()], 1);
    for (NodeIndex j = 0; j < tree.size(); ++j) {
      EXPECT_EQ(q[j], testing::brute_force_q(tree, j));
      if (j != tree.root()) {
        EXPECT_LE(q[j], q[tree.parent(j)]);
      }
      if (tree.is_branching(j)) {
        Rational children_sum = 0;
        for (const auto c : tree.children(j)) {
          children_sum += q[c];
        }
        EXPECT_EQ(children_sum, q[j]);
      }
    }
  }
}

TEST(BranchingDistributions, Example) {
  const auto tree = example_tree<Rational>();
  const auto dists = branching_distributions(tree);
  ASSERT_EQ(dists.size(), 3u);
  const auto& node1 = dists[1];
  EXPECT_EQ(tree.id(node1.node), "1");
  ASSERT_EQ(node1.mass.size(), 1u);
  EXPECT_EQ(node1.mass[0].second, 1);
  const auto& node3 = dists[2];
  EXPECT_EQ(tree.id(node3.node), "3");
  // (1/2)/(3/4) and (1/4)/(3/4)
  EXPECT_EQ(node3.probability({"a"}), Rational(2, 3));
  EXPECT_EQ(node3.probability({"b"}), Rational(1, 3));
  EXPECT_EQ(node3.probability({"z"}), 0);
}

TEST(BranchingDistributions, UniformCompleteBinary) {
  const std::vector<Edge> edges{{"r", {"0"}, "x"}, {"r", {"1"}, "y"},   {"x", {"0"}, "x0"},
                                {"x", {"1"}, "x1"}, {"y", {"0"}, "y0"}, {"y", {"1"}, "y1"}};
  const auto q = Rational(1, 4);
  const auto tree = build_tree<Rational>(edges, {{"x0", q}, {"x1", q}, {"y0", q}, {"y1", q}});
  for (const auto& dist : branching_distributions(tree)) {
    EXPECT_EQ(dist.probability({"0"}), Rational(1, 2));
    EXPECT_EQ(dist.probability({"1"}), Rational(1, 2));
  }
}

TEST(BranchingDistributions, ReconstructLeafMassByPathProducts) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    GeneratorParams params;
    params.seed = seed;
    params.max_depth = 7;
    const auto tree = generate_random_tree<Rational>(params);
    std::vector<Rational> factor(tree.size(), Rational(1));
    for (const auto& dist : branching_distributions(tree)) {
      for (const auto c : tree.children(dist.node)) {
        factor[c] = dist.probability(tree.label(c));
      }
    }
    for (const auto i : tree.leaves()) {
      Rational product = 1;
      for (auto k = i; k != tree.root(); k = tree.parent(k)) {
        product *= factor[k];
      }
      EXPECT_EQ(product, tree.leaf_mass(i));
    }
  }
}

TEST(PathLengths, CountEdges) {
  const auto tree = example_tree<Rational>();
  const auto w = path_lengths(tree);
  EXPECT_EQ(w(tree.root()), 0);
  EXPECT_EQ(w(*tree.find("2")), 1);
  EXPECT_EQ(w(*tree.find("5")), 3);
  EXPECT_EQ(w(*tree.find("6")), 3);
  for (NodeIndex j = 0; j < tree.size(); ++j) {
    EXPECT_EQ(w(j), testing::depth_by_walk(tree, j));
  }
  const auto complete = generate_complete_tree<Rational>(2, 5, 3);
  const auto wc = path_lengths(complete);
  for (const auto i : complete.leaves()) {
    EXPECT_EQ(wc(i), 5);
  }
}

TEST(Tree, PruneIsIdempotentAndRoundTrips) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    GeneratorParams params;
    params.seed = seed;
    params.alphabet_size = 4;
    const auto tree = generate_random_tree<double>(params);
    const auto edges = edges_of(tree);
    const auto rebuilt = build_tree<double>(edges, leaf_masses_of(tree));
    EXPECT_EQ(rebuilt, tree);
    EXPECT_EQ(build_tree<double>(edges_of(rebuilt), leaf_masses_of(rebuilt)), rebuilt);
  }
}

TEST(Tree, SiblingOrderDoesNotChangeQuantities) {
  std::mt19937 shuffle_rng(7);
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    GeneratorParams params;
    params.seed = seed;
    params.alphabet_size = 3;
    const auto tree = generate_random_tree<Rational>(params);
    auto edges = edges_of(tree);
    std::shuffle(edges.begin(), edges.end(), shuffle_rng);
    const auto shuffled = build_tree<Rational>(edges, leaf_masses_of(tree));
    const auto q1 = node_probabilities(tree);
    const auto q2 = node_probabilities(shuffled);
    for (NodeIndex j = 0; j < tree.size(); ++j) {
      EXPECT_EQ(q1[j], q2[*shuffled.find(tree.id(j))]);
    }
  }
}

TEST(Tree, AlphabetAndPaths) {
  const auto tree = example_tree<double>();
  EXPECT_EQ(tree.alphabet(), (std::vector<Label>{{"a"}, {"b"}}));
  EXPECT_EQ(tree.label_path(*tree.find("6")), (std::vector<Label>{{"a"}, {"a"}, {"b"}}));
  EXPECT_EQ(tree.child_with_label(tree.root(), {"b"}), *tree.find("2"));
  EXPECT_EQ(tree.child_with_label(tree.root(), {"c"}), kNoNode);
}

TEST(Tree, ConvertKeepsStructure) {
  const auto exact = example_tree<Rational>();
  const auto as_float = convert_tree<double>(exact);
  EXPECT_EQ(as_float, example_tree<double>());
  EXPECT_EQ(convert_tree<Rational>(as_float), exact);
}

TEST(NodeFunctional, FromMapRequiresEveryNode) {
  const auto tree = example_tree<Rational>();
  std::map<std::string, Rational, std::less<>> values{{"0", 0}, {"1", 1}, {"2", 1}, {"3", 2}, {"5", 3}};
  try {
    NodeFunctional<Rational>::from_map(tree, values);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::FunctionalIncomplete);
  }
  values["6"] = 3;
  const auto f = NodeFunctional<Rational>::from_map(tree, values);
  EXPECT_EQ(f.delta(tree, *tree.find("6")), 1);
}

TEST(AlignByLabels, MissingBranchIsUnaligned) {
  const auto p = example_tree<Rational>();
  // q lacks the 'b' leaf under node 0
  const auto q = build_tree<Rational>(std::vector<Edge>{{"0", {"a"}, "1"}, {"1", {"a"}, "3"}, {"3", {"a"}, "5"},
                                                        {"3", {"b"}, "6"}},
                                      {{"5", Rational(1, 2)}, {"6", Rational(1, 2)}});
  const auto m = align_by_labels(p, q);
  EXPECT_EQ(m[*p.find("2")], kNoNode);
  EXPECT_EQ(q.id(m[*p.find("6")]), "6");
  // q where p's leaf 2 is a branching node
  auto edges = example_edges();
  edges.push_back({"2", {"a"}, "9"});
  const auto deeper = build_tree<Rational>(edges, {{"9", Rational(1, 4)}, {"5", Rational(1, 2)}, {"6", Rational(1, 4)}});
  EXPECT_THROW(align_by_labels(p, deeper), Error);
}

}  // namespace
}  // namespace treeprob
