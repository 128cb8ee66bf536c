#include "treeprob/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <future>
#include <numeric>
#include <ostream>
#include <queue>

#include "treeprob/lansit.hpp"

namespace treeprob {
namespace {

constexpr double kWeightScale = 1000.0;

// Integer weights 1 + floor(scale * Exp(1)), normalized. Exchangeable, so the
// resulting point of the simplex is symmetric; exact in rational mode.
template <Scalar T>
std::vector<T> random_masses(std::size_t count, Rng& rng) {
  std::vector<std::uint64_t> weights(count);
  for (auto& w : weights) {
    w = 1 + static_cast<std::uint64_t>(std::floor(kWeightScale * rng.exponential()));
  }
  const auto total = std::accumulate(weights.begin(), weights.end(), std::uint64_t{0});
  std::vector<T> masses;
  masses.reserve(count);
  for (const auto w : weights) {
    if constexpr (is_exact_v<T>) {
      masses.emplace_back(Rational(w, total));
    } else {
      masses.push_back(static_cast<double>(w) / static_cast<double>(total));
    }
  }
  return masses;
}

}  // namespace

void validate(const GeneratorParams& params) {
  if (params.alphabet_size < 2) {
    throw Error(Errc::ParamsInvalid, "alphabet size must be at least 2");
  }
  if (params.max_depth < 1) {
    throw Error(Errc::ParamsInvalid, "max depth must be at least 1");
  }
  if (!(params.branching_probability >= 0.0 && params.branching_probability <= 1.0)) {
    throw Error(Errc::ParamsInvalid, "branching probability must lie in [0, 1]");
  }
  if (params.max_nodes < params.alphabet_size + 1) {
    throw Error(Errc::ParamsInvalid, "max nodes must leave room to expand the root");
  }
}

std::vector<Label> default_alphabet(std::size_t size) {
  std::vector<Label> labels;
  labels.reserve(size);
  for (std::size_t k = 0; k < size; ++k) {
    labels.push_back({std::to_string(k)});
  }
  return labels;
}

template <Scalar T>
BasicTree<T> generate_random_tree(const GeneratorParams& params) {
  validate(params);
  Rng rng(params.seed);
  const auto labels = default_alphabet(params.alphabet_size);
  std::vector<Edge> edges;
  std::vector<std::size_t> depth{0};
  std::vector<bool> branching{false};
  std::deque<std::size_t> frontier{0};
  std::vector<Label> chosen;
  while (!frontier.empty()) {
    const auto j = frontier.front();
    frontier.pop_front();
    if (depth[j] >= params.max_depth || (j != 0 && !rng.bernoulli(params.branching_probability))) {
      continue;
    }
    chosen.clear();
    if (params.complete) {
      chosen = labels;
    } else {
      for (const auto& label : labels) {
        if (rng.bernoulli(0.5)) {
          chosen.push_back(label);
        }
      }
      if (chosen.empty()) {
        chosen.push_back(labels[rng.below(labels.size())]);
      }
    }
    if (depth.size() + chosen.size() > params.max_nodes) {
      continue;
    }
    branching[j] = true;
    for (const auto& label : chosen) {
      const auto child = depth.size();
      edges.push_back({std::to_string(j), label, std::to_string(child)});
      depth.push_back(depth[j] + 1);
      branching.push_back(false);
      frontier.push_back(child);
    }
  }
  std::vector<std::size_t> leaves;
  for (std::size_t j = 0; j < depth.size(); ++j) {
    if (!branching[j]) {
      leaves.push_back(j);
    }
  }
  const auto masses = random_masses<T>(leaves.size(), rng);
  LeafMassMap<T> by_id;
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    by_id.emplace(std::to_string(leaves[k]), masses[k]);
  }
  return build_tree<T>(edges, by_id, std::string{"0"});
}

template <Scalar T>
BasicTree<T> generate_complete_tree(std::size_t alphabet_size, std::size_t depth, std::uint64_t seed) {
  GeneratorParams params;
  params.alphabet_size = alphabet_size;
  params.max_depth = depth;
  params.branching_probability = 1.0;
  params.seed = seed;
  params.complete = true;
  params.max_nodes = std::numeric_limits<std::size_t>::max();
  return generate_random_tree<T>(params);
}

template <Scalar T>
BasicTree<T> resample_leaf_masses(const BasicTree<T>& tree, std::uint64_t seed) {
  Rng rng(seed);
  const auto masses = random_masses<T>(tree.leaves().size(), rng);
  return with_leaf_masses<T>(tree, masses);
}

template <Scalar T>
NodeFunctional<T> random_functional(const BasicTree<T>& tree, std::uint64_t seed) {
  Rng rng(seed);
  NodeFunctional<T> f;
  f.values.reserve(tree.size());
  for (std::size_t j = 0; j < tree.size(); ++j) {
    f.values.push_back(scalar_cast<T>(rng.uniform(-1.0, 1.0)));
  }
  return f;
}

template <Scalar T>
FiniteDistribution<T> random_distribution(std::span<const Label> labels, Rng& rng, bool full_support) {
  if (labels.empty()) {
    throw Error(Errc::ParamsInvalid, "empty alphabet");
  }
  auto masses = random_masses<T>(labels.size(), rng);
  if (!full_support) {
    std::vector<bool> zero(labels.size());
    for (std::size_t k = 0; k < labels.size(); ++k) {
      zero[k] = rng.bernoulli(0.25);
    }
    zero[rng.below(labels.size())] = false;
    T kept{0};
    for (std::size_t k = 0; k < labels.size(); ++k) {
      if (zero[k]) {
        masses[k] = T{0};
      }
      kept += masses[k];
    }
    for (auto& m : masses) {
      m = T{m / kept};
    }
  }
  std::map<Label, T> mass;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    mass.emplace(labels[k], masses[k]);
  }
  return FiniteDistribution<T>(std::move(mass));
}

template <Scalar T>
std::vector<T> dyadic_quantize(std::span<const T> target) {
  std::vector<T> p;
  p.reserve(target.size());
  T deficit{1};
  for (const auto& t : target) {
    if (!(t > 0 && t <= 1)) {
      throw Error(Errc::ParamsInvalid, "quantization target " + format_scalar(t) + " is outside (0, 1]");
    }
    T x{1};
    while (x > t) {
      x /= 2;
    }
    deficit -= x;
    p.push_back(std::move(x));
  }
  if (deficit < 0) {
    throw Error(Errc::ParamsInvalid, "quantization targets sum to more than one");
  }
  // Each pass doubles at least one entry while the deficit is positive: all
  // entries are multiples of the smallest one, and so is the deficit.
  std::vector<std::size_t> order(p.size());
  while (deficit > 0) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return target[a] * p[b] > target[b] * p[a]; });
    for (const auto i : order) {
      if (p[i] <= deficit) {
        deficit -= p[i];
        p[i] *= 2;
      }
    }
  }
  return p;
}

template <Scalar T>
BasicTree<T> grow_matcher_tree(const ProductSpec<T>& spec, std::size_t leaf_budget) {
  const auto alphabet = spec.base().alphabet();
  const auto k = alphabet.size();
  if (k < 2) {
    throw Error(Errc::ParamsInvalid, "matcher needs at least two branch labels");
  }
  if (leaf_budget < k) {
    throw Error(Errc::ParamsInvalid, "leaf budget " + std::to_string(leaf_budget) + " is below the alphabet size " +
                                         std::to_string(k));
  }
  struct Grown {
    T qplus;
    std::vector<Label> path;
    bool branching = false;
  };
  std::vector<Grown> nodes{{T{1}, {}, false}};
  std::vector<Edge> edges;
  const auto expand_first = [&](std::size_t a, std::size_t b) {
    if (nodes[a].qplus != nodes[b].qplus) {
      return nodes[a].qplus > nodes[b].qplus;
    }
    return nodes[a].path < nodes[b].path;
  };
  const auto heap_order = [&](std::size_t a, std::size_t b) { return expand_first(b, a); };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(heap_order)> candidates(heap_order);
  candidates.push(0);
  std::size_t leaves = 1;
  while (leaves - 1 + k <= leaf_budget) {
    const auto j = candidates.top();
    candidates.pop();
    nodes[j].branching = true;
    for (const auto& label : alphabet) {
      const auto child = nodes.size();
      auto path = nodes[j].path;
      path.push_back(label);
      nodes.push_back({T{nodes[j].qplus * spec.probability(label)}, std::move(path), false});
      edges.push_back({std::to_string(j), label, std::to_string(child)});
      candidates.push(child);
    }
    leaves += k - 1;
  }

  std::vector<std::size_t> leaf_nodes;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    if (!nodes[j].branching) {
      leaf_nodes.push_back(j);
    }
  }
  std::sort(leaf_nodes.begin(), leaf_nodes.end(),
            [&](std::size_t a, std::size_t b) { return nodes[a].path < nodes[b].path; });
  std::vector<T> targets;
  targets.reserve(leaf_nodes.size());
  for (const auto j : leaf_nodes) {
    targets.push_back(nodes[j].qplus);
  }
  const auto masses = dyadic_quantize<T>(targets);
  LeafMassMap<T> by_id;
  for (std::size_t n = 0; n < leaf_nodes.size(); ++n) {
    by_id.emplace(std::to_string(leaf_nodes[n]), masses[n]);
  }
  return build_tree<T>(edges, by_id, std::string{"0"});
}

template <Scalar T>
std::vector<SweepRow> convergence_sweep(const ProductSpec<T>& spec, std::span<const std::size_t> budgets,
                                        double epsilon) {
  if (!(epsilon > 0.0)) {
    throw Error(Errc::ParamsInvalid, "epsilon must be positive");
  }
  if (budgets.empty()) {
    throw Error(Errc::ParamsInvalid, "no budgets given");
  }
  for (std::size_t k = 1; k < budgets.size(); ++k) {
    if (budgets[k] <= budgets[k - 1]) {
      throw Error(Errc::ParamsInvalid, "budgets must be strictly increasing");
    }
  }
  const auto compute_row = [&spec, epsilon](std::size_t budget) {
    const auto tree = grow_matcher_tree(spec, budget);
    const auto report = tree_pinsker_report(tree, spec, std::span<const double>(&epsilon, 1));
    SweepRow row;
    row.leaf_count = tree.leaves().size();
    row.mean_length = to_double(expected_path_length(tree));
    row.normalized_divergence = report.normalized_divergence;
    row.entropy_rate = entropy_rate(tree);
    row.entropy_rate_gap = entropy_rate_gap(tree, spec);
    row.max_tail = report.tail.front().probability;
    return row;
  };
  std::vector<std::future<SweepRow>> pending;
  pending.reserve(budgets.size());
  for (const auto budget : budgets) {
    pending.push_back(std::async(std::launch::async, compute_row, budget));
  }
  std::vector<SweepRow> rows;
  rows.reserve(budgets.size());
  for (auto& f : pending) {
    rows.push_back(f.get());
  }
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (rows[k].leaf_count <= rows[k - 1].leaf_count) {
      throw Error(Errc::ParamsInvalid, "budgets " + std::to_string(budgets[k - 1]) + " and " +
                                           std::to_string(budgets[k]) + " yield the same leaf count");
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "leaf_count,mean_length,normalized_divergence_bits_per_branch,entropy_rate_bits_per_branch,"
         "entropy_rate_gap,tail_probability\n";
  for (const auto& row : rows) {
    out << row.leaf_count << ',' << format_double(row.mean_length) << ',' << format_double(row.normalized_divergence)
        << ',' << format_double(row.entropy_rate) << ',' << format_double(row.entropy_rate_gap) << ','
        << format_double(row.max_tail) << '\n';
  }
}

#define TREEPROB_EXPERIMENTS_INSTANTIATE(T)                                                               \
  template BasicTree<T> generate_random_tree<T>(const GeneratorParams&);                                  \
  template BasicTree<T> generate_complete_tree<T>(std::size_t, std::size_t, std::uint64_t);               \
  template BasicTree<T> resample_leaf_masses<T>(const BasicTree<T>&, std::uint64_t);                      \
  template NodeFunctional<T> random_functional<T>(const BasicTree<T>&, std::uint64_t);                    \
  template FiniteDistribution<T> random_distribution<T>(std::span<const Label>, Rng&, bool);              \
  template BasicTree<T> grow_matcher_tree<T>(const ProductSpec<T>&, std::size_t);                         \
  template std::vector<T> dyadic_quantize<T>(std::span<const T>);                                         \
  template std::vector<SweepRow> convergence_sweep<T>(const ProductSpec<T>&, std::span<const std::size_t>, \
                                                      double);

TREEPROB_EXPERIMENTS_INSTANTIATE(double)
TREEPROB_EXPERIMENTS_INSTANTIATE(Rational)

}  // namespace treeprob
