#include "treeprob/approximation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "treeprob/information.hpp"
#include "treeprob/lansit.hpp"

namespace treeprob {
namespace {

template <Scalar T>
T absolute(const T& x) {
  return x < 0 ? T{-x} : x;
}

template <Scalar T>
void require_same_alphabet(const FiniteDistribution<T>& p, const FiniteDistribution<T>& q) {
  if (p.alphabet() != q.alphabet()) {
    throw Error(Errc::AlphabetMismatch, "distributions are over different alphabets (sizes " +
                                            std::to_string(p.size()) + " and " + std::to_string(q.size()) + ")");
  }
}

// p log2(p/q) with the ratio formed before rounding.
template <Scalar T>
double exact_divergence_term(const T& p, const T& q) {
  if (p <= 0) {
    return 0.0;
  }
  if (q <= 0) {
    return std::numeric_limits<double>::infinity();
  }
  return to_double(p) * std::log2(to_double(T{p / q}));
}

// Float-mode comparisons get a relative slack; exact mode compares exactly.
template <Scalar T>
bool at_most(const T& lhs, const T& rhs) {
  if constexpr (is_exact_v<T>) {
    return lhs <= rhs;
  } else {
    return lhs <= rhs + kPinskerTolerance * std::max(1.0, std::abs(rhs));
  }
}

// Per-branching-node inputs shared by both Pinsker report flavours.
template <Scalar T>
struct BranchTerms {
  std::vector<T> weight;    // P_B(j)
  std::vector<T> distance;  // d(P_{S_j}, reference_j)
};

template <Scalar T>
PinskerTreeReport assemble_report(const BranchTerms<T>& terms, double normalized, std::span<const double> epsilons) {
  T mean_d{0};
  T mean_sq{0};
  for (std::size_t k = 0; k < terms.weight.size(); ++k) {
    mean_d += terms.weight[k] * terms.distance[k];
    mean_sq += terms.weight[k] * terms.distance[k] * terms.distance[k];
  }
  PinskerTreeReport report;
  report.normalized_divergence = normalized;
  report.mean_distance = to_double(mean_d);
  report.mean_sq_distance = to_double(mean_sq);
  report.bound = pinsker_bound(report.mean_sq_distance);
  report.holds = normalized >= report.bound - kPinskerTolerance * std::max(1.0, report.bound);
  for (const auto eps : epsilons) {
    if (!(eps > 0.0)) {
      throw Error(Errc::ParamsInvalid, "tail epsilon must be positive, got " + format_double(eps));
    }
    const auto eps_t = scalar_cast<T>(eps);
    T tail{0};
    for (std::size_t k = 0; k < terms.weight.size(); ++k) {
      if (terms.distance[k] >= eps_t) {
        tail += terms.weight[k];
      }
    }
    report.tail.push_back({.epsilon = eps,
                           .probability = to_double(tail),
                           .markov_bound = report.mean_distance / eps,
                           .markov_holds = at_most<T>(T{tail * eps_t}, mean_d)});
  }
  return report;
}

template <Scalar T>
FiniteDistribution<double> over_alphabet(const BranchingDistribution<T>& dist, const ProductSpec<T>& spec) {
  std::map<Label, double> mass;
  for (const auto& [label, p] : spec.base().masses()) {
    mass.emplace(label, 0.0);
  }
  for (const auto& [label, p] : dist.mass) {
    if (!spec.base().contains(label)) {
      throw Error(Errc::UnknownLabel, "branch label '" + label.symbol + "' is not in the product alphabet");
    }
    mass[label] = to_double(p);
  }
  return FiniteDistribution<double>(std::move(mass));
}

}  // namespace

template <Scalar T>
FiniteDistribution<T>::FiniteDistribution(std::map<Label, T> mass) : mass_(std::move(mass)) {
  if (mass_.empty()) {
    throw Error(Errc::InvalidDistribution, "empty alphabet");
  }
  T total{0};
  for (const auto& [label, p] : mass_) {
    if (!(p >= 0)) {
      throw Error(Errc::InvalidDistribution, "label '" + label.symbol + "' has mass " + format_scalar(p));
    }
    total += p;
  }
  if (!is_unit_mass(total)) {
    throw Error(Errc::InvalidDistribution, "masses sum to " + format_scalar(total));
  }
}

template <Scalar T>
std::vector<Label> FiniteDistribution<T>::alphabet() const {
  std::vector<Label> labels;
  labels.reserve(mass_.size());
  for (const auto& [label, p] : mass_) {
    labels.push_back(label);
  }
  return labels;
}

template <Scalar T>
const T& FiniteDistribution<T>::operator()(const Label& label) const {
  const auto it = mass_.find(label);
  if (it == mass_.end()) {
    throw Error(Errc::UnknownLabel, "label '" + label.symbol + "' is not in the alphabet");
  }
  return it->second;
}

template <Scalar T>
T variational_distance(const FiniteDistribution<T>& p, const FiniteDistribution<T>& q) {
  require_same_alphabet(p, q);
  T d{0};
  for (const auto& [label, mass] : p.masses()) {
    d += absolute(T{mass - q(label)});
  }
  return d;
}

template <Scalar T>
double divergence(const FiniteDistribution<T>& p, const FiniteDistribution<T>& q) {
  require_same_alphabet(p, q);
  double d = 0.0;
  for (const auto& [label, mass] : p.masses()) {
    d += exact_divergence_term(mass, q(label));
  }
  return d;
}

template <Scalar T>
double entropy(const FiniteDistribution<T>& p) {
  std::vector<double> masses;
  for (const auto& [label, mass] : p.masses()) {
    masses.push_back(to_double(mass));
  }
  return entropy_bits(masses);
}

double pinsker_bound(double squared_distance) { return squared_distance / (2.0 * std::numbers::ln2); }

template <Scalar T>
PinskerCheck pinsker_check(const FiniteDistribution<T>& p, const FiniteDistribution<T>& q) {
  PinskerCheck check;
  const T d = variational_distance(p, q);
  check.divergence = divergence(p, q);
  check.distance = to_double(d);
  check.bound = pinsker_bound(to_double(T{d * d}));
  check.holds = check.divergence >= check.bound - kPinskerTolerance * std::max(1.0, check.bound);
  return check;
}

template <Scalar T>
ProductSpec<T>::ProductSpec(FiniteDistribution<T> base) : base_(std::move(base)) {
  for (const auto& [label, p] : base_.masses()) {
    if (!(p > 0)) {
      throw Error(Errc::InvalidDistribution, "product distribution needs full support; label '" + label.symbol +
                                                 "' has mass " + format_scalar(p));
    }
  }
}

template <Scalar T>
NodeProbabilities<T> product_node_probabilities(const BasicTree<T>& shape, const ProductSpec<T>& spec) {
  NodeProbabilities<T> result{std::vector<T>(shape.size(), T{1})};
  for (NodeIndex j = 1; j < shape.size(); ++j) {
    if (!spec.base().contains(shape.label(j))) {
      throw Error(Errc::UnknownLabel, "edge into node '" + shape.id(j) + "' has label '" + shape.label(j).symbol +
                                          "' outside the product alphabet");
    }
    result.q[j] = result.q[shape.parent(j)] * spec.probability(shape.label(j));
  }
  return result;
}

template <Scalar T>
double divergence_to_product(const BasicTree<T>& tree, const ProductSpec<T>& spec) {
  const auto qplus = product_node_probabilities(tree, spec);
  double d = 0.0;
  for (const auto i : tree.leaves()) {
    d += exact_divergence_term(tree.leaf_mass(i), qplus[i]);
  }
  return d;
}

template <Scalar T>
double divergence_to_product_branch_sum(const BasicTree<T>& tree, const ProductSpec<T>& spec) {
  const auto q = node_probabilities(tree);
  WeightedSum<T> d;
  for (const auto& dist : branching_distributions(tree, q)) {
    double branch = 0.0;
    for (const auto& [label, p] : dist.mass) {
      if (!spec.base().contains(label)) {
        throw Error(Errc::UnknownLabel, "branch label '" + label.symbol + "' is not in the product alphabet");
      }
      branch += exact_divergence_term(p, spec.probability(label));
    }
    d.add(q[dist.node], branch);
  }
  return d.value();
}

bool PinskerTreeReport::all_hold() const {
  return holds && std::all_of(tail.begin(), tail.end(), [](const TailEntry& e) { return e.markov_holds; });
}

template <Scalar T>
PinskerTreeReport tree_pinsker_report(const BasicTree<T>& p, const BasicTree<T>& q, std::span<const double> epsilons) {
  const auto to_q = align_by_labels(p, q);
  const auto pb = branching_node_distribution(p);
  const auto qp = node_probabilities(p);
  const auto qq = node_probabilities(q);
  BranchTerms<T> terms;
  for (const auto& [j, weight] : pb.mass) {
    terms.weight.push_back(weight);
    const auto k = to_q[j];
    if (k == kNoNode) {
      terms.distance.push_back(T{2});
      continue;
    }
    T d{0};
    for (const auto c : p.children(j)) {
      const auto kc = q.child_with_label(k, p.label(c));
      const T pc = qp[c] / qp[j];
      d += kc == kNoNode ? pc : absolute(T{pc - T{qq[kc] / qq[k]}});
    }
    for (const auto kc : q.children(k)) {
      if (p.child_with_label(j, q.label(kc)) == kNoNode) {
        d += qq[kc] / qq[k];
      }
    }
    terms.distance.push_back(d);
  }
  return assemble_report(terms, normalized_divergence(p, q), epsilons);
}

template <Scalar T>
PinskerTreeReport tree_pinsker_report(const BasicTree<T>& p, const ProductSpec<T>& spec,
                                      std::span<const double> epsilons) {
  const auto pb = branching_node_distribution(p);
  const auto dists = branching_distributions(p);
  BranchTerms<T> terms;
  WeightedSum<T> normalized;
  for (std::size_t k = 0; k < dists.size(); ++k) {
    std::map<Label, T> extended;
    for (const auto& [label, mass] : spec.base().masses()) {
      extended.emplace(label, T{0});
    }
    for (const auto& [label, mass] : dists[k].mass) {
      if (!spec.base().contains(label)) {
        throw Error(Errc::UnknownLabel, "branch label '" + label.symbol + "' is not in the product alphabet");
      }
      extended[label] = mass;
    }
    // Branching distributions already sum to one; skip re-validation.
    T d{0};
    double div = 0.0;
    for (const auto& [label, mass] : extended) {
      d += absolute(T{mass - spec.probability(label)});
      div += exact_divergence_term(mass, spec.probability(label));
    }
    terms.weight.push_back(pb.mass[k].second);
    terms.distance.push_back(d);
    normalized.add(pb.mass[k].second, div);
  }
  return assemble_report(terms, normalized.value(), epsilons);
}

BoundedFunctional entropy_functional(std::size_t alphabet_size) {
  return {.name = "entropy",
          .evaluate = [](const FiniteDistribution<double>& p) { return entropy(p); },
          .bound = std::log2(static_cast<double>(alphabet_size))};
}

bool spot_check_bound(const BoundedFunctional& g, const ProductSpec<double>& spec, Rng& rng, std::size_t samples) {
  const auto reference = g.evaluate(spec.base());
  const auto labels = spec.base().alphabet();
  for (std::size_t s = 0; s < samples; ++s) {
    std::vector<double> weights(labels.size());
    double total = 0.0;
    for (auto& w : weights) {
      w = rng.exponential();
      total += w;
    }
    std::map<Label, double> mass;
    for (std::size_t k = 0; k < labels.size(); ++k) {
      mass.emplace(labels[k], weights[k] / total);
    }
    if (std::abs(g.evaluate(FiniteDistribution<double>(std::move(mass))) - reference) > g.bound + 1e-12) {
      return false;
    }
  }
  return true;
}

template <Scalar T>
double functional_convergence_gap(const BasicTree<T>& tree, const ProductSpec<T>& spec, const BoundedFunctional& g) {
  const auto pb = branching_node_distribution(tree);
  const auto dists = branching_distributions(tree);
  std::map<Label, double> target;
  for (const auto& [label, p] : spec.base().masses()) {
    target.emplace(label, to_double(p));
  }
  WeightedSum<T> average;
  for (std::size_t k = 0; k < dists.size(); ++k) {
    average.add(pb.mass[k].second, g.evaluate(over_alphabet(dists[k], spec)));
  }
  return std::abs(average.value() - g.evaluate(FiniteDistribution<double>(std::move(target))));
}

template <Scalar T>
double entropy_rate_gap(const BasicTree<T>& tree, const ProductSpec<T>& spec) {
  return functional_convergence_gap(tree, spec, entropy_functional(spec.alphabet_size()));
}

#define TREEPROB_APPROX_INSTANTIATE(T)                                                                       \
  template class FiniteDistribution<T>;                                                                      \
  template T variational_distance<T>(const FiniteDistribution<T>&, const FiniteDistribution<T>&);            \
  template double divergence<T>(const FiniteDistribution<T>&, const FiniteDistribution<T>&);                 \
  template double entropy<T>(const FiniteDistribution<T>&);                                                  \
  template PinskerCheck pinsker_check<T>(const FiniteDistribution<T>&, const FiniteDistribution<T>&);        \
  template class ProductSpec<T>;                                                                             \
  template NodeProbabilities<T> product_node_probabilities<T>(const BasicTree<T>&, const ProductSpec<T>&);   \
  template double divergence_to_product<T>(const BasicTree<T>&, const ProductSpec<T>&);                      \
  template double divergence_to_product_branch_sum<T>(const BasicTree<T>&, const ProductSpec<T>&);           \
  template PinskerTreeReport tree_pinsker_report<T>(const BasicTree<T>&, const BasicTree<T>&,                \
                                                    std::span<const double>);                                \
  template PinskerTreeReport tree_pinsker_report<T>(const BasicTree<T>&, const ProductSpec<T>&,              \
                                                    std::span<const double>);                                \
  template double functional_convergence_gap<T>(const BasicTree<T>&, const ProductSpec<T>&,                  \
                                                const BoundedFunctional&);                                   \
  template double entropy_rate_gap<T>(const BasicTree<T>&, const ProductSpec<T>&);

TREEPROB_APPROX_INSTANTIATE(double)
TREEPROB_APPROX_INSTANTIATE(Rational)

}  // namespace treeprob
