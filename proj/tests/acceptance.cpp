// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances are fixed here and printed with each line.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "fixtures.hpp"
#include "treeprob/approximation.hpp"
#include "treeprob/document.hpp"
#include "treeprob/experiments.hpp"
#include "treeprob/lansit.hpp"

namespace treeprob {
namespace {

constexpr double kFloatRelTolerance = 1e-9;
constexpr double kChainRuleTolerance = 1e-9;
constexpr double kExampleTolerance = 1e-12;
constexpr double kSweepThreshold = 0.05;  // bits per branch
constexpr std::size_t kCorpusSize = 1000;
constexpr int kFunctionalsPerTree = 3;

const std::vector<double> kEpsilons{0.01, 0.1, 0.5, 1.0};

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> failures;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (failures.size() < 5) {
        failures.push_back(what);
      }
    }
  }
};

GeneratorParams corpus_params(std::size_t i) {
  GeneratorParams params;
  params.seed = 1000 + i;
  params.alphabet_size = 2 + i % 3;
  params.max_depth = 1 + i % 12;
  params.branching_probability = 0.35 + 0.1 * static_cast<double>(i % 6);
  params.max_nodes = 200;
  return params;
}

struct CorpusEntry {
  ExactTree exact;
  Tree floating;
};

const std::vector<CorpusEntry>& corpus() {
  static const auto trees = [] {
    std::vector<CorpusEntry> out;
    for (std::size_t i = 0; i < kCorpusSize; ++i) {
      const auto params = corpus_params(i);
      out.push_back({generate_random_tree<Rational>(params), generate_random_tree<double>(params)});
    }
    return out;
  }();
  return trees;
}

std::string fmt(double x) { return format_double(x); }

Outcome worked_example() {
  Outcome o;
  const auto tree = testing::example_tree<Rational>();
  const auto q = node_probabilities(tree);
  o.require(q.q[*tree.find("1")] == Rational(3, 4), "Q_1 != 3/4");
  o.require(q.q[*tree.find("3")] == Rational(3, 4), "Q_3 != 3/4");
  o.require(expected_path_length(tree) == Rational(5, 2), "E[w] != 5/2");

  // Leaf-side oracles: sum P_L(i) w(i) and -sum P_L(i) log2 P_L(i).
  Rational leaf_w = 0;
  for (const auto i : tree.leaves()) {
    leaf_w += tree.leaf_mass(i) * static_cast<long>(testing::depth_by_walk(tree, i));
  }
  o.require(leaf_w == Rational(5, 2), "leaf-side E[w] != 5/2");
  o.require(testing::leaf_entropy_oracle(tree) == 1.5, "leaf-side H != 3/2");
  o.require(std::abs(leaf_entropy(tree) - 1.5) <= kExampleTolerance, "H(P_L) != 3/2");
  o.require(std::abs(entropy_rate(tree) - 0.6) <= kExampleTolerance, "entropy rate != 3/5");

  const auto pb = branching_node_distribution(tree);
  const std::vector<std::pair<std::string, Rational>> expected{
      {"0", Rational(2, 5)}, {"1", Rational(3, 10)}, {"3", Rational(3, 10)}};
  o.require(pb.mass.size() == expected.size(), "P_B size");
  for (std::size_t k = 0; k < std::min(pb.mass.size(), expected.size()); ++k) {
    o.require(tree.id(pb.mass[k].first) == expected[k].first && pb.mass[k].second == expected[k].second,
              "P_B(" + expected[k].first + ")");
  }
  o.detail = "Q_1=Q_3=3/4, E[w]=5/2, H=1.5, rate=" + fmt(entropy_rate(tree)) + ", P_B=(2/5,3/10,3/10)";
  return o;
}

Outcome lansit_suite() {
  Outcome o;
  double worst_float = 0.0;
  std::size_t checks = 0;
  for (std::size_t i = 0; i < corpus().size(); ++i) {
    const auto& [exact, floating] = corpus()[i];
    o.require(exact.size() <= 200 && exact.alphabet().size() <= 4, "corpus limits at tree " + std::to_string(i));
    for (int k = 0; k < kFunctionalsPerTree; ++k) {
      const auto seed = 7919 * (i + 1) + static_cast<std::uint64_t>(k);
      const auto fe = random_functional(exact, seed);
      const auto re = lansit_check(exact, fe);
      o.require(re.leaf_side == testing::leaf_side(exact, fe.values), "leaf side oracle, tree " + std::to_string(i));
      o.require(re.residual == 0, "exact residual, tree " + std::to_string(i));

      const auto ff = random_functional(floating, seed);
      const auto rf = lansit_check(floating, ff);
      const auto rel = std::abs(rf.residual) / std::max(1.0, std::abs(rf.leaf_side));
      worst_float = std::max(worst_float, rel);
      o.require(rel <= kFloatRelTolerance, "float residual, tree " + std::to_string(i));
      checks += 2;
    }
  }
  o.detail = std::to_string(corpus().size()) + " trees x " + std::to_string(kFunctionalsPerTree) +
             " functionals, " + std::to_string(checks) + " checks; exact residual 0; worst float relative residual " +
             fmt(worst_float) + " (tol " + fmt(kFloatRelTolerance) + ")";
  return o;
}

Outcome lemma_equivalences() {
  Outcome o;
  double worst = 0.0;
  for (std::size_t i = 0; i < corpus().size(); ++i) {
    const auto& [exact, floating] = corpus()[i];
    const auto tag = " at tree " + std::to_string(i);

    Rational leaf_w = 0;
    for (const auto j : exact.leaves()) {
      leaf_w += exact.leaf_mass(j) * static_cast<long>(testing::depth_by_walk(exact, j));
    }
    o.require(expected_path_length(exact) == leaf_w, "path length" + tag);

    double fl_leaf_w = 0.0;
    for (const auto j : floating.leaves()) {
      fl_leaf_w += floating.leaf_mass(j) * static_cast<double>(testing::depth_by_walk(floating, j));
    }
    o.require(testing::near_rel(expected_path_length(floating), fl_leaf_w, kFloatRelTolerance),
              "float path length" + tag);

    const auto branch_h = leaf_entropy(exact);
    const auto oracle_h = testing::leaf_entropy_oracle(exact);
    worst = std::max(worst, std::abs(branch_h - oracle_h) / std::max(1.0, oracle_h));
    o.require(testing::near_rel(branch_h, oracle_h, kFloatRelTolerance), "leaf entropy" + tag);
    const auto fl_h = leaf_entropy(floating);
    o.require(testing::near_rel(fl_h, testing::leaf_entropy_oracle(floating), kFloatRelTolerance),
              "float leaf entropy" + tag);

    const auto other = resample_leaf_masses(exact, 31 * i + 5);
    const auto branch_d = tree_divergence(exact, other);
    const auto oracle_d = testing::leaf_divergence_oracle(exact, other);
    worst = std::max(worst, std::abs(branch_d - oracle_d) / std::max(1.0, std::abs(oracle_d)));
    o.require(testing::near_rel(branch_d, oracle_d, kFloatRelTolerance), "divergence" + tag);

    for (int k = 0; k < kFunctionalsPerTree; ++k) {
      const auto f = random_functional(exact, 7919 * (i + 1) + static_cast<std::uint64_t>(k));
      o.require(node_sum_by_contraction(exact, f) == node_sum_direct(exact, f), "merge order vs direct" + tag);
    }
    o.require(node_sum_by_contraction(exact, path_lengths(exact)) == node_sum_direct(exact, path_lengths(exact)),
              "merge order vs direct (w)" + tag);
  }
  o.detail = "path length exact; entropy and divergence branch sums vs leaf oracles, worst relative gap " +
             fmt(worst) + " (tol " + fmt(kFloatRelTolerance) + "); leaf-merging == direct node sum exactly";
  return o;
}

Outcome differential_lansit() {
  Outcome o;
  std::size_t checked = 0;
  for (std::size_t i = 0; i < corpus().size(); ++i) {
    const auto& tree = corpus()[i].exact;
    if (tree.is_degenerate()) {
      continue;
    }
    const auto report = differential_lansit_check(tree, path_lengths(tree));
    o.require(report.node_side == 1 && report.leaf_side == 1, "E[dw(S_B)] != 1 at tree " + std::to_string(i));
    ++checked;
  }
  o.detail = "E[dw(S_B)] = 1 exactly on " + std::to_string(checked) + " non-degenerate trees";
  return o;
}

Outcome chain_rule() {
  Outcome o;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto tree = generate_complete_tree<double>(2, 4, seed);
    std::map<std::vector<Label>, double> joint;
    for (const auto i : tree.leaves()) {
      joint[tree.label_path(i)] = tree.leaf_mass(i);
    }
    const auto oracle = testing::chain_rule_entropy(joint);
    const auto h = leaf_entropy(tree);
    worst = std::max(worst, std::abs(h - oracle));
    o.require(std::abs(h - oracle) <= kChainRuleTolerance, "chain rule at seed " + std::to_string(seed));
  }
  o.detail = "100 complete depth-4 binary trees, worst |H - chain rule| " + fmt(worst) + " (tol " +
             fmt(kChainRuleTolerance) + ")";
  return o;
}

Outcome pinsker_suites() {
  Outcome o;
  Rng rng(4242);
  std::size_t violations = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const auto labels = default_alphabet(2 + rng.below(7));
    const auto p = random_distribution<double>(labels, rng, trial % 2 == 0);
    const auto q = random_distribution<double>(labels, rng, trial % 3 != 0);
    if (!pinsker_check(p, q).holds) {
      ++violations;
      o.require(false, "classical Pinsker at trial " + std::to_string(trial));
    }
  }
  std::size_t tail_checks = 0;
  for (std::size_t i = 0; i < 500; ++i) {
    const auto& p = corpus()[i].exact;
    const auto q = resample_leaf_masses(p, 977 * i + 3);
    const auto report = tree_pinsker_report(p, q, kEpsilons);
    o.require(report.holds, "tree Pinsker (tree pair) at " + std::to_string(i));
    for (const auto& t : report.tail) {
      o.require(t.markov_holds, "Markov tail (tree pair) at " + std::to_string(i));
      ++tail_checks;
    }
    violations += report.all_hold() ? 0 : 1;
  }
  for (std::size_t i = 0; i < 500; ++i) {
    const auto& p = corpus()[500 + i].exact;
    const auto labels = default_alphabet(corpus_params(500 + i).alphabet_size);
    Rng spec_rng(90000 + i);
    const ProductSpec<Rational> spec(random_distribution<Rational>(labels, spec_rng, true));
    const auto report = tree_pinsker_report(p, spec, kEpsilons);
    o.require(report.holds, "tree Pinsker (product) at " + std::to_string(i));
    for (const auto& t : report.tail) {
      o.require(t.markov_holds, "Markov tail (product) at " + std::to_string(i));
      ++tail_checks;
    }
    violations += report.all_hold() ? 0 : 1;
  }
  o.detail = "10000 distribution pairs, 500 tree pairs, 500 (tree, product) pairs, " + std::to_string(tail_checks) +
             " Markov tail checks at eps {0.01,0.1,0.5,1}; violations " + std::to_string(violations);
  return o;
}

ProductSpec<Rational> binary_spec(Rational p0) {
  const Rational p1 = 1 - p0;
  return ProductSpec<Rational>(FiniteDistribution<Rational>({{Label{"0"}, p0}, {Label{"1"}, p1}}));
}

Outcome convergence() {
  Outcome o;
  const std::vector<std::size_t> budgets{4, 16, 64, 256, 1024, 4096};
  const auto start = std::chrono::steady_clock::now();
  const auto rows = convergence_sweep(binary_spec(Rational(2, 3)), budgets, 0.1);
  const auto& first = rows.front();
  const auto& last = rows.back();
  o.require(last.normalized_divergence < kSweepThreshold, "last normalized divergence >= 0.05");
  o.require(last.normalized_divergence < first.normalized_divergence, "normalized divergence did not decrease");
  o.require(last.entropy_rate_gap < kSweepThreshold, "last entropy rate gap >= 0.05");
  o.require(last.entropy_rate_gap < first.entropy_rate_gap, "entropy rate gap did not decrease");

  const auto uniform = convergence_sweep(binary_spec(Rational(1, 2)), budgets, 0.1);
  for (const auto& row : uniform) {
    o.require(row.normalized_divergence == 0.0 && row.entropy_rate_gap == 0.0,
              "uniform target not exact at " + std::to_string(row.leaf_count) + " leaves");
  }
  const auto seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.require(seconds < 60.0, "runtime over a minute");
  std::ostringstream detail;
  detail << "(2/3,1/3): nd " << fmt(first.normalized_divergence) << " -> " << fmt(last.normalized_divergence)
         << ", gap " << fmt(first.entropy_rate_gap) << " -> " << fmt(last.entropy_rate_gap) << " (threshold "
         << kSweepThreshold << "); uniform target exactly 0; " << fmt(std::round(seconds * 100) / 100) << " s";
  o.detail = detail.str();
  return o;
}

Outcome product_distributions() {
  Outcome o;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto k = 2 + seed % 3;
    const auto depth = 1 + seed % (k == 2 ? 6 : 4);
    const auto shape = generate_complete_tree<Rational>(k, depth, seed);
    Rng rng(seed);
    const ProductSpec<Rational> spec(random_distribution<Rational>(default_alphabet(k), rng, true));
    const auto qplus = product_node_probabilities(shape, spec);
    Rational sum = 0;
    for (const auto i : shape.leaves()) {
      sum += qplus.q[i];
    }
    o.require(sum == 1, "complete shape leaf sum at seed " + std::to_string(seed));
  }
  const auto example = testing::example_tree<Rational>();
  const ProductSpec<Rational> uniform(
      FiniteDistribution<Rational>({{Label{"a"}, Rational(1, 2)}, {Label{"b"}, Rational(1, 2)}}));
  const auto qplus = product_node_probabilities(example, uniform);
  Rational sum = 0;
  double oracle = 0.0;  // sum P_L(i) log2(P_L(i) / Q+_i)
  for (const auto i : example.leaves()) {
    sum += qplus.q[i];
    oracle += to_double(example.leaf_mass(i)) * std::log2(to_double(Rational(example.leaf_mass(i) / qplus.q[i])));
  }
  o.require(sum == Rational(3, 4), "example leaf sum != 3/4");
  o.require(oracle == 1.0, "definition-sum oracle != 1");
  o.require(divergence_to_product(example, uniform) == 1.0, "D(P_L || P+) != 1");
  o.detail = "100 complete shapes sum to 1 exactly; example leaf sum " + format_rational(sum) + ", D = " +
             fmt(divergence_to_product(example, uniform)) + " bit";
  return o;
}

Outcome cli_contract(const std::string& data_dir) {
  Outcome o;
  const auto run = [](std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    return cli::run_cli(args, out, err);
  };
  const auto analyze = run({"analyze", data_dir + "/example.tree"});
  o.require(analyze.exit_code == cli::kExitOk && analyze.report, "analyze exit code");
  if (analyze.report) {
    const auto& r = *analyze.report;
    o.require(r.metric("expected_path_length") && r.metric("expected_path_length")->value == 2.5, "analyze E[w]");
    o.require(r.metric("leaf_entropy") && std::abs(r.metric("leaf_entropy")->value - 1.5) <= kExampleTolerance,
              "analyze H");
    o.require(r.metric("entropy_rate") && std::abs(r.metric("entropy_rate")->value - 0.6) <= kExampleTolerance,
              "analyze rate");
  }
  const auto divergence = run({"divergence", data_dir + "/example.tree", "--product", "1/2,1/2"});
  o.require(divergence.exit_code == cli::kExitOk && divergence.report, "divergence exit code");
  if (divergence.report) {
    const auto& r = *divergence.report;
    o.require(r.metric("divergence") && r.metric("divergence")->value == 1.0, "divergence D");
    o.require(r.metric("normalized_divergence") &&
                  std::abs(r.metric("normalized_divergence")->value - 0.4) <= kExampleTolerance,
              "divergence normalized");
    o.require(r.check("pinsker_tree") && r.check("pinsker_tree")->pass, "divergence Pinsker");
  }
  std::ostringstream out;
  std::ostringstream err;
  const std::vector<std::string> cyclic{"validate", data_dir + "/cyclic.tree"};
  const auto validate = cli::run_cli(cyclic, out, err);
  o.require(validate.exit_code == cli::kExitInputError, "cyclic validate exit code");
  o.require(err.str().find("CycleDetected") != std::string::npos, "cyclic validate message");

  std::size_t round_trips = 0;
  for (const auto& [exact, floating] : corpus()) {
    const auto exact_text = serialize_document(to_document(exact));
    const auto back = parse_tree(exact_text);
    o.require(std::holds_alternative<ExactTree>(back) && std::get<ExactTree>(back) == exact, "exact round trip");
    o.require(parse_document(exact_text) == to_document(exact), "document round trip");
    const auto float_back = parse_tree(serialize_document(to_document(floating)));
    o.require(std::holds_alternative<Tree>(float_back) && std::get<Tree>(float_back) == floating,
              "float round trip");
    round_trips += 2;
  }
  o.detail = "analyze/divergence exit 0 with stated metrics, cyclic validate exit 2 CycleDetected; " +
             std::to_string(round_trips) + " document round trips";
  return o;
}

}  // namespace
}  // namespace treeprob

int main() {
  using treeprob::Outcome;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 worked example", treeprob::worked_example},
      {"2 LANSIT identity suite", treeprob::lansit_suite},
      {"3 lemma equivalences", treeprob::lemma_equivalences},
      {"4 differential LANSIT", treeprob::differential_lansit},
      {"5 chain-rule specialization", treeprob::chain_rule},
      {"6 Pinsker suites", treeprob::pinsker_suites},
      {"7 convergence demonstration", treeprob::convergence},
      {"8 product distributions", treeprob::product_distributions},
      {"9 CLI contract", [] { return treeprob::cli_contract(TREEPROB_TEST_DATA_DIR); }},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome outcome;
    try {
      outcome = run();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.failures.push_back(std::string("exception: ") + e.what());
    }
    std::cout << (outcome.pass ? "PASS " : "FAIL ") << name << ": " << outcome.detail << "\n";
    for (const auto& f : outcome.failures) {
      std::cout << "     " << f << "\n";
    }
    failed += outcome.pass ? 0 : 1;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
