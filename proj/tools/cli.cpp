#include "cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <variant>
#include <vector>

#include "treeprob/approximation.hpp"
#include "treeprob/document.hpp"
#include "treeprob/experiments.hpp"
#include "treeprob/information.hpp"
#include "treeprob/lansit.hpp"
#include "treeprob/random.hpp"

namespace treeprob::cli {
namespace {

const std::vector<double> kDefaultEpsilons{0.01, 0.1, 0.5, 1.0};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::ParseError, "cannot read '" + path + "'");
  }
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

struct LoadedTree {
  AnyTree tree;
  InputDigest digest;
};

LoadedTree load_tree(const std::string& path, bool force_float) {
  const auto text = read_file(path);
  try {
    return {parse_tree(text, force_float), {path, sha256_hex(text)}};
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.message());
  }
}

Tree as_float(const AnyTree& tree) {
  return std::visit([](const auto& t) { return convert_tree<double>(t); }, tree);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    const auto first = item.find_first_not_of(' ');
    const auto last = item.find_last_not_of(' ');
    items.push_back(first == std::string::npos ? std::string{} : item.substr(first, last - first + 1));
  }
  return items;
}

std::vector<double> parse_epsilons(const std::string& text) {
  if (text.empty()) {
    return kDefaultEpsilons;
  }
  std::vector<double> eps;
  for (const auto& item : split_list(text)) {
    const auto value = parse_decimal(item);
    if (!value || !(*value > 0)) {
      throw Error(Errc::ParamsInvalid, "epsilon '" + item + "' must be a positive number");
    }
    eps.push_back(*value);
  }
  return eps;
}

std::vector<std::size_t> parse_budgets(const std::string& text) {
  std::vector<std::size_t> budgets;
  for (const auto& item : split_list(text)) {
    std::size_t value = 0;
    const auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (ec != std::errc{} || end != item.data() + item.size() || value == 0) {
      throw Error(Errc::ParamsInvalid, "budget '" + item + "' must be a positive integer");
    }
    budgets.push_back(value);
  }
  return budgets;
}

/// "p1,p2,..." or "a=p1,b=p2,...".
struct SpecText {
  std::vector<std::string> labels;  // empty when positional
  std::vector<std::string> values;
};

SpecText parse_spec_text(const std::string& text) {
  SpecText spec;
  const auto items = split_list(text);
  std::size_t named = 0;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      spec.values.push_back(item);
    } else {
      ++named;
      spec.labels.push_back(item.substr(0, eq));
      spec.values.push_back(item.substr(eq + 1));
    }
  }
  if (named != 0 && named != items.size()) {
    throw Error(Errc::ParseError, "distribution '" + text + "' mixes label=value and positional entries");
  }
  return spec;
}

bool all_rational(const SpecText& spec) {
  return std::all_of(spec.values.begin(), spec.values.end(),
                     [](const std::string& v) { return parse_rational(v).has_value(); });
}

template <Scalar T>
ProductSpec<T> make_spec(const SpecText& text, const std::vector<Label>& positional) {
  std::map<Label, T> mass;
  for (std::size_t k = 0; k < text.values.size(); ++k) {
    const auto& value = text.values[k];
    std::optional<T> parsed;
    if (const auto r = parse_rational(value)) {
      parsed = scalar_cast<T>(*r);
    } else if constexpr (!is_exact_v<T>) {
      parsed = parse_decimal(value);
    }
    if (!parsed) {
      throw Error(Errc::ParseError, "probability '" + value + "' is not a number");
    }
    const Label label = text.labels.empty() ? positional[k] : Label{text.labels[k]};
    if (!mass.emplace(label, *parsed).second) {
      throw Error(Errc::ParseError, "label '" + label.symbol + "' appears twice");
    }
  }
  return ProductSpec<T>(FiniteDistribution<T>(std::move(mass)));
}

template <Scalar T>
const char* mode_name() {
  return is_exact_v<T> ? "exact" : "float";
}

template <Scalar T>
Metric metric(std::string name, const T& value, std::string unit) {
  Metric m{std::move(name), to_double(value), std::move(unit), {}};
  if constexpr (is_exact_v<T>) {
    m.exact = format_rational(value);
  }
  return m;
}

template <Scalar T>
Check identity(std::string name, const T& lhs, const T& rhs) {
  Check c;
  c.name = std::move(name);
  c.relation = "=";
  c.lhs = to_double(lhs);
  c.rhs = to_double(rhs);
  if constexpr (is_exact_v<T>) {
    const T residual = lhs - rhs;
    c.residual = to_double(residual);
    c.lhs_exact = format_rational(lhs);
    c.rhs_exact = format_rational(rhs);
    c.residual_exact = format_rational(residual);
    c.tolerance_kind = "exact";
    c.pass = residual == 0;
  } else {
    c.tolerance = kIdentityTolerance;
    c.tolerance_kind = "relative";
    if (lhs == rhs) {
      c.residual = 0.0;
      c.pass = true;
    } else {
      c.residual = lhs - rhs;
      c.pass = residual_ok<double>(c.residual, lhs);
    }
  }
  return c;
}

template <Scalar T>
Check bound_check(std::string name, double lhs, std::string relation, double rhs, bool pass) {
  Check c;
  c.name = std::move(name);
  c.relation = std::move(relation);
  c.lhs = lhs;
  c.rhs = rhs;
  c.residual = lhs - rhs;
  c.pass = pass;
  if constexpr (is_exact_v<T>) {
    c.tolerance_kind = "exact";
  } else {
    c.tolerance = kPinskerTolerance;
    c.tolerance_kind = "relative";
  }
  return c;
}

// Pinsker's bound is evaluated in floating point in both modes.
Check pinsker_check_entry(const PinskerTreeReport& rep) {
  auto c = bound_check<double>("pinsker_tree", rep.normalized_divergence, ">=", rep.bound, rep.holds);
  return c;
}

template <Scalar T>
void add_pinsker(Report& report, const PinskerTreeReport& rep, const std::string& suffix = {}) {
  report.results.push_back({"normalized_divergence" + suffix, rep.normalized_divergence, "bits/branch", {}});
  report.results.push_back({"mean_distance" + suffix, rep.mean_distance, "", {}});
  report.results.push_back({"mean_sq_distance" + suffix, rep.mean_sq_distance, "", {}});
  report.results.push_back({"pinsker_bound" + suffix, rep.bound, "bits/branch", {}});
  auto pinsker = pinsker_check_entry(rep);
  pinsker.name += suffix;
  report.checks.push_back(std::move(pinsker));
  for (const auto& t : rep.tail) {
    const auto eps = "[eps=" + format_double(t.epsilon) + "]" + suffix;
    report.results.push_back({"tail_probability" + eps, t.probability, "probability", {}});
    report.results.push_back({"markov_bound" + eps, t.markov_bound, "probability", {}});
    report.checks.push_back(bound_check<T>("markov_tail" + eps, t.probability, "<=", t.markov_bound, t.markov_holds));
  }
}

template <Scalar T>
Report validate_tree(const BasicTree<T>& tree) {
  Report r;
  r.mode = mode_name<T>();
  r.results.push_back({"node_count", static_cast<double>(tree.size()), "nodes", {}});
  r.results.push_back({"leaf_count", static_cast<double>(tree.leaves().size()), "nodes", {}});
  r.results.push_back({"branching_node_count", static_cast<double>(tree.branching_nodes().size()), "nodes", {}});
  return r;
}

template <Scalar T>
Report analyze_tree(const BasicTree<T>& tree) {
  auto r = validate_tree(tree);
  const auto ew = expected_path_length(tree);
  const auto h = leaf_entropy(tree);
  r.results.push_back(metric("expected_path_length", ew, "branches"));
  r.results.push_back({"leaf_entropy", h, "bits", {}});

  std::vector<double> leaf_masses;
  for (const auto i : tree.leaves()) {
    leaf_masses.push_back(to_double(tree.leaf_mass(i)));
  }
  r.checks.push_back(identity("path_length", lansit_check(tree, path_lengths(tree)).leaf_side, ew));
  r.checks.push_back(identity("leaf_entropy", entropy_bits(leaf_masses), h));

  if (tree.is_degenerate()) {
    r.attributes.emplace_back("degenerate", "root is a leaf; per-branch quantities are undefined");
  } else {
    const auto rate = entropy_rate(tree);
    r.results.push_back({"entropy_rate", rate, "bits/branch", {}});
    r.checks.push_back(identity("entropy_rate", h / to_double(ew), rate));
    const auto pb = branching_node_distribution(tree);
    T total{0};
    for (const auto& [j, p] : pb.mass) {
      r.results.push_back(metric("branching_node_probability[" + tree.id(j) + "]", p, "probability"));
      total += p;
    }
    r.checks.push_back(identity("branching_node_distribution_sum", total, T{1}));
  }
  const auto q = node_probabilities(tree);
  for (NodeIndex j = 0; j < tree.size(); ++j) {
    r.results.push_back(metric("node_probability[" + tree.id(j) + "]", q.q[j], "probability"));
  }
  return r;
}

template <Scalar T>
Report divergence_between(const BasicTree<T>& p, const BasicTree<T>& q, std::span<const double> eps) {
  Report r;
  r.mode = mode_name<T>();
  const auto d = tree_divergence(p, q);
  const auto rep = tree_pinsker_report(p, q, eps);
  r.results.push_back({"divergence", d, "bits", {}});
  r.checks.push_back(identity("normalized_divergence", d / to_double(expected_path_length(p)),
                              normalized_divergence(p, q)));
  add_pinsker<T>(r, rep);
  return r;
}

template <Scalar T>
Report divergence_to(const BasicTree<T>& p, const ProductSpec<T>& spec, std::span<const double> eps) {
  Report r;
  r.mode = mode_name<T>();
  const auto qplus = product_node_probabilities(p, spec);
  T leaf_sum{0};
  for (const auto i : p.leaves()) {
    leaf_sum += qplus.q[i];
  }
  const auto d = divergence_to_product(p, spec);
  const auto rep = tree_pinsker_report(p, spec, eps);
  r.results.push_back(metric("product_leaf_mass", leaf_sum, "probability"));
  r.results.push_back({"divergence", d, "bits", {}});
  r.checks.push_back(identity("divergence_branch_sum", d, divergence_to_product_branch_sum(p, spec)));
  r.checks.push_back(identity("normalized_divergence", d / to_double(expected_path_length(p)),
                              rep.normalized_divergence));
  add_pinsker<T>(r, rep);
  return r;
}

template <Scalar T, Scalar U>
void add_lansit_checks(Report& r, const BasicTree<U>& tree, const NodeFunctional<U>& f, const std::string& name) {
  const auto plain = lansit_check(tree, f);
  r.checks.push_back(identity("lansit[" + name + "]", plain.leaf_side, plain.node_side));
  r.checks.push_back(identity("merge_order[" + name + "]", plain.node_side, plain.direct_node_side));
  if (!tree.is_degenerate()) {
    const auto diff = differential_lansit_check(tree, f);
    r.checks.push_back(identity("differential_lansit[" + name + "]", diff.leaf_side, diff.node_side));
  }
}

template <Scalar T>
Report check_tree(const BasicTree<T>& tree, const std::optional<std::string>& functional_text) {
  Report r;
  r.mode = mode_name<T>();
  if (functional_text) {
    add_lansit_checks<T>(r, tree, parse_functional<T>(*functional_text, tree), "file");
  } else {
    add_lansit_checks<T>(r, tree, path_lengths(tree), "w");
    const auto as_double = convert_tree<double>(tree);
    add_lansit_checks<double>(r, as_double, self_information(as_double), "-log2Q");
  }
  return r;
}

template <Scalar T>
Report run_sweep(const ProductSpec<T>& spec, std::span<const std::size_t> budgets, double epsilon,
                 const std::string& out_path) {
  Report r;
  r.mode = mode_name<T>();
  const auto rows = convergence_sweep(spec, budgets, epsilon);
  std::ofstream csv(out_path, std::ios::binary);
  if (!csv) {
    throw Error(Errc::ParamsInvalid, "cannot write '" + out_path + "'");
  }
  write_sweep_csv(csv, rows);
  csv.close();
  if (!csv) {
    throw Error(Errc::ParamsInvalid, "cannot write '" + out_path + "'");
  }
  r.attributes.emplace_back("csv", out_path);
  r.attributes.emplace_back("rng", std::string(Rng::kAlgorithm));
  r.attributes.emplace_back("epsilon", format_double(epsilon));
  r.results.push_back({"target_entropy", entropy(spec.base()), "bits/branch", {}});
  const std::vector<double> eps{epsilon};
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& row = rows[k];
    const auto at = "[budget=" + std::to_string(budgets[k]) + "]";
    r.results.push_back({"leaf_count" + at, static_cast<double>(row.leaf_count), "nodes", {}});
    r.results.push_back({"mean_length" + at, row.mean_length, "branches", {}});
    r.results.push_back({"normalized_divergence" + at, row.normalized_divergence, "bits/branch", {}});
    r.results.push_back({"entropy_rate" + at, row.entropy_rate, "bits/branch", {}});
    r.results.push_back({"entropy_rate_gap" + at, row.entropy_rate_gap, "bits/branch", {}});
    r.results.push_back({"tail_probability" + at, row.max_tail, "probability", {}});

    const auto rep = tree_pinsker_report(grow_matcher_tree(spec, budgets[k]), spec, eps);
    auto pinsker = pinsker_check_entry(rep);
    pinsker.name += at;
    r.checks.push_back(std::move(pinsker));
    const auto& t = rep.tail.front();
    r.checks.push_back(bound_check<T>("markov_tail" + at, t.probability, "<=", t.markov_bound, t.markov_holds));
    if (rep.mean_distance <= epsilon * epsilon) {
      r.checks.push_back(bound_check<double>("tail_below_epsilon" + at, t.probability, "<=", epsilon,
                                             t.probability <= epsilon + kPinskerTolerance));
    }
  }
  return r;
}

}  // namespace

CliResult run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rooted trees with probabilities: leaf/node identities, divergences and matcher sweeps", "treeprob"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string format = "text";
  bool force_float = false;
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "json"}));
  app.add_flag("--float", force_float, "Use floating point even when every mass is a fraction");

  std::string tree_path;
  auto* validate_cmd = app.add_subcommand("validate", "Parse and validate a tree document");
  validate_cmd->add_option("tree", tree_path, "Tree document")->required();

  auto* analyze_cmd = app.add_subcommand("analyze", "Path length, entropy, entropy rate and P_B of a tree");
  analyze_cmd->add_option("tree", tree_path, "Tree document")->required();

  std::string q_path;
  std::string product_text;
  std::string eps_text;
  auto* divergence_cmd = app.add_subcommand("divergence", "Divergence and Pinsker report against a tree or product");
  divergence_cmd->add_option("p", tree_path, "Tree document P")->required();
  auto* q_opt = divergence_cmd->add_option("q", q_path, "Tree document Q");
  divergence_cmd->add_option("--product", product_text, "Branching distribution p1,p2,... or a=p1,b=p2,...")
      ->excludes(q_opt);
  divergence_cmd->add_option("--epsilon", eps_text, "Comma-separated tail thresholds");

  std::string functional_path;
  auto* check_cmd = app.add_subcommand("check", "Leaf/node identity checks for node functionals");
  check_cmd->add_option("tree", tree_path, "Tree document")->required();
  check_cmd->add_option("--functional", functional_path, "Node functional document");

  std::string target_text;
  std::string budgets_text;
  std::string out_path;
  double sweep_epsilon = 0.1;
  auto* sweep_cmd = app.add_subcommand("sweep", "Matcher convergence sweep written as CSV");
  sweep_cmd->add_option("--target", target_text, "Target branching distribution")->required();
  sweep_cmd->add_option("--budgets", budgets_text, "Comma-separated leaf budgets")->required();
  sweep_cmd->add_option("--epsilon", sweep_epsilon, "Tail threshold")->capture_default_str();
  sweep_cmd->add_option("--out", out_path, "CSV output path")->required();

  const std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::vector<std::string>(reversed));
  } catch (const CLI::ParseError& e) {
    const auto code = app.exit(e, out, err);
    return {code == 0 ? kExitOk : kExitInputError, std::nullopt};
  }

  Report report;
  try {
    if (validate_cmd->parsed() || analyze_cmd->parsed()) {
      const auto loaded = load_tree(tree_path, force_float);
      report = std::visit(
          [&](const auto& t) { return validate_cmd->parsed() ? validate_tree(t) : analyze_tree(t); }, loaded.tree);
      report.inputs.push_back(loaded.digest);
    } else if (divergence_cmd->parsed()) {
      if (q_path.empty() == product_text.empty()) {
        throw Error(Errc::ParamsInvalid, "divergence needs either a second tree or --product");
      }
      const auto eps = parse_epsilons(eps_text);
      const auto p = load_tree(tree_path, force_float);
      if (!q_path.empty()) {
        const auto q = load_tree(q_path, force_float);
        if (std::holds_alternative<ExactTree>(p.tree) && std::holds_alternative<ExactTree>(q.tree)) {
          report = divergence_between(std::get<ExactTree>(p.tree), std::get<ExactTree>(q.tree), eps);
        } else {
          report = divergence_between(as_float(p.tree), as_float(q.tree), eps);
        }
        report.inputs = {p.digest, q.digest};
      } else {
        const auto spec = parse_spec_text(product_text);
        std::vector<Label> positional = std::visit([](const auto& t) { return t.alphabet(); }, p.tree);
        if (positional.size() != spec.values.size()) {
          positional = default_alphabet(spec.values.size());
        }
        if (std::holds_alternative<ExactTree>(p.tree) && all_rational(spec)) {
          report = divergence_to(std::get<ExactTree>(p.tree), make_spec<Rational>(spec, positional), eps);
        } else {
          report = divergence_to(as_float(p.tree), make_spec<double>(spec, positional), eps);
        }
        report.attributes.emplace_back("product", product_text);
        report.inputs = {p.digest};
      }
    } else if (check_cmd->parsed()) {
      const auto loaded = load_tree(tree_path, force_float);
      std::optional<std::string> functional_text;
      if (!functional_path.empty()) {
        functional_text = read_file(functional_path);
      }
      report = std::visit([&](const auto& t) { return check_tree(t, functional_text); }, loaded.tree);
      report.inputs.push_back(loaded.digest);
      if (functional_text) {
        report.inputs.push_back({functional_path, sha256_hex(*functional_text)});
      }
    } else if (sweep_cmd->parsed()) {
      if (!(sweep_epsilon > 0)) {
        throw Error(Errc::ParamsInvalid, "epsilon must be positive");
      }
      const auto spec = parse_spec_text(target_text);
      const auto budgets = parse_budgets(budgets_text);
      const auto labels = default_alphabet(spec.values.size());
      if (all_rational(spec) && !force_float) {
        report = run_sweep(make_spec<Rational>(spec, labels), budgets, sweep_epsilon, out_path);
      } else {
        report = run_sweep(make_spec<double>(spec, labels), budgets, sweep_epsilon, out_path);
      }
      report.attributes.emplace_back("target", target_text);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return {kExitInputError, std::nullopt};
  }

  for (const auto* sub : app.get_subcommands()) {
    report.command = sub->get_name();
  }
  out << (format == "json" ? format_json(report) : format_text(report));
  const auto code = report.passed() ? kExitOk : kExitCheckFailed;
  return {code, std::move(report)};
}

}  // namespace treeprob::cli
