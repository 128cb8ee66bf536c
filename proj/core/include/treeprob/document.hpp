#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "treeprob/tree.hpp"

namespace treeprob {

inline constexpr std::string_view kDocumentVersion = "1";

/// On-disk form of a tree: a JSON object
///
///     {"version": "1", "root": 0,
///      "edges": [[0, "a", 1], [0, "b", 2], ...],
///      "leaf_mass": {"2": "1/4", "5": "1/2", ...},
///      "metadata": {...}}
///
/// Node ids may be integers or strings, labels strings or integers. Masses
/// are rational strings ("p/q" or "p") or decimals. `root` and `metadata`
/// are optional.
struct TreeDocument {
  std::string version{kDocumentVersion};
  std::string root;  // empty: infer
  std::vector<Edge> edges;
  std::vector<std::pair<std::string, std::string>> leaf_mass;
  nlohmann::ordered_json metadata = nlohmann::ordered_json::object();

  friend bool operator==(const TreeDocument&, const TreeDocument&) = default;
};

/// Throws ParseError with a line/column or field location.
TreeDocument parse_document(std::string_view text);

std::string serialize_document(const TreeDocument& doc);

/// Masses print as canonical fractions (exact) or shortest round-trip
/// decimals that always carry a '.' or exponent (float).
template <Scalar T>
TreeDocument to_document(const BasicTree<T>& tree);

using AnyTree = std::variant<ExactTree, Tree>;

/// Exact mode when every mass is a rational string, unless `force_float`.
/// Validation errors keep their code and gain a "tree document" prefix.
AnyTree to_tree(const TreeDocument& doc, bool force_float = false);

AnyTree parse_tree(std::string_view text, bool force_float = false);

/// Node functional file: {"values": {"<node id>": <value>, ...}}. Values are
/// rational strings, decimals or JSON numbers; exact mode accepts only
/// rationals and integers.
template <Scalar T>
NodeFunctional<T> parse_functional(std::string_view text, const BasicTree<T>& tree);

extern template TreeDocument to_document<double>(const BasicTree<double>&);
extern template TreeDocument to_document<Rational>(const BasicTree<Rational>&);
extern template NodeFunctional<double> parse_functional<double>(std::string_view, const BasicTree<double>&);
extern template NodeFunctional<Rational> parse_functional<Rational>(std::string_view, const BasicTree<Rational>&);

}  // namespace treeprob
