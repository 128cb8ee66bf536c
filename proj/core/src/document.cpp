#include "treeprob/document.hpp"

#include <algorithm>
#include <cctype>

namespace treeprob {
namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void field_error(const std::string& where, const std::string& what) {
  throw Error(Errc::ParseError, where + ": " + what);
}

std::string line_column(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t k = 0; k < byte; ++k) {
    if (text[k] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    // e.byte is one past the offending character
    throw Error(Errc::ParseError, line_column(text, e.byte == 0 ? 0 : e.byte - 1) + ": malformed JSON");
  }
}

std::string node_id(const Json& value, const std::string& where) {
  if (value.is_string()) {
    return value.get<std::string>();
  }
  if (value.is_number_integer()) {
    return value.dump();
  }
  field_error(where, "node id must be a string or an integer");
}

std::string label_text(const Json& value, const std::string& where) {
  if (value.is_string()) {
    return value.get<std::string>();
  }
  if (value.is_number_integer()) {
    return value.dump();
  }
  field_error(where, "label must be a string or an integer");
}

std::string number_text(const Json& value, const std::string& where) {
  if (value.is_string()) {
    return value.get<std::string>();
  }
  if (value.is_number_integer()) {
    return value.dump();
  }
  if (value.is_number_float()) {
    return format_double(value.get<double>());
  }
  field_error(where, "expected a rational string, decimal or number");
}

// Ids that are canonical decimal integers serialize as JSON numbers.
Json id_json(const std::string& id) {
  const bool canonical = !id.empty() && id.size() < 19 && std::all_of(id.begin(), id.end(), [](unsigned char c) {
    return std::isdigit(c) != 0;
  }) && (id == "0" || id.front() != '0');
  return canonical ? Json(std::stoll(id)) : Json(id);
}

template <Scalar T>
T parse_value(const std::string& text, const std::string& where) {
  if (const auto r = parse_rational(text)) {
    return scalar_cast<T>(*r);
  }
  if constexpr (!is_exact_v<T>) {
    if (const auto d = parse_decimal(text)) {
      return *d;
    }
    field_error(where, "'" + text + "' is not a number");
  } else {
    field_error(where, "'" + text + "' is not a rational string (exact mode)");
  }
}

template <Scalar T>
BasicTree<T> build_from(const TreeDocument& doc) {
  LeafMassMap<T> masses;
  for (const auto& [id, text] : doc.leaf_mass) {
    masses[id] = parse_value<T>(text, "leaf_mass[\"" + id + "\"]");
  }
  std::optional<std::string> root;
  if (!doc.root.empty()) {
    root = doc.root;
  }
  try {
    return build_tree<T>(doc.edges, masses, root);
  } catch (const Error& e) {
    throw Error(e.code(), "tree document: " + e.message());
  }
}

std::string format_mass(const double value) {
  auto text = format_double(value);
  if (text.find_first_of(".eE") == std::string::npos && text.find_first_of("ni") == std::string::npos) {
    text += ".0";
  }
  return text;
}

std::string format_mass(const Rational& value) { return format_rational(value); }

}  // namespace

TreeDocument parse_document(std::string_view text) {
  const auto json = parse_json(text);
  if (!json.is_object()) {
    field_error("document", "top level must be an object");
  }
  TreeDocument doc;
  for (const auto& [key, value] : json.items()) {
    if (key == "version") {
      doc.version = number_text(value, "version");
      if (doc.version != kDocumentVersion) {
        field_error("version", "unsupported version '" + doc.version + "'");
      }
    } else if (key == "root") {
      doc.root = node_id(value, "root");
    } else if (key == "edges") {
      if (!value.is_array()) {
        field_error("edges", "must be an array");
      }
      for (std::size_t k = 0; k < value.size(); ++k) {
        const auto where = "edges[" + std::to_string(k) + "]";
        const auto& e = value[k];
        if (!e.is_array() || e.size() != 3) {
          field_error(where, "must be [parent, label, child]");
        }
        doc.edges.push_back(
            {node_id(e[0], where + "[0]"), Label{label_text(e[1], where + "[1]")}, node_id(e[2], where + "[2]")});
      }
    } else if (key == "leaf_mass") {
      if (!value.is_object()) {
        field_error("leaf_mass", "must be an object mapping leaf ids to masses");
      }
      for (const auto& [id, mass] : value.items()) {
        const auto where = "leaf_mass[\"" + id + "\"]";
        auto mass_text = number_text(mass, where);
        if (!parse_rational(mass_text) && !parse_decimal(mass_text)) {
          field_error(where, "'" + mass_text + "' is not a number");
        }
        doc.leaf_mass.emplace_back(id, std::move(mass_text));
      }
    } else if (key == "metadata") {
      if (!value.is_object()) {
        field_error("metadata", "must be an object");
      }
      doc.metadata = value;
    } else {
      field_error(key, "unknown field");
    }
  }
  if (!json.contains("leaf_mass")) {
    field_error("leaf_mass", "missing");
  }
  return doc;
}

std::string serialize_document(const TreeDocument& doc) {
  Json json = Json::object();
  json["version"] = doc.version;
  if (!doc.root.empty()) {
    json["root"] = id_json(doc.root);
  }
  Json edges = Json::array();
  for (const auto& e : doc.edges) {
    edges.push_back(Json::array({id_json(e.parent), e.label.symbol, id_json(e.child)}));
  }
  json["edges"] = std::move(edges);
  Json masses = Json::object();
  for (const auto& [id, mass] : doc.leaf_mass) {
    masses[id] = mass;
  }
  json["leaf_mass"] = std::move(masses);
  if (!doc.metadata.empty()) {
    json["metadata"] = doc.metadata;
  }
  return json.dump(2) + "\n";
}

template <Scalar T>
TreeDocument to_document(const BasicTree<T>& tree) {
  TreeDocument doc;
  doc.root = tree.id(tree.root());
  doc.edges = edges_of(tree);
  for (const auto i : tree.leaves()) {
    doc.leaf_mass.emplace_back(tree.id(i), format_mass(tree.leaf_mass(i)));
  }
  return doc;
}

AnyTree to_tree(const TreeDocument& doc, bool force_float) {
  const bool exact = !force_float && std::all_of(doc.leaf_mass.begin(), doc.leaf_mass.end(), [](const auto& entry) {
    return parse_rational(entry.second).has_value();
  });
  if (exact) {
    return build_from<Rational>(doc);
  }
  return build_from<double>(doc);
}

AnyTree parse_tree(std::string_view text, bool force_float) { return to_tree(parse_document(text), force_float); }

template <Scalar T>
NodeFunctional<T> parse_functional(std::string_view text, const BasicTree<T>& tree) {
  const auto json = parse_json(text);
  if (!json.is_object() || !json.contains("values") || !json["values"].is_object()) {
    field_error("values", "functional document needs a \"values\" object");
  }
  std::map<std::string, T, std::less<>> by_id;
  for (const auto& [id, value] : json["values"].items()) {
    const auto where = "values[\"" + id + "\"]";
    by_id.emplace(id, parse_value<T>(number_text(value, where), where));
  }
  return NodeFunctional<T>::from_map(tree, by_id);
}

template TreeDocument to_document<double>(const BasicTree<double>&);
template TreeDocument to_document<Rational>(const BasicTree<Rational>&);
template NodeFunctional<double> parse_functional<double>(std::string_view, const BasicTree<double>&);
template NodeFunctional<Rational> parse_functional<Rational>(std::string_view, const BasicTree<Rational>&);

}  // namespace treeprob
