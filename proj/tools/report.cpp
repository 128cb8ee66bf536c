#include "report.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>

#include "treeprob/numeric.hpp"

namespace treeprob::cli {
namespace {

// JSON has no infinities; non-finite values are written as strings.
nlohmann::ordered_json number(double x) {
  if (std::isfinite(x)) {
    return x;
  }
  return format_double(x);
}

std::string with_exact(double value, const std::string& exact) {
  auto text = format_double(value);
  if (!exact.empty() && exact != text) {
    text += " (" + exact + ")";
  }
  return text;
}

}  // namespace

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const Metric* Report::metric(std::string_view name) const {
  const auto it = std::find_if(results.begin(), results.end(), [&](const Metric& m) { return m.name == name; });
  return it == results.end() ? nullptr : &*it;
}

const Check* Report::check(std::string_view name) const {
  const auto it = std::find_if(checks.begin(), checks.end(), [&](const Check& c) { return c.name == name; });
  return it == checks.end() ? nullptr : &*it;
}

std::string format_text(const Report& report) {
  std::ostringstream out;
  out << "command: " << report.command << "\n";
  out << "mode: " << report.mode << "\n";
  for (const auto& input : report.inputs) {
    out << "input: " << input.path << " sha256:" << input.sha256 << "\n";
  }
  for (const auto& [key, value] : report.attributes) {
    out << key << ": " << value << "\n";
  }
  for (const auto& m : report.results) {
    out << m.name << " = " << with_exact(m.value, m.exact);
    if (!m.unit.empty()) {
      out << " " << m.unit;
    }
    out << "\n";
  }
  for (const auto& c : report.checks) {
    out << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << with_exact(c.lhs, c.lhs_exact) << " " << c.relation
        << " " << with_exact(c.rhs, c.rhs_exact) << ", residual " << with_exact(c.residual, c.residual_exact);
    if (c.tolerance_kind == "exact") {
      out << " (exact)";
    } else {
      out << " (" << c.tolerance_kind << " tolerance " << format_double(c.tolerance) << ")";
    }
    out << "\n";
  }
  out << "status: " << (report.passed() ? "ok" : "check failed") << "\n";
  return out.str();
}

std::string format_json(const Report& report) {
  nlohmann::ordered_json json;
  json["command"] = report.command;
  json["mode"] = report.mode;
  json["inputs"] = nlohmann::ordered_json::array();
  for (const auto& input : report.inputs) {
    json["inputs"].push_back({{"path", input.path}, {"sha256", input.sha256}});
  }
  json["attributes"] = nlohmann::ordered_json::object();
  for (const auto& [key, value] : report.attributes) {
    json["attributes"][key] = value;
  }
  json["results"] = nlohmann::ordered_json::object();
  for (const auto& m : report.results) {
    nlohmann::ordered_json entry{{"value", number(m.value)}, {"unit", m.unit}};
    if (!m.exact.empty()) {
      entry["exact"] = m.exact;
    }
    json["results"][m.name] = std::move(entry);
  }
  json["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : report.checks) {
    nlohmann::ordered_json entry{{"name", c.name},
                                 {"relation", c.relation},
                                 {"lhs", number(c.lhs)},
                                 {"rhs", number(c.rhs)},
                                 {"residual", number(c.residual)}};
    if (!c.lhs_exact.empty()) {
      entry["lhs_exact"] = c.lhs_exact;
      entry["rhs_exact"] = c.rhs_exact;
      entry["residual_exact"] = c.residual_exact;
    }
    entry["tolerance"] = c.tolerance;
    entry["tolerance_kind"] = c.tolerance_kind;
    entry["pass"] = c.pass;
    json["checks"].push_back(std::move(entry));
  }
  json["passed"] = report.passed();
  return json.dump(2) + "\n";
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int size = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &size, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < size; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xf];
  }
  return hex;
}

}  // namespace treeprob::cli
