#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace treeprob::cli {

struct Metric {
  std::string name;
  double value = 0.0;
  std::string unit;
  std::string exact;  // canonical fraction in exact mode, else empty
};

/// One side-by-side comparison. Identities use relation "=", with lhs the
/// leaf side and rhs the node side; inequalities use ">=" or "<=".
struct Check {
  std::string name;
  std::string relation;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;  // lhs - rhs
  std::string lhs_exact;
  std::string rhs_exact;
  std::string residual_exact;
  double tolerance = 0.0;
  std::string tolerance_kind;  // "exact", "relative" or "absolute"
  bool pass = true;
};

struct InputDigest {
  std::string path;
  std::string sha256;
};

struct Report {
  std::string command;
  std::string mode;  // "exact" or "float"
  std::vector<InputDigest> inputs;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<Metric> results;
  std::vector<Check> checks;

  bool passed() const;
  const Metric* metric(std::string_view name) const;
  const Check* check(std::string_view name) const;
};

std::string format_text(const Report& report);
std::string format_json(const Report& report);

std::string sha256_hex(std::string_view data);

}  // namespace treeprob::cli
