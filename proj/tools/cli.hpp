#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>

#include "report.hpp"

namespace treeprob::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitInputError = 2;

struct CliResult {
  int exit_code = kExitOk;
  std::optional<Report> report;  // absent on input and usage errors
};

/// Runs one command. `args` excludes the program name. The report goes to
/// `out` in the selected format; diagnostics go to `err`.
CliResult run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace treeprob::cli
