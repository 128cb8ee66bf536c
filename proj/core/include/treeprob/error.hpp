#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace treeprob {

enum class Errc {
  CycleDetected,
  MultipleRoots,
  MultipleParents,
  UnknownNode,
  MassOnBranchingNode,
  MassNotNormalized,
  DuplicateSiblingLabel,
  NegativeMass,
  FunctionalIncomplete,
  DegenerateTree,
  ShapeMismatch,
  AlphabetMismatch,
  UnknownLabel,
  InvalidDistribution,
  ParamsInvalid,
  ParseError,
};

std::string_view to_string(Errc code);

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }
  /// The text after the code name.
  const std::string& message() const noexcept { return message_; }

 private:
  Errc code_;
  std::string message_;
};

}  // namespace treeprob
