#include "treeprob/error.hpp"

namespace treeprob {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::CycleDetected: return "CycleDetected";
    case Errc::MultipleRoots: return "MultipleRoots";
    case Errc::MultipleParents: return "MultipleParents";
    case Errc::UnknownNode: return "UnknownNode";
    case Errc::MassOnBranchingNode: return "MassOnBranchingNode";
    case Errc::MassNotNormalized: return "MassNotNormalized";
    case Errc::DuplicateSiblingLabel: return "DuplicateSiblingLabel";
    case Errc::NegativeMass: return "NegativeMass";
    case Errc::FunctionalIncomplete: return "FunctionalIncomplete";
    case Errc::DegenerateTree: return "DegenerateTree";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::AlphabetMismatch: return "AlphabetMismatch";
    case Errc::UnknownLabel: return "UnknownLabel";
    case Errc::InvalidDistribution: return "InvalidDistribution";
    case Errc::ParamsInvalid: return "ParamsInvalid";
    case Errc::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), message_(message) {}

}  // namespace treeprob
