#include "telegraph/error.hpp"

namespace telegraph {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::BranchCut: return "BranchCut";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::Singular: return "Singular";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::ShortCircuit: return "ShortCircuit";
    case ErrorKind::ConsistencyError: return "ConsistencyError";
    case ErrorKind::ValidationFailure: return "ValidationFailure";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UnknownCheck: return "UnknownCheck";
    case ErrorKind::IOError: return "IOError";
  }
  return "Unknown";
}

}  // namespace telegraph
