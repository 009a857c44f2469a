#include "relsens/error.hpp"

namespace relsens {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::InvalidCorrelation: return "invalid-correlation";
    case ErrorKind::Syntax: return "syntax-error";
    case ErrorKind::UnknownIdentifier: return "unknown-identifier";
    case ErrorKind::UnknownFunction: return "unknown-function";
    case ErrorKind::DesignParameter: return "design-parameter";
    case ErrorKind::Configuration: return "configuration-error";
    case ErrorKind::OutOfDomain: return "out-of-domain";
    case ErrorKind::DomainError: return "domain-error";
    case ErrorKind::FitFailure: return "fit-failure";
    case ErrorKind::NatafInfeasible: return "nataf-infeasible";
    case ErrorKind::DegenerateProblem: return "degenerate-problem";
    case ErrorKind::Evaluation: return "evaluation-error";
    case ErrorKind::SingularPoint: return "singular-point";
    case ErrorKind::NoThreshold: return "no-threshold";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::InvalidWeights: return "invalid-weights";
    case ErrorKind::Stagnation: return "stagnation";
    case ErrorKind::DegenerateSample: return "degenerate-sample";
  }
  return "unknown";
}

bool is_configuration_error(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::InvalidCorrelation:
    case ErrorKind::Syntax:
    case ErrorKind::UnknownIdentifier:
    case ErrorKind::UnknownFunction:
    case ErrorKind::DesignParameter:
    case ErrorKind::Configuration:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), detail_(message) {}

SyntaxError::SyntaxError(ErrorKind kind, const std::string& message, std::size_t offset)
    : Error(kind, message + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

}  // namespace relsens
