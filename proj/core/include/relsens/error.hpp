#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace relsens {

enum class ErrorKind {
  // Input / configuration errors.
  InvalidArgument,
  InvalidCorrelation,
  Syntax,
  UnknownIdentifier,
  UnknownFunction,
  DesignParameter,
  Configuration,
  // Numerical failures.
  OutOfDomain,
  DomainError,
  FitFailure,
  NatafInfeasible,
  DegenerateProblem,
  Evaluation,
  SingularPoint,
  NoThreshold,
  Unsupported,
  InvalidWeights,
  Stagnation,
  DegenerateSample,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// True for errors caused by bad user input rather than numerical failure.
bool is_configuration_error(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  /// Message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

/// Parse or syntax error in an expression, carrying the byte offset.
class SyntaxError : public Error {
 public:
  SyntaxError(ErrorKind kind, const std::string& message, std::size_t offset);

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace relsens
