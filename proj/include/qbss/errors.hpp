#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qbss {

enum class ErrorKind {
  InvalidArgument,
  SubsetTooLarge,
  EmptyTestSet,
  DimensionTooLarge,
  ZeroVector,
  DegenerateMarking,
  DomainError,
  ConditionViolated,
  NoConvergence,
  DegenerateSignal,
  ParseError,
  MissingColumn,
  NonNumericCell,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a kind so callers (the CLI in
/// particular) can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void raise(ErrorKind kind, const std::string& message);

}  // namespace qbss
