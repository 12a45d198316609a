#include "qbss/errors.hpp"

namespace qbss {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::SubsetTooLarge: return "SubsetTooLarge";
    case ErrorKind::EmptyTestSet: return "EmptyTestSet";
    case ErrorKind::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::DegenerateMarking: return "DegenerateMarking";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::ConditionViolated: return "ConditionViolated";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::DegenerateSignal: return "DegenerateSignal";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::MissingColumn: return "MissingColumn";
    case ErrorKind::NonNumericCell: return "NonNumericCell";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void raise(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace qbss
