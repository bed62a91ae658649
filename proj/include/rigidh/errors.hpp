#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rigidh {

enum class ErrorKind {
  DivisionNearZero,
  SingularPoint,
  ConfigInvalid,
  NearSingularMetric,
  SamplingExhausted,
  DegenerateFit,
  IndexNotInFamily,
  EmptySample,
  PreconditionViolation,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DivisionNearZero: return "DivisionNearZero";
    case ErrorKind::SingularPoint: return "SingularPoint";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::NearSingularMetric: return "NearSingularMetric";
    case ErrorKind::SamplingExhausted: return "SamplingExhausted";
    case ErrorKind::DegenerateFit: return "DegenerateFit";
    case ErrorKind::IndexNotInFamily: return "IndexNotInFamily";
    case ErrorKind::EmptySample: return "EmptySample";
    case ErrorKind::PreconditionViolation: return "PreconditionViolation";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI in particular) can map it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace rigidh
