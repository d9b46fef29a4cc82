#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace geoconvex {

/// Machine-readable error categories. The names double as the `error`
/// field of CLI reports, so keep them stable.
enum class ErrorKind {
  BasePointMismatch,
  BeyondInjectivityRadius,
  InvalidManifold,
  InvalidPoint,
  InvalidTangent,
  ManifoldMismatch,
  InvalidRegion,
  SamplingExhausted,
  OutsideProjectionNeighborhood,
  ProjectionNotCertified,
  DegenerateProjection,
  NotInSet,
  NNLSStalled,
  PointInSet,
  NotBoundaryPoint,
  SupportNotCertified,
  InvalidQuasiHyperplane,
  NumericalBreakdown,
  ParseError,
  EvalDomainError,
  InvalidProblem,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view kind_name() const noexcept { return to_string(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace geoconvex
