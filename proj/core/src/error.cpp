#include "geoconvex/error.hpp"

namespace geoconvex {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::BasePointMismatch: return "BasePointMismatch";
    case ErrorKind::BeyondInjectivityRadius: return "BeyondInjectivityRadius";
    case ErrorKind::InvalidManifold: return "InvalidManifold";
    case ErrorKind::InvalidPoint: return "InvalidPoint";
    case ErrorKind::InvalidTangent: return "InvalidTangent";
    case ErrorKind::ManifoldMismatch: return "ManifoldMismatch";
    case ErrorKind::InvalidRegion: return "InvalidRegion";
    case ErrorKind::SamplingExhausted: return "SamplingExhausted";
    case ErrorKind::OutsideProjectionNeighborhood: return "OutsideProjectionNeighborhood";
    case ErrorKind::ProjectionNotCertified: return "ProjectionNotCertified";
    case ErrorKind::DegenerateProjection: return "DegenerateProjection";
    case ErrorKind::NotInSet: return "NotInSet";
    case ErrorKind::NNLSStalled: return "NNLSStalled";
    case ErrorKind::PointInSet: return "PointInSet";
    case ErrorKind::NotBoundaryPoint: return "NotBoundaryPoint";
    case ErrorKind::SupportNotCertified: return "SupportNotCertified";
    case ErrorKind::InvalidQuasiHyperplane: return "InvalidQuasiHyperplane";
    case ErrorKind::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::EvalDomainError: return "EvalDomainError";
    case ErrorKind::InvalidProblem: return "InvalidProblem";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace geoconvex
