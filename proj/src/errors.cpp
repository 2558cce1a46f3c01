#include "podkit/errors.hpp"

namespace podkit {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NegativeQuadraticForm: return "NegativeQuadraticForm";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::NonMonotoneGrid: return "NonMonotoneGrid";
    case ErrorCode::MalformedManifest: return "MalformedManifest";
    case ErrorCode::MissingDataFile: return "MissingDataFile";
    case ErrorCode::WeightNonPositive: return "WeightNonPositive";
    case ErrorCode::EigenFailure: return "EigenFailure";
    case ErrorCode::RankExceeded: return "RankExceeded";
    case ErrorCode::NotInvertible: return "NotInvertible";
    case ErrorCode::RankDeficientImage: return "RankDeficientImage";
    case ErrorCode::FormNotElliptic: return "FormNotElliptic";
    case ErrorCode::SingularRitzSystem: return "SingularRitzSystem";
    case ErrorCode::ProvenanceMismatch: return "ProvenanceMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::SolverDiverged: return "SolverDiverged";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

ErrorClass error_class(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NegativeQuadraticForm:
    case ErrorCode::EigenFailure:
    case ErrorCode::SingularRitzSystem:
    case ErrorCode::SolverDiverged:
    case ErrorCode::RankDeficient:
    case ErrorCode::RankDeficientImage:
      return ErrorClass::numerical;
    default:
      return ErrorClass::input;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code) {}

}  // namespace podkit
