#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace podkit {

enum class ErrorCode {
  DimensionMismatch,
  NotSymmetric,
  NotPositiveDefinite,
  NegativeQuadraticForm,
  RankDeficient,
  NonMonotoneGrid,
  MalformedManifest,
  MissingDataFile,
  WeightNonPositive,
  EigenFailure,
  RankExceeded,
  NotInvertible,
  RankDeficientImage,
  FormNotElliptic,
  SingularRitzSystem,
  ProvenanceMismatch,
  IndexOutOfRange,
  SolverDiverged,
  InvalidArgument,
};

// Input-class errors are caused by what the caller passed in; numerical-class
// errors come from a factorization or solver failing on otherwise valid input.
enum class ErrorClass { input, numerical };

std::string_view error_name(ErrorCode code) noexcept;
ErrorClass error_class(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const noexcept { return error_name(code_); }

 private:
  ErrorCode code_;
};

}  // namespace podkit
