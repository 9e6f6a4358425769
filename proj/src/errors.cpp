#include "mtreg/errors.hpp"

namespace mtreg {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonSymmetric: return "NonSymmetric";
    case ErrorCode::IndefiniteInput: return "IndefiniteInput";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::DegenerateEigenvalue: return "DegenerateEigenvalue";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SingularRidge: return "SingularRidge";
    case ErrorCode::InvalidInputs: return "InvalidInputs";
    case ErrorCode::UndefinedMetric: return "UndefinedMetric";
    case ErrorCode::MalformedInput: return "MalformedInput";
  }
  return "Unknown";
}

void fail(ErrorCode code, const std::string& what) {
  throw Error(code, std::string(to_string(code)) + ": " + what);
}

}  // namespace mtreg
