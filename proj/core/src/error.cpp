#include "boostvar/error.hpp"

namespace boostvar {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kInvalidData: return "invalid data";
    case ErrorCode::kInsufficientObservations: return "insufficient observations";
    case ErrorCode::kShapeMismatch: return "shape mismatch";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kNumericalFailure: return "numerical failure";
    case ErrorCode::kDegenerateDesign: return "degenerate design";
    case ErrorCode::kCriterionUndefined: return "criterion undefined";
    case ErrorCode::kOutOfSync: return "inference out of sync";
    case ErrorCode::kNotSelected: return "variable not yet selected";
    case ErrorCode::kIncompleteInference: return "incomplete inference";
    case ErrorCode::kDesignMismatch: return "design mismatch";
    case ErrorCode::kInvalidCovariance: return "invalid covariance";
    case ErrorCode::kSegmentTooShort: return "segment too short";
    case ErrorCode::kNoUsableRows: return "no usable rows";
    case ErrorCode::kReplicationFailed: return "replication failed";
  }
  return "unknown error";
}

bool is_numerical(ErrorCode code) {
  return code == ErrorCode::kNumericalFailure || code == ErrorCode::kDegenerateDesign ||
         code == ErrorCode::kCriterionUndefined;
}

}  // namespace boostvar
