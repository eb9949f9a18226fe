#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace boostvar {

enum class ErrorCode {
  kInvalidArgument,
  kInvalidData,
  kInsufficientObservations,
  kShapeMismatch,
  kParse,
  kIo,
  kNumericalFailure,
  kDegenerateDesign,
  kCriterionUndefined,
  kOutOfSync,
  kNotSelected,
  kIncompleteInference,
  kDesignMismatch,
  kInvalidCovariance,
  kSegmentTooShort,
  kNoUsableRows,
  kReplicationFailed,
};

std::string_view to_string(ErrorCode code);

// Errors that correspond to a numerical breakdown rather than bad input.
bool is_numerical(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace boostvar
