#ifndef SYNCCTL_ERRORS_H_
#define SYNCCTL_ERRORS_H_

#include <stdexcept>
#include <string>

namespace syncctl {

enum class ErrorCode {
  kInvalidDimension,
  kRowConditionViolated,
  kEmptyControlRegion,
  kLinearSolveFailure,
  kNotSynchronizable,
  kNotConverged,
  kBracketFailure,
  kParseError,
  kValidationError,
  kUnknownField,
  kIoError,
};

const char* ErrorCodeName(ErrorCode code);

// Single exception type for the library; callers branch on code().
class SyncError : public std::runtime_error {
 public:
  SyncError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidDimension: return "InvalidDimension";
    case ErrorCode::kRowConditionViolated: return "RowConditionViolated";
    case ErrorCode::kEmptyControlRegion: return "EmptyControlRegion";
    case ErrorCode::kLinearSolveFailure: return "LinearSolveFailure";
    case ErrorCode::kNotSynchronizable: return "NotSynchronizable";
    case ErrorCode::kNotConverged: return "NotConverged";
    case ErrorCode::kBracketFailure: return "BracketFailure";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kValidationError: return "ValidationError";
    case ErrorCode::kUnknownField: return "UnknownField";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace syncctl

#endif  // SYNCCTL_ERRORS_H_
