#include "memstab/error.hpp"

namespace memstab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidTrace: return "invalid-trace";
    case ErrorCode::kExcludedRun: return "excluded-run";
    case ErrorCode::kDegenerateProfile: return "degenerate-profile";
    case ErrorCode::kNoData: return "no-data";
    case ErrorCode::kNoPassingSolutions: return "no-passing-solutions";
    case ErrorCode::kDegenerateTest: return "degenerate-test";
    case ErrorCode::kUndefinedCorrelation: return "undefined-correlation";
    case ErrorCode::kInsufficientData: return "insufficient-data";
    case ErrorCode::kConfiguration: return "configuration";
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kParse: return "parse";
  }
  return "unknown";
}

}  // namespace memstab
