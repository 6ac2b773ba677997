#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace memstab {

enum class ErrorCode {
  kInvalidTrace,
  kExcludedRun,
  kDegenerateProfile,
  kNoData,
  kNoPassingSolutions,
  kDegenerateTest,
  kUndefinedCorrelation,
  kInsufficientData,
  kConfiguration,
  kValidation,
  kIo,
  kParse,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers can distinguish "skip this item" from "abort the run".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace memstab
