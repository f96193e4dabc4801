#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pceve {

enum class ErrorCode {
  // coalition-core
  kPartCountOutOfRange,
  kSizeOutOfRange,
  kPartIndexOutOfRange,
  // masking / images
  kEmptyImage,
  kInvalidCoalition,
  kBoxOutOfBounds,
  kInvalidPartSet,
  kImageFormat,
  // value functions
  kEvaluatorUnavailable,
  kMalformedResponse,
  kNonFiniteLogit,
  kHandshakeFailed,
  kClassCountMismatch,
  // aggregation / sanity
  kPartCountMismatch,
  kZeroVector,
  kVocabularyMismatch,
  // testkit
  kTooManyPlayers,
  // cli / data
  kSampleNotFound,
  kEmptyDataset,
  kManifest,
  kIo,
  kUsage,
};

// Process exit codes of the command-line tool.
enum class ErrorCategory { kUsage = 2, kData = 3, kModel = 4 };

std::string_view error_code_name(ErrorCode code);
ErrorCategory error_category(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return error_category(code_); }

 private:
  ErrorCode code_;
};

}  // namespace pceve
