#include "pceve/error.hpp"

namespace pceve {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kPartCountOutOfRange: return "PartCountOutOfRange";
    case ErrorCode::kSizeOutOfRange: return "SizeOutOfRange";
    case ErrorCode::kPartIndexOutOfRange: return "PartIndexOutOfRange";
    case ErrorCode::kEmptyImage: return "EmptyImage";
    case ErrorCode::kInvalidCoalition: return "InvalidCoalition";
    case ErrorCode::kBoxOutOfBounds: return "BoxOutOfBounds";
    case ErrorCode::kInvalidPartSet: return "InvalidPartSet";
    case ErrorCode::kImageFormat: return "ImageFormat";
    case ErrorCode::kEvaluatorUnavailable: return "EvaluatorUnavailable";
    case ErrorCode::kMalformedResponse: return "MalformedResponse";
    case ErrorCode::kNonFiniteLogit: return "NonFiniteLogit";
    case ErrorCode::kHandshakeFailed: return "HandshakeFailed";
    case ErrorCode::kClassCountMismatch: return "ClassCountMismatch";
    case ErrorCode::kPartCountMismatch: return "PartCountMismatch";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kVocabularyMismatch: return "VocabularyMismatch";
    case ErrorCode::kTooManyPlayers: return "TooManyPlayers";
    case ErrorCode::kSampleNotFound: return "SampleNotFound";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kManifest: return "ManifestError";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kUsage: return "UsageError";
  }
  return "UnknownError";
}

ErrorCategory error_category(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEvaluatorUnavailable:
    case ErrorCode::kMalformedResponse:
    case ErrorCode::kNonFiniteLogit:
    case ErrorCode::kHandshakeFailed:
    case ErrorCode::kClassCountMismatch:
      return ErrorCategory::kModel;
    case ErrorCode::kUsage:
    case ErrorCode::kPartCountOutOfRange:
    case ErrorCode::kSizeOutOfRange:
    case ErrorCode::kPartIndexOutOfRange:
    case ErrorCode::kTooManyPlayers:
      return ErrorCategory::kUsage;
    default:
      return ErrorCategory::kData;
  }
}

}  // namespace pceve
