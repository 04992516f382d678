#include "otmap/error.hpp"

namespace otmap {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::InvalidPointSet: return "InvalidPointSet";
    case ErrorCode::InvalidCost: return "InvalidCost";
    case ErrorCode::UnsupportedMetric: return "UnsupportedMetric";
    case ErrorCode::ProblemTooLarge: return "ProblemTooLarge";
    case ErrorCode::SpecError: return "SpecError";
    case ErrorCode::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::PoolTooLarge: return "PoolTooLarge";
    case ErrorCode::InvalidCount: return "InvalidCount";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::ModelError: return "ModelError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), message_(message) {}

}  // namespace otmap
