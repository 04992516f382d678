#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace otmap {

enum class ErrorCode {
  SizeMismatch,
  InvalidPointSet,
  InvalidCost,
  UnsupportedMetric,
  ProblemTooLarge,
  SpecError,
  NonFiniteGradient,
  TooFewPoints,
  PoolTooLarge,
  InvalidCount,
  InvalidArgument,
  BadMagic,
  TruncatedFile,
  CountMismatch,
  ModelError,
  ParseError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable code; the CLI maps codes to exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace otmap
