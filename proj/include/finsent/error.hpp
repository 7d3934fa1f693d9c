#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace finsent {

enum class ErrorCode {
  FileUnreadable,
  FileWriteFailed,
  MissingColumn,
  EmptyDataset,
  NoOverlap,
  NonPositiveOpen,
  NonPositiveThreshold,
  InvalidTriple,
  MissingScore,
  DegenerateFeature,
  TooFewRows,
  SeriesTooShort,
  DimensionMismatch,
  StaleCache,
  LengthMismatch,
  EmptyBatch,
  EmptyInput,
  NonFiniteGradient,
  NonFiniteValue,
  EmptyTrainSplit,
  MissingAnchors,
  NonConvergence,
  WindowTooLarge,
  MismatchedTestSets,
  InvalidArgument,
  BadFormat,
  ServiceError,
  ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every library failure carries a code so callers (and the CLI's machine-readable
// error line) can branch on the kind rather than the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace finsent
