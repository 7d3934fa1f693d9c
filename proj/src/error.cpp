#include "finsent/error.hpp"

namespace finsent {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::FileUnreadable: return "FileUnreadable";
    case ErrorCode::FileWriteFailed: return "FileWriteFailed";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::NoOverlap: return "NoOverlap";
    case ErrorCode::NonPositiveOpen: return "NonPositiveOpen";
    case ErrorCode::NonPositiveThreshold: return "NonPositiveThreshold";
    case ErrorCode::InvalidTriple: return "InvalidTriple";
    case ErrorCode::MissingScore: return "MissingScore";
    case ErrorCode::DegenerateFeature: return "DegenerateFeature";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::StaleCache: return "StaleCache";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyBatch: return "EmptyBatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::EmptyTrainSplit: return "EmptyTrainSplit";
    case ErrorCode::MissingAnchors: return "MissingAnchors";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::WindowTooLarge: return "WindowTooLarge";
    case ErrorCode::MismatchedTestSets: return "MismatchedTestSets";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::BadFormat: return "BadFormat";
    case ErrorCode::ServiceError: return "ServiceError";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace finsent
