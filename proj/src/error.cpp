#include "gensor/error.hpp"

namespace gensor {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownKind: return "UnknownKind";
    case ErrorCode::MissingParam: return "MissingParam";
    case ErrorCode::NonPositiveExtent: return "NonPositiveExtent";
    case ErrorCode::AxisNotFound: return "AxisNotFound";
    case ErrorCode::IllegalAction: return "IllegalAction";
    case ErrorCode::LevelOutOfRange: return "LevelOutOfRange";
    case ErrorCode::MonotonicityViolation: return "MonotonicityViolation";
    case ErrorCode::MissingLevel: return "MissingLevel";
    case ErrorCode::IncompleteState: return "IncompleteState";
    case ErrorCode::TooLargeToEnumerate: return "TooLargeToEnumerate";
    case ErrorCode::NoLegalAction: return "NoLegalAction";
    case ErrorCode::EmptyCandidates: return "EmptyCandidates";
    case ErrorCode::SpaceTooLarge: return "SpaceTooLarge";
    case ErrorCode::NotErgodic: return "NotErgodic";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::ReplayMismatch: return "ReplayMismatch";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Error";
}

}  // namespace gensor
