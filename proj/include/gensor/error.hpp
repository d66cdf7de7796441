#pragma once

#include <stdexcept>
#include <string>

namespace gensor {

enum class ErrorCode {
  UnknownKind,
  MissingParam,
  NonPositiveExtent,
  AxisNotFound,
  IllegalAction,
  LevelOutOfRange,
  MonotonicityViolation,
  MissingLevel,
  IncompleteState,
  TooLargeToEnumerate,
  NoLegalAction,
  EmptyCandidates,
  SpaceTooLarge,
  NotErgodic,
  NoConvergence,
  ShapeMismatch,
  ReplayMismatch,
  ConfigError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gensor
