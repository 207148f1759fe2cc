#pragma once

#include <stdexcept>
#include <string>

namespace segconf {

// Error kinds, grouped into three classes that map onto the CLI exit codes:
// io (1), validation (2), degenerate data (3).
enum class ErrorKind {
  // io
  MissingFile,
  IoFailure,
  // validation
  BadManifest,
  ShapeMismatch,
  NotADistribution,
  NegativeProbability,
  InvalidClassIndex,
  NonFiniteValue,
  DimensionMismatch,
  ClassSetMismatch,
  UnknownSegment,
  InvalidSpec,
  MissingStatistic,
  // degenerate data
  TooFewPixels,
  DegenerateStatistic,
  DegenerateVariance,
  EmptyPopulation,
  NoValidPixels,
};

const char* error_kind_name(ErrorKind kind);

// 1 = io, 2 = validation, 3 = degenerate data
int error_exit_code(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }
  int exit_code() const { return error_exit_code(kind_); }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace segconf
