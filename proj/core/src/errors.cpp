#include "segconf/errors.hpp"

namespace segconf {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingFile: return "MissingFile";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::BadManifest: return "BadManifest";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NotADistribution: return "NotADistribution";
    case ErrorKind::NegativeProbability: return "NegativeProbability";
    case ErrorKind::InvalidClassIndex: return "InvalidClassIndex";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::ClassSetMismatch: return "ClassSetMismatch";
    case ErrorKind::UnknownSegment: return "UnknownSegment";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::MissingStatistic: return "MissingStatistic";
    case ErrorKind::TooFewPixels: return "TooFewPixels";
    case ErrorKind::DegenerateStatistic: return "DegenerateStatistic";
    case ErrorKind::DegenerateVariance: return "DegenerateVariance";
    case ErrorKind::EmptyPopulation: return "EmptyPopulation";
    case ErrorKind::NoValidPixels: return "NoValidPixels";
  }
  return "UnknownError";
}

int error_exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingFile:
    case ErrorKind::IoFailure:
      return 1;
    case ErrorKind::TooFewPixels:
    case ErrorKind::DegenerateStatistic:
    case ErrorKind::DegenerateVariance:
    case ErrorKind::EmptyPopulation:
    case ErrorKind::NoValidPixels:
      return 3;
    default:
      return 2;
  }
}

}  // namespace segconf
