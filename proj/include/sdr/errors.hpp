#pragma once

#include <stdexcept>
#include <string>

namespace sdr {

// Base of all toolkit exceptions. Two families below: ValidationError for bad
// inputs (CLI exit code 1), NumericError for failures inside the numerics
// (CLI exit code 2).
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : Error {
  using Error::Error;
};

struct NumericError : Error {
  using Error::Error;
};

// linalg
struct NotPositiveDefinite : NumericError {
  using NumericError::NumericError;
};
struct NoConvergence : NumericError {
  using NumericError::NumericError;
};
struct StillSingular : NumericError {
  using NumericError::NumericError;
};
struct RankDeficient : NumericError {
  using NumericError::NumericError;
};

// data ingestion and grouping
struct ParseError : ValidationError {
  using ValidationError::ValidationError;
};
struct MissingValue : ValidationError {
  using ValidationError::ValidationError;
};
struct SingleClassResponse : ValidationError {
  using ValidationError::ValidationError;
};
struct TooFewObservations : ValidationError {
  using ValidationError::ValidationError;
};
struct DegenerateResponse : ValidationError {
  using ValidationError::ValidationError;
};
struct GroupTooSmall : ValidationError {
  using ValidationError::ValidationError;
};

// ordering and projection
struct NotBinary : ValidationError {
  using ValidationError::ValidationError;
};
struct DimensionTooLarge : ValidationError {
  using ValidationError::ValidationError;
};
struct ShapeMismatch : ValidationError {
  using ValidationError::ValidationError;
};

// classification
struct SingleClass : ValidationError {
  using ValidationError::ValidationError;
};
struct EmptyTestSet : ValidationError {
  using ValidationError::ValidationError;
};
struct InvalidSigma : ValidationError {
  using ValidationError::ValidationError;
};

// metrics
struct DimensionMismatch : ValidationError {
  using ValidationError::ValidationError;
};

// simulation and experiment configuration
struct InvalidTag : ValidationError {
  using ValidationError::ValidationError;
};
struct EmptyInput : ValidationError {
  using ValidationError::ValidationError;
};
struct ConfigError : ValidationError {
  using ValidationError::ValidationError;
};
struct IoError : ValidationError {
  using ValidationError::ValidationError;
};

}  // namespace sdr
