#pragma once

#include <stdexcept>
#include <string>

namespace tactx {

// Dimension or shape disagreement between operands.
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Input outside its documented parametric range (angles, coordinates, pitches).
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Normal-equation pivot collapsed; the system is rank deficient.
struct SingularSystemError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An operation received a field/surface of the wrong sensor kind.
struct SensorKindError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BadMagicError : FormatError {
  using FormatError::FormatError;
};

struct TruncatedFileError : FormatError {
  using FormatError::FormatError;
};

struct VersionError : FormatError {
  using FormatError::FormatError;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace tactx
