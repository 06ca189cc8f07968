#pragma once

#include <stdexcept>
#include <string>

namespace tricloud {

// Base of every error raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A frame or group of frames violates a data-model invariant.
struct ConsistencyError : Error {
  using Error::Error;
};

// A coordinate, code or point lies outside its admissible range.
struct RangeError : Error {
  using Error::Error;
};

struct EmptySetError : Error {
  using Error::Error;
};

struct ParameterError : Error {
  using Error::Error;
};

struct ShapeMismatchError : Error {
  using Error::Error;
};

// Duplicate-index map with a step outside {0, 1} or a nonzero start.
struct MalformedIndexMapError : Error {
  using Error::Error;
};

struct CorruptStreamError : Error {
  using Error::Error;
};

struct TruncatedStreamError : CorruptStreamError {
  using CorruptStreamError::CorruptStreamError;
};

struct TrailingBytesError : CorruptStreamError {
  using CorruptStreamError::CorruptStreamError;
};

// File or container does not start with the expected magic.
struct BadMagicError : Error {
  using Error::Error;
};

struct VersionError : CorruptStreamError {
  using CorruptStreamError::CorruptStreamError;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace tricloud
