#pragma once

#include <stdexcept>
#include <string>

namespace trackadv {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ShapeMismatchError : Error {
  using Error::Error;
};

struct EmptyRegionError : Error {
  using Error::Error;
};

struct RegionTooSmallError : Error {
  using Error::Error;
};

struct LengthMismatchError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

struct BadMagicError : IoError {
  using IoError::IoError;
};

struct BadDimensionsError : IoError {
  using IoError::IoError;
};

}  // namespace trackadv
