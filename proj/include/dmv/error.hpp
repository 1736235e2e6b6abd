#pragma once

#include <stdexcept>
#include <string>

namespace dmv {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A field or state picked up a NaN or an infinity.
class NonFiniteValue : public Error {
 public:
  using Error::Error;
};

/// Malformed run configuration; the message names the offending key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Snapshot or export file could not be read back.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace dmv
