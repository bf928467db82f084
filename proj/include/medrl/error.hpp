#pragma once

#include <stdexcept>
#include <string>

namespace medrl {

/// Base for runtime failures raised by the library. Precondition violations
/// on function arguments use std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration file could not be read or failed schema validation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A pipeline stage was started before the artifacts it consumes exist.
class MissingArtifact : public Error {
 public:
  using Error::Error;
};

}  // namespace medrl
