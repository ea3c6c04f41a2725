#pragma once

#include <stdexcept>
#include <string>

namespace mrepath {

/// Base class for all library errors. The CLI maps each subclass to an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not conform.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration value (exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input data (exit code 3).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values or an undefined numerical result (exit code 4).
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace mrepath
