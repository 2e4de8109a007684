#pragma once

#include <stdexcept>
#include <string>

namespace hollow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A radius lies past the last knot of a growth profile.
class ProfileExhausted : public Error {
 public:
  using Error::Error;
};

/// Invalid user configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Grid or sample budget exceeded (CLI exit code 3).
class BudgetError : public Error {
 public:
  using Error::Error;
};

}  // namespace hollow
