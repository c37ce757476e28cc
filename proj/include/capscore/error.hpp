#pragma once

#include <stdexcept>
#include <string>

namespace capscore {

/// Base for every error raised by the library. Each subclass maps onto one
/// CLI exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 1; }
};

/// Bad arguments, unknown names, violated preconditions.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Malformed input document; message carries the position.
class ParseError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

/// Well-formed input whose records are inconsistent with each other.
class IntegrityError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

class IoError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

}  // namespace capscore
