#pragma once

#include <stdexcept>
#include <string>

namespace nematowave {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation was violated by the caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A NaN or Inf appeared in a field that must stay finite.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// Malformed snapshot or CSV input.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Configuration document problems. `line()` is 0 when the error is not tied
/// to a line (e.g. a missing key); `field()` names the offending key when known.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0, std::string field = {})
      : Error(what), line_(line), field_(std::move(field)) {}

  int line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  int line_;
  std::string field_;
};

}  // namespace nematowave
