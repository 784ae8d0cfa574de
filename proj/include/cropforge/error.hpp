#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cropforge {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input text could not be parsed. Carries the 1-based line (or row) and the
/// offending token when they are known; both are zero/empty otherwise.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line = 0, std::string token = {})
      : Error(message), line_(line), token_(std::move(token)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& token() const noexcept { return token_; }

 private:
  std::size_t line_;
  std::string token_;
};

/// A value violates a documented precondition or invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A computation produced NaN or infinity where finite values are required.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace cropforge
