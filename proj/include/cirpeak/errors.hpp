#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cirpeak {

/// Input violates a documented precondition or type invariant.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input is well formed but carries no information to work with
/// (constant series, zero variance).
class DegenerateInputError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Not enough samples for the requested window or padding.
class InsufficientDataError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Malformed file content. `line()` is 1-based; 0 means "whole file".
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Non-finite values or unstable designs during numerical work.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cirpeak
