#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dlsgd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numeric argument is outside the documented domain.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// Structured input (graph, matrix, data) violates an invariant.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Randomized construction gave up after its attempt budget.
class GenerationFailure : public Error {
 public:
  using Error::Error;
};

/// Experiment configuration is inconsistent or malformed.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Text input could not be parsed. line() is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// An iterate overflowed or became non-finite. step() is the loop index t
/// whose update produced it.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::size_t step) : Error(what), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace dlsgd
