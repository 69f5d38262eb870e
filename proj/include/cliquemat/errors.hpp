#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cliquemat {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed graph, clique-matrix or CSV input. `line()` is 1-based, 0 when
/// the problem is not tied to a specific line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Matrix not positive definite, singular factor, and similar.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class NotDecomposableError : public Error {
 public:
  using Error::Error;
};

class ExpansionTooLargeError : public Error {
 public:
  ExpansionTooLargeError(std::size_t limit)
      : Error("expanded clique matrix exceeds " + std::to_string(limit) +
              " columns"),
        limit_(limit) {}
  std::size_t limit() const noexcept { return limit_; }

 private:
  std::size_t limit_;
};

}  // namespace cliquemat
