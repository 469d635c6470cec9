#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace saoovqe {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
  public:
    ParseError(const std::string &what, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

/// Inconsistent sizes between objects (orbital counts, qubit counts, ...).
class DimensionError : public Error {
  public:
    using Error::Error;
};

/// Invalid configuration or argument outside its documented domain.
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// Numerical failure: NaN objective, non-hermitian operator, and the like.
class NumericalError : public Error {
  public:
    using Error::Error;
};

} // namespace saoovqe
