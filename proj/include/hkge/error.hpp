#pragma once

#include <stdexcept>
#include <string>

namespace hkge {

/// Base of every error raised by the engine. The CLI maps subclasses to exit
/// codes: NumericError -> 3, everything else -> 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input line or file. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& where, std::size_t line, const std::string& what)
      : Error(where + ":" + std::to_string(line) + ": " + what), line_(line) {}
  explicit ParseError(const std::string& what) : Error(what) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_ = 0;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class ResolutionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class SamplingError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

/// Non-finite loss or parameter encountered during training.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace hkge
