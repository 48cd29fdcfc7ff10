#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace clickseg {

/// Precondition violated by the caller (bad dimensions, empty region, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File was readable but its content is not acceptable.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Line-oriented text file failed to parse. `line()` is 1-based.
class ParseError : public FormatError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : FormatError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace clickseg
