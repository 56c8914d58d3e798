#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace udkit {

// Malformed or inconsistent input data. The CLI maps this to exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// A DataError that points at a line of an input file (1-based).
class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& msg)
      : DataError("line " + std::to_string(line) + ": " + msg), line_(line), msg_(msg) {}

  std::size_t line() const { return line_; }
  const std::string& message() const { return msg_; }

 private:
  std::size_t line_;
  std::string msg_;
};

}  // namespace udkit
