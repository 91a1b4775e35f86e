#pragma once

#include <stdexcept>
#include <string>

namespace kwg {

enum class ErrorKind {
  InvalidArgument,  // caller supplied an out-of-range or malformed value
  Parse,            // text could not be parsed (WKT, CSV, N-Triples, query, JSON)
  Data,             // well-formed input that violates a data contract
  NotFound,         // unknown target or missing file
  Unsupported,      // recognised but deliberately unsupported input
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Parse failure with a 1-based source position. Line 0 means "unknown".
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line = 0, int column = 0)
      : Error(ErrorKind::Parse, line > 0 ? message + " at line " + std::to_string(line) +
                                               ", column " + std::to_string(column)
                                         : message),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace kwg
