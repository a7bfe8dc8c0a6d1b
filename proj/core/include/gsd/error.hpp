#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gsd {

enum class ErrorCode {
  invalid_argument,
  insufficient_data,
  degenerate_data,
  insufficient_class_data,
  untrainable_dataset,
  insufficient_batch,
  schema_mismatch,
  parse_error,
  unsupported_version,
  missing_label_column,
  non_binary_label,
  io_error,
};

const char* to_string(ErrorCode code) noexcept;

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse failure with a location. For CSV input `line`/`column` are 1-based
/// row and field numbers; for JSON documents `line` is 0 and `column` holds
/// the byte offset.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, const std::string& what, std::size_t line,
             std::size_t column)
      : Error(code, what), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace gsd
