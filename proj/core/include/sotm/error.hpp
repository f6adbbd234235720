#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sotm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A malformed value in tabular input. Row numbers are 1-based file lines
/// (the header is line 1).
class ParseError : public Error {
 public:
  ParseError(std::size_t row, std::string column, const std::string& what)
      : Error("row " + std::to_string(row) + ", column '" + column + "': " + what),
        row_(row),
        column_(std::move(column)) {}

  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

/// Structural problems: missing columns, ragged rows, inconsistent shapes.
class SchemaError : public Error {
 public:
  using Error::Error;
};

class EmptyInputError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

/// A caller broke an operation's precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

class WriteError : public Error {
 public:
  using Error::Error;
};

/// An internal consistency check failed. Indicates a bug rather than bad input.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace sotm
