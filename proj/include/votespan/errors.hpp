#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace votespan {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument values (out-of-range index, bad probability, bad config).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Ragged, mismatched, or non-finite matrix/vector input.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Raw score vector that cannot be normalized (all zero, negative, non-finite).
class NormalizationError : public Error {
 public:
  using Error::Error;
};

/// Request exceeds a hard enumeration guard.
class CapacityError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed file content; carries the 1-based line and column of the offending cell.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t row, std::size_t column)
      : Error(message), row_(row), column_(column) {}

  std::size_t row() const { return row_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

}  // namespace votespan
