#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace subsel {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  /// Short machine-readable category, e.g. "invalid_input".
  virtual const char* kind() const noexcept = 0;
};

/// Caller supplied arguments that violate a precondition.
class InvalidInput : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "invalid_input"; }
};

/// Malformed or inconsistent configuration (missing columns, bad grid axes, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "config_error"; }
};

/// A cell in an input file could not be parsed.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row, std::size_t column)
      : Error(what), row_(row), column_(column) {}
  const char* kind() const noexcept override { return "parse_error"; }
  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

/// A dataset ended up with no usable rows.
class EmptyDataset : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "empty_dataset"; }
};

/// A column with zero variance was asked to be standardized.
class DegenerateColumn : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "degenerate_column"; }
};

/// Base for failures of the numerics rather than of the input format.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A matrix that must be inverted is singular or too badly conditioned.
class SingularMatrix : public NumericalError {
 public:
  SingularMatrix(const std::string& what, double smallest_eigenvalue)
      : NumericalError(what), smallest_eigenvalue_(smallest_eigenvalue) {}
  const char* kind() const noexcept override { return "singular_matrix"; }
  double smallest_eigenvalue() const noexcept { return smallest_eigenvalue_; }

 private:
  double smallest_eigenvalue_;
};

/// Logistic likelihood has no finite maximiser.
class SeparationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
  const char* kind() const noexcept override { return "separation"; }
};

/// Sequential selection ran out of unsampled data rows.
class ExhaustionError : public NumericalError {
 public:
  ExhaustionError(const std::string& what, std::size_t iteration)
      : NumericalError(what), iteration_(iteration) {}
  const char* kind() const noexcept override { return "exhaustion"; }
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

}  // namespace subsel
