#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rflogit {

// Base of every error raised by the library. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Response has a single class (after weighting, where relevant).
class SingleClassError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class OutOfDomainError : public DimensionError {
 public:
  using DimensionError::DimensionError;
};

class SingularDesignError : public DimensionError {
 public:
  using DimensionError::DimensionError;
};

class SeparationError : public Error {
 public:
  using Error::Error;
};

class DegenerateScoresError : public Error {
 public:
  using Error::Error;
};

// Iterative solver gave up; carries its last iterate when one is meaningful.
class ConvergenceError : public Error {
 public:
  explicit ConvergenceError(const std::string& what, Eigen::VectorXd last = {})
      : Error(what), last_iterate_(std::move(last)) {}
  const Eigen::VectorXd& last_iterate() const noexcept { return last_iterate_; }

 private:
  Eigen::VectorXd last_iterate_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row, std::size_t column)
      : Error(what + " (row " + std::to_string(row) + ", column " + std::to_string(column) + ")"),
        row_(row),
        column_(column) {}
  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

}  // namespace rflogit
