#pragma once

#include <stdexcept>
#include <string>

namespace randfeat {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Inconsistent configuration: dimension mismatch, too few quadrature nodes, ...
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input file. Carries the offending (1-based) row and column.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, long row, long col)
      : std::runtime_error(what), row_(row), col_(col) {}
  long row() const noexcept { return row_; }
  long col() const noexcept { return col_; }

 private:
  long row_;
  long col_;
};

/// Numeric breakdown: non-finite values, divergence, rank deficiency.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A system that must have full row rank does not.
class RankDeficientError : public NumericError {
 public:
  RankDeficientError(const std::string& what, double lambda_min, double tolerance)
      : NumericError(what), lambda_min_(lambda_min), tolerance_(tolerance) {}
  double lambda_min() const noexcept { return lambda_min_; }
  double tolerance() const noexcept { return tolerance_; }

 private:
  double lambda_min_;
  double tolerance_;
};

}  // namespace randfeat
