#ifndef AFFINEST_ERRORS_HPP
#define AFFINEST_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace affinest {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A matrix handed to the SPD factorization was not positive definite
/// (within the degeneracy threshold).
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

/// A scatter matrix required by an estimator step is singular or nearly so,
/// e.g. n <= p or affinely degenerate data.
class DegenerateScatter : public Error {
 public:
  explicit DegenerateScatter(const std::string& what, int step = -1)
      : Error(what), step_(step) {}
  /// Iteration step at which the degeneracy occurred, -1 if not applicable.
  int step() const noexcept { return step_; }

 private:
  int step_;
};

class InvalidScheme : public Error {
 public:
  using Error::Error;
};

class InvalidK : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

/// A simulation configuration failed validation or deserialization.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// More than the tolerated fraction of simulation replications degenerated.
class TooManyFailures : public Error {
 public:
  TooManyFailures(const std::string& what, std::size_t failed, std::size_t total)
      : Error(what), failed_(failed), total_(total) {}
  std::size_t failed() const noexcept { return failed_; }
  std::size_t total() const noexcept { return total_; }

 private:
  std::size_t failed_;
  std::size_t total_;
};

/// Malformed text input (CSV data file); carries the 1-based position.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row, std::size_t col)
      : Error(what), row_(row), col_(col) {}
  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

}  // namespace affinest

#endif  // AFFINEST_ERRORS_HPP
