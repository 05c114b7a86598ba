#pragma once

#include <stdexcept>
#include <string>

namespace azb {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid construction parameters (odd N, too small M, bad dimensions).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A precondition on the input operators failed. Carries the measured value
/// that violated the tolerance so callers can report it.
class DomainError : public Error {
 public:
  DomainError(const std::string& what, double measured, double tolerance)
      : Error(what + " (measured " + std::to_string(measured) + ", tolerance " +
              std::to_string(tolerance) + ")"),
        measured_(measured),
        tolerance_(tolerance) {}

  double measured() const { return measured_; }
  double tolerance() const { return tolerance_; }

 private:
  double measured_;
  double tolerance_;
};

/// A dense multi-leg object would exceed the configured memory budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// File format or version mismatch.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace azb
