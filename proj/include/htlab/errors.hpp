#pragma once

#include <stdexcept>
#include <string>

namespace htlab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of an operation (e.g. mu = 0, index over budget).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed structure: dimension mismatch, invalid group data.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Two grid functions that should share a grid do not.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// Requested grid or table exceeds the configured size budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// Unreadable or malformed file or buffer.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure did not reach its tolerance.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double estimate);
  double estimate() const noexcept { return estimate_; }

 private:
  double estimate_;
};

}  // namespace htlab
