#pragma once

#include <stdexcept>
#include <string>

namespace volcrit {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point, radius or parameter outside the admissible domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Non-finite or otherwise unusable numeric data.
class NumericError : public Error {
 public:
  using Error::Error;
};

class SingularMetricError : public Error {
 public:
  using Error::Error;
};

class UnsupportedRadiusError : public DomainError {
 public:
  using DomainError::DomainError;
};

class InvalidCriticalPointError : public Error {
 public:
  using Error::Error;
};

class DegenerateSystemError : public Error {
 public:
  using Error::Error;
};

class SupportError : public Error {
 public:
  using Error::Error;
};

class NonConvergenceError : public Error {
 public:
  using Error::Error;
};

class EigenvalueCollisionError : public Error {
 public:
  using Error::Error;
};

}  // namespace volcrit
