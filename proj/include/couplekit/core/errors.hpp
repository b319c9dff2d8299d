#pragma once

#include <stdexcept>
#include <string>

namespace couplekit {

// Base class for all recoverable errors raised by the toolkit. Errors that
// stem from bad user input derive from ValidationError so front ends can map
// them to a distinct exit code.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

// Invalid argument or configuration supplied by the caller.
class ArgumentError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Value outside its mathematical domain (e.g. a point outside the unit box).
class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Point violates declared variable bounds.
class BoundsError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Output channel with (near-)zero variance cannot be standardized.
class DegenerateChannelError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Matrix factorization failed even after jitter escalation.
class ConditioningError : public Error {
 public:
  using Error::Error;
};

// File access or format problems.
class IoError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace couplekit
