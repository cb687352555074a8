#pragma once

#include <stdexcept>
#include <string>

namespace l1trend {

// Three families, mapped one-to-one onto CLI exit codes (1, 2, 3).

/// A parameter violates an operation's precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The input data cannot support the request: too short, mismatched
/// lengths, malformed files.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LengthError : public DataError {
 public:
  using DataError::DataError;
};

class DimensionError : public DataError {
 public:
  using DataError::DataError;
};

class InsufficientHistory : public DataError {
 public:
  using DataError::DataError;
};

/// Arithmetic broke down (non-positive pivot, solver did not converge).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotPositiveDefinite : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace l1trend
