#pragma once

#include <stdexcept>
#include <string>

namespace thetasav {

/// Invalid argument or precondition violation in a library call.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Two operands live on different grids.
class GridMismatch : public std::invalid_argument {
 public:
  GridMismatch() : std::invalid_argument("fields are defined on different grids") {}
};

/// A denominator that theory guarantees positive was not; indicates a bug or corrupted state.
class SolvabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The discrete compatibility condition of a singular elliptic problem is violated.
class CompatibilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// NaN or Inf appeared in the solution.
class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SnapshotError : public IoError {
 public:
  using IoError::IoError;
};

}  // namespace thetasav
