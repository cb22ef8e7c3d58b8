#pragma once

#include <stdexcept>
#include <string>

namespace catforge {

/// Raised for malformed inputs: out-of-range parameters, shape mismatches,
/// wrong number of modes. The CLI maps it to exit code 2.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Base class for failures that come out of the numerics rather than the
/// inputs. The CLI maps every subclass to exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The truncated Fock space cannot hold the requested state to within the
/// tail tolerance.
class CutoffTooSmall : public NumericError {
 public:
  using NumericError::NumericError;
};

/// A conditional operation annihilated the state (e.g. a^2 |0>).
class ZeroState : public NumericError {
 public:
  using NumericError::NumericError;
};

/// The antisymmetric temporal mode is 0/0 at zero time separation.
class DegenerateMode : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace catforge
