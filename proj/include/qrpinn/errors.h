#pragma once

#include <stdexcept>
#include <string>

namespace qrpinn {

// Bad argument values: non-prime bases, degenerate boxes, shape mismatches.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Requested dimension exceeds the bundled direction-number data.
class UnsupportedDimension : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Index budget or enumeration size limit exceeded.
class CapacityExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operation called on an object in the wrong state (e.g. missing residual cache).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Operation not available for this input (e.g. integrand without an exact integral).
class Unsupported : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values during a numeric computation.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qrpinn
