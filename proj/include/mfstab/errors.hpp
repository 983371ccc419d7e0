#pragma once

#include <stdexcept>
#include <string>

namespace mfstab {

/// Input violates an operation's precondition (bad index, self loop,
/// non-finite coupling, ...). Maps to CLI exit code 1.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Requested computation exceeds what the exact routine can enumerate.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure inside an algorithm (non-finite gradient, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mfstab
