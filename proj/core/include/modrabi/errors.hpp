#pragma once

#include <stdexcept>
#include <string>

namespace modrabi {

/// Input that violates a documented precondition (bad parameters, mismatched
/// spaces, malformed scenario fields).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation that ran but produced an unusable result: step-size
/// underflow, positivity loss, inadequate Fock cutoff.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An inverse-design target that no drive in the search domain realizes.
class UnreachableTarget : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace modrabi
