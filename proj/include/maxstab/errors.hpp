#pragma once

#include <stdexcept>

namespace maxstab {

/// Input does not satisfy a structural precondition (malformed partition,
/// non-finite data, inconsistent dataset).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Result or workload exceeds what the implementation can represent.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// The second-order likelihood needs n > d(d-1)/2.
class ConstraintError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class FitFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace maxstab
