#pragma once

#include <stdexcept>
#include <string>

namespace ercomp {

// Argument outside the mathematical domain of an operation (e.g. j <= -n,
// a negative power of 1-p at p = 1, lambda <= -1).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A configured computation cap or memory budget would be exceeded.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerically ill-conditioned computation produced values outside their
// admissible range; raised instead of clamping.
class ConditioningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed user input (unparsable numbers, inconsistent parameters).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace ercomp
