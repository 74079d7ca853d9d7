#pragma once

#include <stdexcept>
#include <string>

namespace maser {

// Thrown when an operation's analytic preconditions (homogeneous drive,
// resonance, regime restrictions, ...) do not hold.
class NotApplicableError : public std::domain_error {
 public:
  explicit NotApplicableError(const std::string& what) : std::domain_error(what) {}
};

// Thrown when the Liouvillian nullspace is not one-dimensional.
class NonUniqueSteadyStateError : public std::runtime_error {
 public:
  explicit NonUniqueSteadyStateError(const std::string& what) : std::runtime_error(what) {}
};

// Generic numerical failure (solver breakdown, certification failure).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace maser
