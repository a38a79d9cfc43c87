#pragma once

#include <stdexcept>
#include <string>

namespace shearhopf {

// Bad arguments or configuration. Maps to CLI exit code 1.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A solver failed to converge, lost a branch, or met an ill-conditioned system.
// Maps to CLI exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StiffnessError : public NumericalError {
 public:
  StiffnessError(const std::string& what, double last_y) : NumericalError(what), last_y(last_y) {}
  double last_y;
};

// Two independent evaluations of the same quantity disagree. Maps to exit code 3.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace shearhopf
