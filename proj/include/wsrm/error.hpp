#pragma once

#include <stdexcept>

namespace wsrm {

/// Thrown for malformed inputs (bad dimensions, invalid parameters).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A conic subproblem failed inside an iterative algorithm.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wsrm
