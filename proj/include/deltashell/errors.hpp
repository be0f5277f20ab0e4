#pragma once

#include <stdexcept>
#include <string>

namespace dshell {

// Solver failed to converge (series, step refinement, root polish, ...).
// CLI maps this to exit code 3.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

// A numeric invariant that the construction guarantees was violated
// (non-real spectrum, boundary-condition residual, ...). Exit code 4.
class InvariantError : public std::runtime_error {
 public:
  explicit InvariantError(const std::string& msg) : std::runtime_error(msg) {}
};

// Cancellation exceeded the requested error budget.
class PrecisionLossError : public std::runtime_error {
 public:
  PrecisionLossError(const std::string& msg, double estimate)
      : std::runtime_error(msg), abs_error_estimate(estimate) {}
  double abs_error_estimate;
};

// Evaluation requested at (or inside the exclusion bracket of) a pole.
class PoleError : public std::runtime_error {
 public:
  PoleError(const std::string& msg, double lo, double hi)
      : std::runtime_error(msg), bracket_lo(lo), bracket_hi(hi) {}
  double bracket_lo;
  double bracket_hi;
};

// A radial function vanishes at the shell radius; caller should perturb r_s.
class NodeError : public std::runtime_error {
 public:
  explicit NodeError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace dshell
