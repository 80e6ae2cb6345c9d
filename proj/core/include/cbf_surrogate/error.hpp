#pragma once

#include <stdexcept>
#include <string>

namespace cbf_surrogate {

// Bad input: malformed files, violated preconditions, inconsistent cohorts.
// The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The SMO solver ran out of iterations before meeting the KKT tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double max_violation)
      : std::runtime_error(what), max_violation_(max_violation) {}

  double max_violation() const noexcept { return max_violation_; }

 private:
  double max_violation_;
};

}  // namespace cbf_surrogate
