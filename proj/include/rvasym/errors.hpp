#pragma once

#include <stdexcept>
#include <string>

namespace rvasym {

// Numerical failures. Bad inputs raise std::invalid_argument instead.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonConvergence : NumericalError {
  using NumericalError::NumericalError;
};

// sigma(0) <= 0, or a minimizer that violates the second-order condition.
struct DegenerateSpec : NumericalError {
  using NumericalError::NumericalError;
};

struct GridMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace rvasym
