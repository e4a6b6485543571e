#pragma once

#include <stdexcept>
#include <string>

namespace qou {

// Invalid model/algorithm parameter (domain violations, bad specs).
class parameter_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Mismatched or degenerate time grids.
class grid_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numeric routine failed to reach its tolerance.
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requested truncation horizon leaves too much tail mass.
class truncation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Second-moment machinery invoked on an infinite-variance driver.
class unsupported_moment_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Integrand not a member of the admissible space.
class integrability_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qou
