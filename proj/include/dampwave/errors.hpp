#pragma once

#include <stdexcept>

namespace dampwave {

// Raised when a computation runs but its result cannot be trusted
// (energy growth, lost positivity, non-finite values).
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dampwave
