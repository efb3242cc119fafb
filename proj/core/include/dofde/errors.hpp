#pragma once

#include <stdexcept>
#include <string>

namespace dofde {

// Tolerance could not be met (quadrature depth cap, approximation stagnation).
// Carries the best achieved estimate in the message.
class AccuracyError : public std::runtime_error {
public:
  explicit AccuracyError(const std::string& what) : std::runtime_error(what) {}
};

// Iteration did not converge (Jacobi sweeps, Newton).
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// A structural requirement on computed data failed (non-real pole, negative
// weight, ill-separated poles).
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dofde
