#pragma once

#include <stdexcept>
#include <string>

namespace slepian {

/// Caller supplied parameters that violate a documented precondition.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// A numerical procedure failed to meet its own contract (non-convergence,
/// eigenvalues outside the admissible range, ...).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace slepian
