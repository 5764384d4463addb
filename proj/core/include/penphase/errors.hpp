#pragma once

#include <stdexcept>
#include <string>

namespace penphase {

/// Invalid parameters or preconditions (negative fields, k <= 0, misordered brackets...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The numerics could not deliver a trustworthy answer.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two modes (or a mode and zero) are closer than the gap tolerance.
class DegeneracyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A bisection segment crosses the stability boundary more than once.
class MultiCrossingError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// e^{Λt} overflowed; carries the dominant growth exponent max Re λ.
class SaturationError : public NumericalError {
 public:
  SaturationError(const std::string& what, double growth_exponent)
      : NumericalError(what), growth_exponent_(growth_exponent) {}

  double growth_exponent() const noexcept { return growth_exponent_; }

 private:
  double growth_exponent_;
};

/// The point is not confined, so there are no cyclic states to attach phases to.
class NoCyclicStatesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace penphase
