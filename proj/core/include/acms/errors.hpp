#pragma once

#include <stdexcept>
#include <string>

namespace acms {

/// A caller-supplied value violates a documented precondition.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Degenerate or inconsistent mesh geometry.
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The operation is not defined for the requested entity (e.g. a boundary edge).
class NotApplicable : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A factorization or solve failed. `value()` carries the residual or
/// offending eigenvalue that triggered the failure.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double value)
      : std::runtime_error(what), value_(value) {}
  explicit NumericalError(const std::string& what) : NumericalError(what, 0.0) {}

  double value() const noexcept { return value_; }

 private:
  double value_;
};

}  // namespace acms
