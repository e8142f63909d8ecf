#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "acms/errors.hpp"
#include "acms/types.hpp"

namespace acms::detail {

/// max_i |b - A x|_i / (|A| |x| + |b|)_i, the componentwise backward error.
template <class Mat>
double backward_error(const Mat& a, const Vector& x, const Vector& b, const Vector& r) {
  const Vector scale = a.cwiseAbs() * x.cwiseAbs() + b.cwiseAbs();
  double w = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    if (scale[i] > 0.0) w = std::max(w, std::abs(r[i]) / scale[i]);
    else if (r[i] != 0.0) return std::numeric_limits<double>::infinity();
  }
  return w;
}

/// Direct solve with up to three steps of iterative refinement. Accepts when
/// ||b - Ax|| <= tol ||b||, or, where rounding in A x alone exceeds that
/// (high contrast), when the componentwise backward error is <= tol.
template <class Factor, class Mat>
Vector refined_solve(const Factor& factor, const Mat& a, const Vector& b, double tol,
                     const std::string& what) {
  Vector x = factor.solve(b);
  const double bn = b.norm();
  if (bn == 0.0) return x;
  Vector r = b - a * x;
  double res = r.norm() / bn;
  for (int k = 0; k < 3 && res > tol; ++k) {
    x += factor.solve(r);
    r = b - a * x;
    res = r.norm() / bn;
  }
  if (res <= tol) return x;
  if (backward_error(a, x, b, r) <= tol) return x;
  throw NumericalError(what + ": relative residual " + std::to_string(res) + " exceeds tolerance",
                       res);
}

}  // namespace acms::detail
