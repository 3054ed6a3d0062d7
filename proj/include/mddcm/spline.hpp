#pragma once

#include "mddcm/types.hpp"

namespace mddcm {

/// Natural cubic spline interpolant: zero second derivative at both ends,
/// continuous first and second derivatives at the knots. Two knots degrade to
/// the straight line through them. Evaluation outside [x_front, x_back]
/// extends the boundary segment's slope linearly (callers decide whether that
/// is allowed).
class NaturalCubicSpline {
 public:
  NaturalCubicSpline(Vector x, Vector y);

  double operator()(double t) const;

  double x_front() const { return x_(0); }
  double x_back() const { return x_(x_.size() - 1); }

 private:
  Vector x_;
  Vector y_;
  Vector second_;  // second derivatives at the knots
};

}  // namespace mddcm
