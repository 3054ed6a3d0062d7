#include "mddcm/spline.hpp"

#include <cmath>
#include <string>

namespace mddcm {

NaturalCubicSpline::NaturalCubicSpline(Vector x, Vector y)
    : x_(std::move(x)), y_(std::move(y)) {
  const Index n = x_.size();
  if (n < 2) throw std::invalid_argument("NaturalCubicSpline: need at least 2 knots");
  if (y_.size() != n) throw std::invalid_argument("NaturalCubicSpline: length mismatch");
  for (Index i = 0; i < n; ++i) {
    if (!std::isfinite(x_(i)) || !std::isfinite(y_(i)))
      throw std::invalid_argument("NaturalCubicSpline: non-finite knot at index " +
                                  std::to_string(i));
    if (i > 0 && x_(i) <= x_(i - 1))
      throw std::invalid_argument("NaturalCubicSpline: knots must be strictly increasing");
  }

  second_ = Vector::Zero(n);
  if (n == 2) return;

  // Tridiagonal system for interior second derivatives, natural ends fixed
  // at zero:  h_{i-1} M_{i-1} + 2(h_{i-1}+h_i) M_i + h_i M_{i+1} = rhs_i.
  const Index m = n - 2;
  Vector diag(m), upper(m), rhs(m);
  for (Index i = 1; i <= m; ++i) {
    const double h0 = x_(i) - x_(i - 1);
    const double h1 = x_(i + 1) - x_(i);
    diag(i - 1) = 2.0 * (h0 + h1);
    upper(i - 1) = h1;
    rhs(i - 1) = 6.0 * ((y_(i + 1) - y_(i)) / h1 - (y_(i) - y_(i - 1)) / h0);
  }
  // Thomas sweep; the lower band at row i is h_i = upper of the previous row's
  // right knot, recomputed on the fly.
  for (Index i = 1; i < m; ++i) {
    const double lower = x_(i + 1) - x_(i);
    const double w = lower / diag(i - 1);
    diag(i) -= w * upper(i - 1);
    rhs(i) -= w * rhs(i - 1);
  }
  second_(m) = rhs(m - 1) / diag(m - 1);
  for (Index i = m - 1; i >= 1; --i)
    second_(i) = (rhs(i - 1) - upper(i - 1) * second_(i + 1)) / diag(i - 1);
}

double NaturalCubicSpline::operator()(double t) const {
  const Index n = x_.size();

  // Locate the segment; clamp to the boundary segments for extrapolation.
  Index i = 0;
  if (t >= x_(n - 2)) {
    i = n - 2;
  } else if (t > x_(0)) {
    Index lo = 0, hi = n - 1;
    while (hi - lo > 1) {
      const Index mid = (lo + hi) / 2;
      (x_(mid) <= t ? lo : hi) = mid;
    }
    i = lo;
  }

  const double h = x_(i + 1) - x_(i);
  const double slope = (y_(i + 1) - y_(i)) / h - h * (2.0 * second_(i) + second_(i + 1)) / 6.0;

  if (t < x_(0)) return y_(0) + slope * (t - x_(0));  // i == 0 here
  if (t > x_(n - 1)) {
    const double end_slope =
        (y_(n - 1) - y_(n - 2)) / h + h * (second_(n - 2) + 2.0 * second_(n - 1)) / 6.0;
    return y_(n - 1) + end_slope * (t - x_(n - 1));
  }

  const double dt = t - x_(i);
  return y_(i) + slope * dt + second_(i) / 2.0 * dt * dt +
         (second_(i + 1) - second_(i)) / (6.0 * h) * dt * dt * dt;
}

}  // namespace mddcm
