#pragma once

#include <cmath>
#include <string>

#include "mddcm/types.hpp"

namespace mddcm {

namespace detail {

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& x, const char* what) {
  for (Index j = 0; j < x.cols(); ++j) {
    for (Index i = 0; i < x.rows(); ++i) {
      if (!std::isfinite(static_cast<double>(x(i, j)))) {
        throw std::invalid_argument(std::string(what) + ": non-finite entry at (" +
                                    std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
}

}  // namespace detail

/// A_il = |x_i - x_l| for a scalar sample vector.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
pairwise_abs_distance(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Index n = x.size();
  if (n < 2) throw std::invalid_argument("pairwise_abs_distance: need n >= 2 samples");
  detail::require_finite(x, "pairwise_abs_distance");
  const auto v = x.derived().reshaped();
  Mat out(n, n);
  for (Index l = 0; l < n; ++l)
    for (Index i = 0; i < n; ++i) out(i, l) = std::abs(v(i) - v(l));
  return out;
}

/// B_il = (y_i - y_l)^2 / 2.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
half_squared_distance(const Eigen::MatrixBase<Derived>& y) {
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Index n = y.size();
  if (n < 2) throw std::invalid_argument("half_squared_distance: need n >= 2 samples");
  detail::require_finite(y, "half_squared_distance");
  const auto v = y.derived().reshaped();
  Mat out(n, n);
  for (Index l = 0; l < n; ++l)
    for (Index i = 0; i < n; ++i) {
      const Scalar d = v(i) - v(l);
      out(i, l) = d * d / Scalar(2);
    }
  return out;
}

/// U-centering transform:
///   M̄_il = M_il - Σ_q M_iq/(n-2) - Σ_q M_ql/(n-2) + Σ_qr M_qr/((n-1)(n-2))
/// for i ≠ l; the diagonal is 0 by convention. The q-sums run over all
/// q = 1..n including i and l (the input has a zero diagonal, so the extra
/// terms vanish). Off-diagonal row sums of the result are exactly zero up
/// to roundoff, which downstream estimators rely on.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
u_center(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Col = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Row = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;
  const Index n = m.rows();
  if (n != m.cols()) throw std::invalid_argument("u_center: matrix must be square");
  if (n < 4) throw std::invalid_argument("u_center: need n >= 4 samples");

  const Col row_sum = m.rowwise().sum();
  const Row col_sum = m.colwise().sum();
  const Scalar grand = row_sum.sum();
  const Scalar inv = Scalar(1) / Scalar(n - 2);
  const Scalar grand_term = grand / (Scalar(n - 1) * Scalar(n - 2));

  Mat out = m.derived();
  out.noalias() -= row_sum * (Row::Ones(n) * inv);
  out.noalias() -= (Col::Ones(n) * inv) * col_sum;
  out.array() += grand_term;
  out.diagonal().setZero();
  return out;
}

}  // namespace mddcm
