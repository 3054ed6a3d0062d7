#pragma once

// Independent brute-force re-evaluations used as oracles by the test suites.
// Everything here follows the displayed formulas term by term and must stay
// free of the production code paths it checks.

#include <random>
#include <vector>

#include "mddcm/types.hpp"

namespace oracle {

using mddcm::Index;
using mddcm::Matrix;
using mddcm::Vector;

// Four-term centering formula evaluated cell by cell.
inline Matrix naive_u_center(const Matrix& m) {
  const Index n = m.rows();
  Matrix out = Matrix::Zero(n, n);
  double grand = 0.0;
  for (Index q = 0; q < n; ++q)
    for (Index r = 0; r < n; ++r) grand += m(q, r);
  for (Index i = 0; i < n; ++i) {
    for (Index l = 0; l < n; ++l) {
      if (i == l) continue;
      double row = 0.0, col = 0.0;
      for (Index q = 0; q < n; ++q) {
        row += m(i, q);
        col += m(q, l);
      }
      out(i, l) = m(i, l) - row / double(n - 2) - col / double(n - 2) +
                  grand / (double(n - 1) * double(n - 2));
    }
  }
  return out;
}

// 2/(n(n-1)c_n) Σ_{l<q} Σ_{j,j'} ā_lq,j ā_lq,j' b̄²_lq with explicit loops.
inline double naive_pointwise_variance(const std::vector<Matrix>& a_list, const Matrix& b,
                                       double cn) {
  const Index n = b.rows();
  double total = 0.0;
  for (Index l = 0; l < n; ++l)
    for (Index q = l + 1; q < n; ++q)
      for (const auto& aj : a_list)
        for (const auto& ajp : a_list) total += aj(l, q) * ajp(l, q) * b(l, q) * b(l, q);
  return 2.0 * total / (double(n) * double(n - 1) * cn);
}

inline Vector random_vector(std::mt19937& gen, Index n, double lo = -2.0, double hi = 2.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Vector out(n);
  for (Index i = 0; i < n; ++i) out(i) = dist(gen);
  return out;
}

inline Vector random_normal_vector(std::mt19937& gen, Index n) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Vector out(n);
  for (Index i = 0; i < n; ++i) out(i) = dist(gen);
  return out;
}

}  // namespace oracle
