#pragma once

#include <vector>

#include "mddcm/types.hpp"

namespace mddcm {

/// Unbiased MDD^2 estimate. May be negative in finite samples even though the
/// population quantity is nonnegative.
struct MddValue {
  double value = 0.0;
  Index n = 0;
};

/// Finite-sample constant c_n used by the variance estimator.
double cn_factor(Index n);

/// MDD_n^2 = Σ_{i≠l} ā_il b̄_il / (n(n-3)) from U-centered pairwise matrices.
MddValue mdd_unbiased(const CenteredMatrix& a, const CenteredMatrix& b);

/// Direct order-four U-statistic evaluation of MDD_n^2, averaging the
/// symmetric kernel over all C(n,4) quadruples. O(n^4); reference
/// implementation for validating the pairwise path, never used in production
/// code.
MddValue mdd_oracle(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y);

/// Process-wide call count of mdd_oracle; lets test suites assert that the
/// O(n^4) path stays out of production code paths.
std::uint64_t mdd_oracle_invocations();

/// Variance estimate Ŝ_u² = 2/(n(n-1)c_n) Σ_{l<q} (Σ_j ā_lq,j)² b̄²_lq for the
/// covariates in a_list. Nonnegative by the perfect-square structure.
double pointwise_variance(const std::vector<CenteredMatrix>& a_list, const CenteredMatrix& b);

/// Single-instant test statistic T = √C(n,2) Σ_j MDD_n² / Ŝ.
struct PointwiseStat {
  double numerator = 0.0;     // √C(n,2) Σ_j MDD_n²
  double variance_est = 0.0;  // Ŝ²
  double statistic = 0.0;     // numerator / √variance_est
};

/// x_at_t holds one column per tested covariate (n×d), y_at_t the response
/// values at the same instant. Throws degenerate_data_error when Ŝ² == 0
/// (constant response or constant covariates at this instant).
PointwiseStat pointwise_statistic(const Eigen::Ref<const Matrix>& x_at_t,
                                  const Eigen::Ref<const Vector>& y_at_t);

namespace detail {

// Shared per-instant kernel. pair_sum(l,q) = (Σ_j ā_lq,j)·b̄_lq carries the
// numerator structure; its elementwise square carries the variance structure:
//   Σ_j MDD_n²       = pair_sum.sum() / (n(n-3))
//   Ŝ²               = pair_sum.squared().sum() / (n(n-1)c_n)
//   bootstrap num    = eᵀ·pair_sum·e / (n(n-1))
//   bootstrap Ŝ*²    = (e∘e)ᵀ·pair_sum²·(e∘e) / (n(n-1))
struct InstantTerms {
  Vector mdd;            // per tested covariate
  double numerator = 0;  // √C(n,2) Σ_j MDD_n²
  double variance = 0;   // Ŝ²
  Matrix pair_sum;       // symmetric, zero diagonal
  Matrix pair_sum_sq;    // pair_sum squared elementwise
};

InstantTerms instant_terms(const Eigen::Ref<const Matrix>& x_at_t,
                           const Eigen::Ref<const Vector>& y_at_t);

inline double choose2(Index n) { return 0.5 * static_cast<double>(n) * static_cast<double>(n - 1); }

}  // namespace detail

}  // namespace mddcm
