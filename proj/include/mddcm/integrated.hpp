#pragma once

#include <vector>

#include "mddcm/dataset.hpp"
#include "mddcm/grid.hpp"
#include "mddcm/types.hpp"

namespace mddcm {

/// Grid-integrated statistics for a covariate subset.
struct IntegratedStat {
  double td_value = 0.0;         // √C(n,2) Σ_j ∫MDD_n² dt / √(integrated variance)
  double e_value = 0.0;          // ∫ (pointwise numerator / pointwise scale) dt
  Vector integrated_mdd;         // ∫ MDD_n² dt per tested covariate
  double integrated_variance = 0.0;
};

/// ∫ MDD_n²(Y(t)|X_j(t)) dt by the trapezoid rule over the observed grid.
double integrated_mdd(const ConcurrentDataset& ds, int covariate);

/// Integrated variance estimate: trapezoid integral of the per-instant
/// quantity Σ_{l<q} (Σ_{j∈D} ā_lq,j)² b̄²_lq, scaled by 2/(n(n-1)c_n).
double integrated_variance(const ConcurrentDataset& ds, const std::vector<int>& subset);

/// Integral of the pointwise ratio sequence numerator_u / scale_u. Throws
/// degenerate_data_error naming the instant when some scale is zero.
double statistic_e(const Eigen::Ref<const Vector>& numerators,
                   const Eigen::Ref<const Vector>& scales, const TimeGrid& grid);

/// One pass over the grid computing both integrated statistics and their
/// components. Subset indices are 0-based covariate positions.
IntegratedStat integrated_stats(const ConcurrentDataset& ds, const std::vector<int>& subset);

/// Ratio-of-integrals statistic T_D alone.
IntegratedStat statistic_td(const ConcurrentDataset& ds, const std::vector<int>& subset);

namespace detail {
void check_subset(const ConcurrentDataset& ds, const std::vector<int>& subset);
void check_complete(const ConcurrentDataset& ds);
}  // namespace detail

}  // namespace mddcm
