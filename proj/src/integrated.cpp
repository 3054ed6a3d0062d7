#include "mddcm/integrated.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mddcm/centering.hpp"
#include "mddcm/pointwise.hpp"

namespace mddcm {

namespace detail {

void check_subset(const ConcurrentDataset& ds, const std::vector<int>& subset) {
  if (subset.empty()) throw std::invalid_argument("covariate subset is empty");
  for (std::size_t k = 0; k < subset.size(); ++k) {
    if (subset[k] < 0 || subset[k] >= ds.p())
      throw std::invalid_argument("covariate index " + std::to_string(subset[k]) +
                                  " out of range (p = " + std::to_string(ds.p()) + ")");
    for (std::size_t k2 = k + 1; k2 < subset.size(); ++k2)
      if (subset[k] == subset[k2])
        throw std::invalid_argument("duplicate covariate index " + std::to_string(subset[k]));
  }
}

void check_complete(const ConcurrentDataset& ds) {
  ds.validate();
  if (ds.has_missing())
    throw std::invalid_argument(
        "dataset has missing values: interpolate first (spline fill) before testing");
  if (ds.n() < 4) throw std::invalid_argument("need n >= 4 curves");
}

}  // namespace detail

double integrated_mdd(const ConcurrentDataset& ds, int covariate) {
  detail::check_complete(ds);
  detail::check_subset(ds, {covariate});
  const Index T = ds.num_instants();
  Vector per_instant(T);
  for (Index u = 0; u < T; ++u) {
    const CenteredMatrix a = u_center(pairwise_abs_distance(ds.covariates[covariate].col(u)));
    const CenteredMatrix b = u_center(half_squared_distance(ds.response.col(u)));
    per_instant(u) = mdd_unbiased(a, b).value;
  }
  return integrate_on_grid(per_instant, ds.grid);
}

double integrated_variance(const ConcurrentDataset& ds, const std::vector<int>& subset) {
  detail::check_complete(ds);
  detail::check_subset(ds, subset);
  const Index n = ds.n();
  const Index T = ds.num_instants();
  Vector per_instant(T);
  for (Index u = 0; u < T; ++u) {
    const detail::InstantTerms terms =
        detail::instant_terms(ds.covariate_columns_at(u, subset), ds.response.col(u));
    per_instant(u) = terms.pair_sum_sq.sum() / 2.0;  // Σ_{l<q} of the symmetric matrix
  }
  const double integral = integrate_on_grid(per_instant, ds.grid);
  return 2.0 * integral / (static_cast<double>(n) * static_cast<double>(n - 1) * cn_factor(n));
}

double statistic_e(const Eigen::Ref<const Vector>& numerators,
                   const Eigen::Ref<const Vector>& scales, const TimeGrid& grid) {
  if (numerators.size() != scales.size() || numerators.size() != grid.size())
    throw std::invalid_argument("statistic_e: length mismatch");
  Vector ratio(numerators.size());
  for (Index u = 0; u < numerators.size(); ++u) {
    if (scales(u) <= 0.0)
      throw degenerate_data_error("statistic_e: zero scale at instant index " + std::to_string(u));
    ratio(u) = numerators(u) / scales(u);
  }
  return integrate_on_grid(ratio, grid);
}

IntegratedStat integrated_stats(const ConcurrentDataset& ds, const std::vector<int>& subset) {
  detail::check_complete(ds);
  detail::check_subset(ds, subset);
  const Index n = ds.n();
  const Index T = ds.num_instants();
  const Index d = static_cast<Index>(subset.size());

  Matrix mdd_per_instant(T, d);
  Vector numerators(T), scales(T), variance_terms(T);
  for (Index u = 0; u < T; ++u) {
    const detail::InstantTerms terms =
        detail::instant_terms(ds.covariate_columns_at(u, subset), ds.response.col(u));
    mdd_per_instant.row(u) = terms.mdd.transpose();
    numerators(u) = terms.numerator;
    scales(u) = std::sqrt(terms.variance);
    variance_terms(u) = terms.pair_sum_sq.sum() / 2.0;
  }

  IntegratedStat out;
  out.integrated_mdd.resize(d);
  for (Index k = 0; k < d; ++k)
    out.integrated_mdd(k) = integrate_on_grid(mdd_per_instant.col(k), ds.grid);
  out.integrated_variance = 2.0 * integrate_on_grid(variance_terms, ds.grid) /
                            (static_cast<double>(n) * static_cast<double>(n - 1) * cn_factor(n));
  if (out.integrated_variance <= 0.0)
    throw degenerate_data_error("integrated_stats: zero integrated variance (degenerate data)");
  out.td_value = std::sqrt(detail::choose2(n)) * out.integrated_mdd.sum() /
                 std::sqrt(out.integrated_variance);
  out.e_value = statistic_e(numerators, scales, ds.grid);
  return out;
}

IntegratedStat statistic_td(const ConcurrentDataset& ds, const std::vector<int>& subset) {
  return integrated_stats(ds, subset);
}

}  // namespace mddcm
