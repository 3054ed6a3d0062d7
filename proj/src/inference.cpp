#include "mddcm/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mddcm/integrated.hpp"
#include "mddcm/rng.hpp"

namespace mddcm {

SubsetD SubsetD::all(int p) {
  if (p < 1) throw std::invalid_argument("SubsetD: no covariates");
  SubsetD d;
  d.indices.resize(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) d.indices[static_cast<std::size_t>(j)] = j;
  return d;
}

SubsetD SubsetD::of(std::vector<int> indices, int p) {
  if (indices.empty()) throw std::invalid_argument("SubsetD: empty subset");
  std::sort(indices.begin(), indices.end());
  if (std::adjacent_find(indices.begin(), indices.end()) != indices.end())
    throw std::invalid_argument("SubsetD: duplicate covariate index");
  if (indices.front() < 0 || indices.back() >= p)
    throw std::invalid_argument("SubsetD: covariate index out of range");
  return SubsetD{std::move(indices)};
}

SubsetD SubsetD::from_names(const std::vector<std::string>& names,
                            const std::vector<std::string>& covariate_names) {
  const int p = static_cast<int>(covariate_names.size());
  if (names.empty() || (names.size() == 1 && names[0] == "all")) return all(p);
  std::vector<int> idx;
  for (const auto& name : names) {
    const auto it = std::find(covariate_names.begin(), covariate_names.end(), name);
    if (it == covariate_names.end())
      throw std::invalid_argument("unknown covariate '" + name + "'");
    idx.push_back(static_cast<int>(it - covariate_names.begin()));
  }
  return of(std::move(idx), p);
}

const char* to_string(Correction c) { return c == Correction::bonferroni ? "bonferroni" : "none"; }

Correction correction_from_string(const std::string& s) {
  if (s == "bonferroni") return Correction::bonferroni;
  if (s == "none") return Correction::none;
  throw std::invalid_argument("unknown correction: " + s);
}

double asymptotic_pvalue(double statistic_td) {
  if (!std::isfinite(statistic_td))
    throw std::invalid_argument("asymptotic_pvalue: non-finite statistic");
  return 0.5 * std::erfc(statistic_td / std::sqrt(2.0));
}

namespace {

std::vector<std::string> subset_names(const ConcurrentDataset& ds, const std::vector<int>& idx) {
  std::vector<std::string> names;
  names.reserve(idx.size());
  for (int j : idx) names.push_back(ds.covariate_names[static_cast<std::size_t>(j)]);
  return names;
}

constexpr const char* kAsymptoticNote =
    "diagnostic only: the normal approximation converges slowly, use the bootstrap p-value";

}  // namespace

TestReport global_test(const ConcurrentDataset& ds, const SubsetD& D, Index B, std::uint64_t seed,
                       MultiplierMode mode, int workers, double alpha) {
  const BootstrapOutcome boot = global_bootstrap(ds, D.indices, B, seed, mode, workers);
  const IntegratedStat stats = integrated_stats(ds, D.indices);

  TestReport report;
  report.subset = D.indices;
  report.subset_names = subset_names(ds, D.indices);
  report.statistic_e = stats.e_value;
  report.statistic_td = stats.td_value;  // == boot.observed, the decision statistic
  report.integrated_mdd = stats.integrated_mdd;
  report.integrated_variance = stats.integrated_variance;
  report.p_value = boot.p_value;
  report.p_value_asymptotic = asymptotic_pvalue(stats.td_value);
  report.asymptotic_note = kAsymptoticNote;
  report.B = B;
  report.seed = seed;
  report.multiplier_mode = mode;
  report.n = ds.n();
  report.p = ds.p();
  report.num_instants = ds.num_instants();
  report.alpha = alpha;
  return report;
}

TestReport partial_tests(const ConcurrentDataset& ds, Index B, std::uint64_t seed,
                         Correction correction, double alpha, MultiplierMode mode, int workers,
                         const std::function<void(const PerCovariateResult&)>& on_result) {
  const int p = ds.p();
  if (p < 1) throw std::invalid_argument("partial_tests: no covariates");

  TestReport report;
  report.subset = SubsetD::all(p).indices;
  report.subset_names = subset_names(ds, report.subset);
  report.statistic_e = std::numeric_limits<double>::quiet_NaN();
  report.statistic_td = std::numeric_limits<double>::quiet_NaN();
  report.integrated_variance = std::numeric_limits<double>::quiet_NaN();
  report.p_value_asymptotic = std::numeric_limits<double>::quiet_NaN();
  report.B = B;
  report.seed = seed;
  report.multiplier_mode = mode;
  report.n = ds.n();
  report.p = p;
  report.num_instants = ds.num_instants();
  report.alpha = alpha;
  report.correction = correction;

  double family_p = 1.0;
  for (int j = 0; j < p; ++j) {
    const std::uint64_t sub_seed =
        derive_seed(seed, SeedPurpose::partial_test, static_cast<std::uint64_t>(j));
    const TestReport single =
        global_test(ds, SubsetD::of({j}, p), B, sub_seed, mode, workers, alpha);

    PerCovariateResult result;
    result.index = j;
    result.name = ds.covariate_names[static_cast<std::size_t>(j)];
    result.statistic_e = single.statistic_e;
    result.statistic_td = single.statistic_td;
    result.p_value_raw = single.p_value;
    result.p_value_adjusted = correction == Correction::bonferroni
                                  ? std::min(1.0, single.p_value * static_cast<double>(p))
                                  : single.p_value;
    result.reject_at_alpha = result.p_value_adjusted <= alpha;
    result.seed = sub_seed;
    family_p = std::min(family_p, result.p_value_adjusted);
    if (on_result) on_result(result);
    report.per_covariate.push_back(std::move(result));
  }
  report.p_value = family_p;
  return report;
}

}  // namespace mddcm
