#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mddcm/bootstrap.hpp"
#include "mddcm/dataset.hpp"
#include "mddcm/types.hpp"

namespace mddcm {

/// Nonempty set of tested covariates, 0-based, sorted, duplicate-free.
struct SubsetD {
  std::vector<int> indices;

  static SubsetD all(int p);
  static SubsetD of(std::vector<int> indices, int p);
  /// Resolve covariate names ("all" for the full set).
  static SubsetD from_names(const std::vector<std::string>& names,
                            const std::vector<std::string>& covariate_names);
};

enum class Correction { bonferroni, none };

const char* to_string(Correction c);
Correction correction_from_string(const std::string& s);

struct PerCovariateResult {
  int index = 0;  // 0-based covariate position
  std::string name;
  double statistic_e = 0.0;
  double statistic_td = 0.0;
  double p_value_raw = 0.0;
  double p_value_adjusted = 0.0;
  bool reject_at_alpha = false;
  std::uint64_t seed = 0;  // derived sub-seed for this covariate's bootstrap
};

/// Everything needed to report and reproduce one test run. For partial runs
/// the per-covariate list is populated and the top-level statistics are NaN
/// (serialized as null); p_value is then the family-wise value
/// min_j(adjusted p_j).
struct TestReport {
  std::vector<int> subset;  // 0-based
  std::vector<std::string> subset_names;
  double statistic_e = 0.0;
  double statistic_td = 0.0;
  Vector integrated_mdd;  // per subset covariate
  double integrated_variance = 0.0;
  double p_value = 0.0;
  double p_value_asymptotic = 0.0;  // upper tail of N(0,1) at statistic_td
  std::string asymptotic_note;
  Index B = 0;
  std::uint64_t seed = 0;
  MultiplierMode multiplier_mode = MultiplierMode::shared;
  Index n = 0;
  int p = 0;
  Index num_instants = 0;
  double alpha = 0.05;
  Correction correction = Correction::none;
  std::vector<PerCovariateResult> per_covariate;
};

/// Upper-tail standard-normal p-value 1 - Φ(t). Diagnostic only: the normal
/// limit sets in slowly, the bootstrap p-value is the decision value.
double asymptotic_pvalue(double statistic_td);

/// Global conditional-mean-independence test for the covariates in D,
/// bootstrap p-value via the global wild-bootstrap scheme.
TestReport global_test(const ConcurrentDataset& ds, const SubsetD& D, Index B,
                       std::uint64_t seed, MultiplierMode mode = MultiplierMode::shared,
                       int workers = 1, double alpha = 0.05);

/// One single-covariate test per covariate with multiplicity-adjusted
/// p-values; sub-seeds derive from (seed, covariate index) so the runs are
/// independent yet jointly reproducible. on_result, when set, is called with
/// each covariate's result as it completes (long runs stay observable).
TestReport partial_tests(const ConcurrentDataset& ds, Index B, std::uint64_t seed,
                         Correction correction, double alpha = 0.05,
                         MultiplierMode mode = MultiplierMode::shared, int workers = 1,
                         const std::function<void(const PerCovariateResult&)>& on_result = {});

}  // namespace mddcm
