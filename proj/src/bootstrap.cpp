#include "mddcm/bootstrap.hpp"

#include <cmath>
#include <string>

#include "mddcm/integrated.hpp"
#include "mddcm/parallel.hpp"
#include "mddcm/pointwise.hpp"

namespace mddcm {

const char* to_string(MultiplierMode mode) {
  return mode == MultiplierMode::per_instant ? "per-instant" : "shared";
}

MultiplierMode multiplier_mode_from_string(const std::string& s) {
  if (s == "per-instant") return MultiplierMode::per_instant;
  if (s == "shared") return MultiplierMode::shared;
  throw std::invalid_argument("unknown multiplier mode: " + s);
}

double bootstrap_pvalue(const Eigen::Ref<const Vector>& replicates, double observed) {
  if (replicates.size() < 1) throw std::invalid_argument("bootstrap_pvalue: need B >= 1");
  Index count = 0;
  for (Index b = 0; b < replicates.size(); ++b)
    if (replicates(b) >= observed) ++count;
  return static_cast<double>(count) / static_cast<double>(replicates.size());
}

double bootstrap_mdd_star(const CenteredMatrix& a_j, const CenteredMatrix& b,
                          const MultiplierStream& e) {
  const Index n = a_j.rows();
  if (n != a_j.cols() || n != b.rows() || n != b.cols() || n != e.values.size())
    throw std::invalid_argument("bootstrap_mdd_star: dimension mismatch");
  if (n < 4) throw std::invalid_argument("bootstrap_mdd_star: need n >= 4");
  // Zero diagonals make the full quadratic form equal the l != q sum.
  const Matrix weighted = a_j.array() * b.array();
  const double quad = e.values.dot(weighted * e.values);
  return quad / (static_cast<double>(n) * static_cast<double>(n - 1));
}

double bootstrap_variance_star(const std::vector<CenteredMatrix>& a_list, const CenteredMatrix& b,
                               const MultiplierStream& e) {
  if (a_list.empty()) throw std::invalid_argument("bootstrap_variance_star: empty covariate set");
  const Index n = b.rows();
  if (n != b.cols() || n != e.values.size())
    throw std::invalid_argument("bootstrap_variance_star: dimension mismatch");
  Matrix a_sum = Matrix::Zero(n, n);
  for (const auto& a : a_list) {
    if (a.rows() != n || a.cols() != n)
      throw std::invalid_argument("bootstrap_variance_star: dimension mismatch");
    a_sum += a;
  }
  const Matrix sq = (a_sum.array() * b.array()).square();
  const Vector e2 = e.values.array().square();
  // Σ_{l<q} = half the full quadratic form of the symmetric zero-diagonal sq.
  const double quad = e2.dot(sq * e2) * 0.5;
  return quad / detail::choose2(n);
}

namespace {

// One bootstrap draw at one instant given the precomputed pair terms:
//   numerator = √C(n,2) Σ_j MDD*² = √C(n,2) eᵀPe / (n(n-1))
//   scale²    = Ŝ*²              = (e∘e)ᵀP²(e∘e) / (n(n-1))
struct ReplicateDraw {
  double numerator;
  double scale;
};

ReplicateDraw replicate_draw(const detail::InstantTerms& terms, const Vector& e, Index n,
                             Index replicate, const char* where) {
  const double n_n1 = static_cast<double>(n) * static_cast<double>(n - 1);
  const double numerator =
      std::sqrt(detail::choose2(n)) * e.dot(terms.pair_sum * e) / n_n1;
  const Vector e2 = e.array().square();
  const double s2 = e2.dot(terms.pair_sum_sq * e2) / n_n1;
  if (s2 <= 0.0)
    throw degenerate_data_error(std::string(where) + ": zero bootstrap variance in replicate " +
                                std::to_string(replicate) + " (degenerate input data)");
  return ReplicateDraw{numerator, std::sqrt(s2)};
}

}  // namespace

BootstrapOutcome pointwise_bootstrap(const Eigen::Ref<const Matrix>& x_at_t,
                                const Eigen::Ref<const Vector>& y_at_t, Index B,
                                std::uint64_t master_seed, int workers) {
  if (B < 1) throw std::invalid_argument("pointwise_bootstrap: need B >= 1");
  const Index n = y_at_t.size();
  const detail::InstantTerms terms = detail::instant_terms(x_at_t, y_at_t);
  if (terms.variance <= 0.0)
    throw degenerate_data_error("pointwise_bootstrap: zero variance in observed statistic");

  BootstrapOutcome out;
  out.B = B;
  out.seed = master_seed;
  out.observed = terms.numerator / std::sqrt(terms.variance);
  out.replicates.resize(B);
  parallel_for(B, workers, [&](Index b) {
    const Vector e = normal_stream(master_seed, static_cast<std::uint64_t>(b), 0, n);
    const ReplicateDraw draw = replicate_draw(terms, e, n, b, "pointwise_bootstrap");
    out.replicates(b) = draw.numerator / draw.scale;
  });
  out.p_value = bootstrap_pvalue(out.replicates, out.observed);
  return out;
}

BootstrapOutcome global_bootstrap(const ConcurrentDataset& ds, const std::vector<int>& subset,
                                Index B, std::uint64_t master_seed, MultiplierMode mode,
                                int workers) {
  if (B < 1) throw std::invalid_argument("global_bootstrap: need B >= 1");
  detail::check_complete(ds);
  detail::check_subset(ds, subset);
  const Index n = ds.n();
  const Index T = ds.num_instants();
  const double n_n1 = static_cast<double>(n) * static_cast<double>(n - 1);

  // Trapezoid weights: integrating a sequence v_u over the grid is the
  // weighted sum Σ w_u v_u.
  Vector weights = Vector::Zero(T);
  for (Index u = 0; u + 1 < T; ++u) {
    const double dt = ds.grid.instants(u + 1) - ds.grid.instants(u);
    weights(u) += 0.5 * dt;
    weights(u + 1) += 0.5 * dt;
  }

  // Grid-outer / replicate-inner so only one instant's O(n²) terms are alive
  // at a time. Numerator and variance integrals accumulate per replicate in
  // grid order; the statistic is the ratio of the integrated numerator to the
  // square root of the integrated variance.
  Vector numerator_integral = Vector::Zero(B);
  Vector variance_integral = Vector::Zero(B);
  double observed_numerator = 0.0;
  double observed_variance = 0.0;

  for (Index u = 0; u < T; ++u) {
    const detail::InstantTerms terms =
        detail::instant_terms(ds.covariate_columns_at(u, subset), ds.response.col(u));
    if (terms.variance <= 0.0)
      throw degenerate_data_error("global_bootstrap: zero variance at instant index " +
                                  std::to_string(u) + " (t = " +
                                  std::to_string(ds.grid.instants(u)) + ")");
    observed_numerator += weights(u) * terms.numerator;
    observed_variance += weights(u) * terms.variance;

    const std::uint32_t instant_key =
        mode == MultiplierMode::per_instant ? static_cast<std::uint32_t>(u + 1) : 0u;
    parallel_for(B, workers, [&](Index b) {
      const Vector e = normal_stream(master_seed, static_cast<std::uint64_t>(b), instant_key, n);
      const double numerator =
          std::sqrt(detail::choose2(n)) * e.dot(terms.pair_sum * e) / n_n1;
      const Vector e2 = e.array().square();
      numerator_integral(b) += weights(u) * numerator;
      variance_integral(b) += weights(u) * e2.dot(terms.pair_sum_sq * e2) / n_n1;
    });
  }

  BootstrapOutcome out;
  out.B = B;
  out.seed = master_seed;
  out.observed = observed_numerator / std::sqrt(observed_variance);
  out.replicates.resize(B);
  for (Index b = 0; b < B; ++b) {
    if (variance_integral(b) <= 0.0)
      throw degenerate_data_error(
          "global_bootstrap: zero integrated bootstrap variance in replicate " + std::to_string(b) +
          " (degenerate input data)");
    out.replicates(b) = numerator_integral(b) / std::sqrt(variance_integral(b));
  }
  out.p_value = bootstrap_pvalue(out.replicates, out.observed);
  return out;
}

}  // namespace mddcm
