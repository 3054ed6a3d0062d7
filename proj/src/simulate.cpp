#include "mddcm/simulate.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "mddcm/inference.hpp"
#include "mddcm/parallel.hpp"
#include "mddcm/rng.hpp"

namespace mddcm {

Scenario scenario_from_string(const std::string& s) {
  if (s == "A" || s == "a") return Scenario::A;
  if (s == "B" || s == "b") return Scenario::B;
  throw std::invalid_argument("unknown scenario: " + s);
}

const char* to_string(Scenario s) { return s == Scenario::A ? "A" : "B"; }

Matrix gp_sample(const GpConfig& config, std::uint64_t seed, Index count) {
  if (config.scale < 0.0) throw std::invalid_argument("gp_sample: negative scale");
  if (config.range_divisor <= 0.0)
    throw std::invalid_argument("gp_sample: range divisor must be positive");
  if (count < 1) throw std::invalid_argument("gp_sample: need count >= 1");
  const Index T = config.grid.size();
  if (config.scale == 0.0) return Matrix::Zero(count, T);

  Matrix cov(T, T);
  for (Index u = 0; u < T; ++u)
    for (Index v = 0; v < T; ++v)
      cov(u, v) = config.scale * std::exp(-24.0 * std::abs(config.grid.instants(u) -
                                                           config.grid.instants(v)) /
                                          config.range_divisor);

  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) {
    cov.diagonal().array() += 1e-10 * config.scale;
    llt.compute(cov);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("gp_sample: covariance factorization failed even with jitter");
  }
  const Matrix chol = llt.matrixL();

  Matrix out(count, T);
  for (Index i = 0; i < count; ++i)
    out.row(i) = (chol * normal_stream(seed, static_cast<std::uint64_t>(i), 0, T)).transpose();
  return out;
}

namespace {

ConcurrentDataset build_scenario(const ScenarioConfig& config, bool nonlinear) {
  if (config.n < 4) throw std::invalid_argument("scenario: need n >= 4 curves");
  const Index n = config.n;
  const Index T = config.grid.size();
  const double scale = config.noise_scale >= 0.0 ? config.noise_scale : (nonlinear ? 0.02 : 0.1);

  const GpConfig gp{scale, 10.0, config.grid};
  const Matrix noise_x1 = gp_sample(gp, derive_seed(config.seed, SeedPurpose::gp_noise, 1), n);
  const Matrix noise_x2 = gp_sample(gp, derive_seed(config.seed, SeedPurpose::gp_noise, 2), n);
  const Matrix noise_y = gp_sample(gp, derive_seed(config.seed, SeedPurpose::gp_noise, 3), n);

  ConcurrentDataset ds;
  ds.grid = config.grid;
  ds.response_name = "Y";
  ds.covariate_names = {"X1", "X2"};
  ds.covariates.assign(2, Matrix::Zero(n, T));
  ds.response = Matrix::Zero(n, T);
  ds.response_missing = BoolArray::Constant(n, T, false);
  ds.covariate_missing.assign(2, BoolArray::Constant(n, T, false));

  int width = 1;
  for (Index v = n; v >= 10; v /= 10) ++width;
  for (Index i = 0; i < n; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "c%0*lld", width, static_cast<long long>(i + 1));
    ds.curve_ids.push_back(buf);
  }

  Matrix& x1 = ds.covariates[0];
  Matrix& x2 = ds.covariates[1];
  for (Index u = 0; u < T; ++u) {
    const double t = ds.grid.instants(u);
    const double x1_mean = 5.0 * std::sin(24.0 * M_PI * t / 12.0);
    const double x2_mean = -(24.0 * t - 20.0) * (24.0 * t - 20.0) / 50.0 - 4.0;
    for (Index i = 0; i < n; ++i) {
      x1(i, u) = x1_mean + noise_x1(i, u);
      x2(i, u) = x2_mean + noise_x2(i, u);
    }
    if (!nonlinear) {
      const double b1 = -std::pow((24.0 * t - 15.0) / 10.0, 2) - 0.8;
      const double b2 = 0.01 * (std::pow(24.0 * t - 12.0, 2) - 144.0 + 100.0);
      for (Index i = 0; i < n; ++i) {
        double y = noise_y(i, u);
        if (config.use_effect_1) y += b1 * x1(i, u);
        if (config.use_effect_2) y += b2 * x2(i, u);
        ds.response(i, u) = y;
      }
    } else {
      const double sin2pit = std::sin(2.0 * M_PI * t);
      for (Index i = 0; i < n; ++i) {
        double y = noise_y(i, u);
        if (config.use_effect_1) y += std::exp((24.0 * t + 1.0) * x1(i, u) / 20.0) - 2.0;
        if (config.use_effect_2) {
          if (x2(i, u) == 0.0)
            throw std::runtime_error(
                "scenario B: X2 is exactly zero at curve " + std::to_string(i) + ", instant " +
                std::to_string(u) + "; log(X2^2) is singular (seeding pathology)");
          y += -1.2 * std::log(x2(i, u) * x2(i, u)) * sin2pit;
        }
        ds.response(i, u) = y;
      }
    }
  }
  return ds;
}

}  // namespace

ConcurrentDataset scenario_a(const ScenarioConfig& config) {
  if (config.scenario != Scenario::A) throw std::invalid_argument("scenario_a: config is not A");
  return build_scenario(config, false);
}

ConcurrentDataset scenario_b(const ScenarioConfig& config) {
  if (config.scenario != Scenario::B) throw std::invalid_argument("scenario_b: config is not B");
  return build_scenario(config, true);
}

ConcurrentDataset generate_scenario(const ScenarioConfig& config) {
  return config.scenario == Scenario::A ? scenario_a(config) : scenario_b(config);
}

std::pair<double, double> ci_bounds(double alpha, Index M) {
  if (alpha <= 0.0 || alpha >= 1.0) throw std::invalid_argument("ci_bounds: need 0 < alpha < 1");
  if (M < 1) throw std::invalid_argument("ci_bounds: need M >= 1");
  const double half = 1.96 * std::sqrt(alpha * (1.0 - alpha) / static_cast<double>(M));
  return {alpha - half, alpha + half};
}

std::vector<double> rejection_rates(const Eigen::Ref<const Vector>& p_values,
                                    const std::vector<double>& alpha_levels) {
  std::vector<double> rates;
  rates.reserve(alpha_levels.size());
  for (double alpha : alpha_levels) {
    Index count = 0;
    for (Index r = 0; r < p_values.size(); ++r)
      if (p_values(r) <= alpha) ++count;
    rates.push_back(static_cast<double>(count) / static_cast<double>(p_values.size()));
  }
  return rates;
}

McResult run_monte_carlo(const McConfig& config) {
  if (config.M < 1) throw std::invalid_argument("run_monte_carlo: need M >= 1");
  if (config.alpha_levels.empty())
    throw std::invalid_argument("run_monte_carlo: no significance levels");
  const auto start = std::chrono::steady_clock::now();

  McResult result;
  result.M = config.M;
  result.alpha_levels = config.alpha_levels;
  const Index labels =
      config.test == McTest::global ? 1 : static_cast<Index>(2);  // scenarios have p = 2
  result.p_values.resize(config.M, labels);

  std::atomic<Index> done{0};
  parallel_for(config.M, config.workers, [&](Index r) {
    ScenarioConfig scenario = config.scenario;
    scenario.seed =
        derive_seed(config.scenario.seed, SeedPurpose::mc_data, static_cast<std::uint64_t>(r));
    const ConcurrentDataset ds = generate_scenario(scenario);
    const std::uint64_t test_seed =
        derive_seed(config.scenario.seed, SeedPurpose::mc_test, static_cast<std::uint64_t>(r));
    try {
      if (config.test == McTest::global) {
        const TestReport report =
            global_test(ds, SubsetD::all(ds.p()), config.B, test_seed, config.mode, 1);
        result.p_values(r, 0) = report.p_value;
      } else {
        const TestReport report =
            partial_tests(ds, config.B, test_seed, Correction::none, 0.05, config.mode, 1);
        for (std::size_t j = 0; j < report.per_covariate.size(); ++j)
          result.p_values(r, static_cast<Index>(j)) = report.per_covariate[j].p_value_raw;
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("monte carlo replicate " + std::to_string(r) + ": " + e.what());
    }
    const Index finished = ++done;
    if (config.progress && (finished % 25 == 0 || finished == config.M))
      std::fprintf(stderr, "mc: %lld/%lld replicates\n", static_cast<long long>(finished),
                   static_cast<long long>(config.M));
  });

  if (config.test == McTest::global) {
    result.test_labels = {"global"};
  } else {
    result.test_labels = {"X1", "X2"};
  }

  result.rejection_rates.resize(labels, static_cast<Index>(config.alpha_levels.size()));
  for (double alpha : config.alpha_levels) result.ci.push_back(ci_bounds(alpha, config.M));
  result.within_ci.assign(static_cast<std::size_t>(labels),
                          std::vector<bool>(config.alpha_levels.size(), false));
  for (Index k = 0; k < labels; ++k) {
    const auto rates = rejection_rates(result.p_values.col(k), config.alpha_levels);
    for (std::size_t a = 0; a < rates.size(); ++a) {
      result.rejection_rates(k, static_cast<Index>(a)) = rates[a];
      result.within_ci[static_cast<std::size_t>(k)][a] =
          rates[a] >= result.ci[a].first && rates[a] <= result.ci[a].second;
    }
  }

  result.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace mddcm
