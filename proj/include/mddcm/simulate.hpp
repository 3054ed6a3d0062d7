#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mddcm/bootstrap.hpp"
#include "mddcm/dataset.hpp"
#include "mddcm/grid.hpp"
#include "mddcm/types.hpp"

namespace mddcm {

/// Zero-mean Gaussian process on a grid with exponential covariance
/// Ω(s,t) = scale · exp(-24|s-t| / range_divisor).
struct GpConfig {
  double scale = 0.1;
  double range_divisor = 10.0;
  TimeGrid grid;
};

/// `count` independent rows, each a draw of the process on the grid, via a
/// Cholesky factor of Ω (diagonal jitter up to 1e-10·scale if the
/// factorization needs it). Row i consumes the stream (seed, i).
Matrix gp_sample(const GpConfig& config, std::uint64_t seed, Index count);

enum class Scenario { A, B };

Scenario scenario_from_string(const std::string& s);
const char* to_string(Scenario s);

struct ScenarioConfig {
  Scenario scenario = Scenario::A;
  Index n = 20;
  TimeGrid grid = TimeGrid::equispaced(25);
  bool use_effect_1 = true;
  bool use_effect_2 = true;
  std::uint64_t seed = 1;
  // Noise amplitude of the three error processes; negative means the
  // scenario default (0.1 linear, 0.02 nonlinear). Zero gives noiseless
  // deterministic curves, used by calibration checks.
  double noise_scale = -1.0;
};

/// Linear model: Y = β₁X₁ + β₂X₂ + ε with
///   X₁(t) = 5 sin(2πt) + ε₁,  X₂(t) = -(24t-20)²/50 - 4 + ε₂,
///   β₁(t) = -((24t-15)/10)² - 0.8,  β₂(t) = 0.01((24t-12)² - 144 + 100).
ConcurrentDataset scenario_a(const ScenarioConfig& config);

/// Nonlinear model: Y = F₁ + F₂ + ε with the same covariates and
///   F₁ = exp((24t+1)X₁/20) - 2,  F₂ = -1.2 log(X₂²) sin(2πt).
ConcurrentDataset scenario_b(const ScenarioConfig& config);

ConcurrentDataset generate_scenario(const ScenarioConfig& config);

/// 95% binomial band [α ∓ 1.96√(α(1-α)/M)] for a Monte Carlo proportion.
std::pair<double, double> ci_bounds(double alpha, Index M);

/// What the Monte Carlo harness runs on each simulated dataset.
enum class McTest { global, partial };

struct McConfig {
  ScenarioConfig scenario;
  McTest test = McTest::global;
  Index M = 500;
  Index B = 200;
  MultiplierMode mode = MultiplierMode::shared;
  std::vector<double> alpha_levels = {0.01, 0.05, 0.10};
  int workers = 0;        // 0: hardware concurrency
  bool progress = false;  // stream replicate counts to stderr
};

struct McResult {
  Index M = 0;
  std::vector<double> alpha_levels;
  std::vector<std::string> test_labels;  // "global" or one label per covariate
  Matrix p_values;                       // M × labels, raw p-values
  Matrix rejection_rates;                // labels × levels, share of p ≤ α
  std::vector<std::pair<double, double>> ci;  // per level
  std::vector<std::vector<bool>> within_ci;   // labels × levels
  double runtime_seconds = 0.0;
};

/// M replicates with seeds derived from (scenario.seed, replicate index); the
/// result is identical for any worker count.
McResult run_monte_carlo(const McConfig& config);

/// Share of p-values ≤ α per level.
std::vector<double> rejection_rates(const Eigen::Ref<const Vector>& p_values,
                                    const std::vector<double>& alpha_levels);

}  // namespace mddcm
