// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. Run without arguments for all criteria, or pass criterion
// numbers (and an optional --workers N override).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "mddcm/bootstrap.hpp"
#include "mddcm/centering.hpp"
#include "mddcm/dataset.hpp"
#include "mddcm/inference.hpp"
#include "mddcm/integrated.hpp"
#include "mddcm/pointwise.hpp"
#include "mddcm/report.hpp"
#include "mddcm/rng.hpp"
#include "mddcm/simulate.hpp"
#include "mddcm/spline.hpp"

using mddcm::CenteredMatrix;
using mddcm::Index;
using mddcm::Matrix;
using mddcm::TimeGrid;
using mddcm::Vector;

namespace {

int g_workers = 0;

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool condition, const std::string& what) {
    if (!condition) {
      ok = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

CenteredMatrix centered_abs(const Vector& x) {
  return mddcm::u_center(mddcm::pairwise_abs_distance(x));
}

CenteredMatrix centered_sq(const Vector& y) {
  return mddcm::u_center(mddcm::half_squared_distance(y));
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// --- 1: pairwise path == order-four kernel oracle --------------------------

Check criterion1() {
  Check check;
  std::mt19937 gen(11001);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst = 0.0;
  for (Index n = 4; n <= 12; ++n) {
    for (int trial = 0; trial < 100; ++trial) {
      Vector x(n), y(n);
      for (Index i = 0; i < n; ++i) {
        x(i) = normal(gen);
        y(i) = normal(gen);
      }
      const double fast = mddcm::mdd_unbiased(centered_abs(x), centered_sq(y)).value;
      const double slow = mddcm::mdd_oracle(x, y).value;
      const double err = std::abs(fast - slow) / (1.0 + std::abs(slow));
      worst = std::max(worst, err);
    }
  }
  check.require(worst <= 1e-10, "worst relative gap " + fmt(worst) + " > 1e-10");
  check.note("worst relative gap " + fmt(worst) + " over 900 datasets");
  return check;
}

// --- 2: unbiasedness under independence -------------------------------------

Check criterion2() {
  Check check;
  const Index n = 8;
  const int resamples = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (int r = 0; r < resamples; ++r) {
    const Vector x = mddcm::normal_stream(22001, static_cast<std::uint64_t>(r), 1, n);
    const Vector y = mddcm::normal_stream(22001, static_cast<std::uint64_t>(r), 2, n);
    const double value = mddcm::mdd_oracle(x, y).value;
    sum += value;
    sum_sq += value * value;
  }
  const double mean = sum / resamples;
  const double sd = std::sqrt((sum_sq / resamples - mean * mean) / (resamples - 1));
  check.require(std::abs(mean) <= 3.0 * sd,
                "mean " + fmt(mean) + " outside 3 standard errors (" + fmt(3.0 * sd) + ")");
  check.note("mean " + fmt(mean) + ", 3 SE = " + fmt(3.0 * sd));
  return check;
}

// --- Monte Carlo helpers -----------------------------------------------------

mddcm::McResult scenario_mc(mddcm::Scenario scenario, Index n, bool effect1, bool effect2,
                            Index M, Index B, std::uint64_t seed, mddcm::McTest test) {
  mddcm::McConfig config;
  config.scenario.scenario = scenario;
  config.scenario.n = n;
  config.scenario.grid = TimeGrid::equispaced(25);
  config.scenario.use_effect_1 = effect1;
  config.scenario.use_effect_2 = effect2;
  config.scenario.seed = seed;
  config.test = test;
  config.M = M;
  config.B = B;
  config.workers = g_workers;
  return mddcm::run_monte_carlo(config);
}

// --- 3: scenario A calibration ----------------------------------------------

Check criterion3() {
  Check check;
  const auto result = scenario_mc(mddcm::Scenario::A, 40, false, false, 500, 200, 33001,
                                  mddcm::McTest::global);
  const std::vector<double> levels{0.01, 0.05, 0.10};
  for (std::size_t a = 0; a < levels.size(); ++a) {
    const auto [lo, hi] = mddcm::ci_bounds(levels[a], 500);
    const double rate = result.rejection_rates(0, static_cast<Index>(a));
    check.require(rate >= lo && rate <= hi, "size " + fmt(rate) + " at " + fmt(levels[a]) +
                                                " outside [" + fmt(lo) + "," + fmt(hi) + "]");
    check.note(fmt(levels[a]) + " -> " + fmt(rate));
  }
  return check;
}

// --- 4: scenario A power ------------------------------------------------------

Check criterion4() {
  Check check;
  const auto result =
      scenario_mc(mddcm::Scenario::A, 20, true, true, 200, 200, 44001, mddcm::McTest::global);
  const double rate = mddcm::rejection_rates(result.p_values.col(0), {0.05})[0];
  check.require(rate >= 0.95, "power " + fmt(rate) + " < 0.95");
  check.note("power at 5% = " + fmt(rate));
  return check;
}

// --- 5: scenario A partial tests ----------------------------------------------

Check criterion5() {
  Check check;
  const auto result =
      scenario_mc(mddcm::Scenario::A, 20, false, true, 200, 200, 55002, mddcm::McTest::partial);
  const double rate1 = mddcm::rejection_rates(result.p_values.col(0), {0.05})[0];
  const double rate2 = mddcm::rejection_rates(result.p_values.col(1), {0.05})[0];
  const auto [lo, hi] = mddcm::ci_bounds(0.05, 200);
  check.require(rate1 >= lo && rate1 <= hi,
                "null covariate rate " + fmt(rate1) + " outside [" + fmt(lo) + "," + fmt(hi) + "]");
  check.require(std::abs(rate2 - 0.919) <= 0.06,
                "active covariate rate " + fmt(rate2) + " not within 0.06 of 0.919");
  check.note("H01 -> " + fmt(rate1) + ", H02 -> " + fmt(rate2));
  return check;
}

// --- 6: scenario B calibration -------------------------------------------------

Check criterion6() {
  Check check;
  const auto result = scenario_mc(mddcm::Scenario::B, 100, false, false, 500, 200, 66001,
                                  mddcm::McTest::global);
  const double rate = mddcm::rejection_rates(result.p_values.col(0), {0.05})[0];
  const auto [lo, hi] = mddcm::ci_bounds(0.05, 500);
  check.require(rate >= lo && rate <= hi,
                "size " + fmt(rate) + " outside [" + fmt(lo) + "," + fmt(hi) + "]");
  check.note("size at 5% = " + fmt(rate));
  return check;
}

// --- 7: scenario B selective power ---------------------------------------------

Check criterion7() {
  Check check;
  const auto result =
      scenario_mc(mddcm::Scenario::B, 60, false, true, 200, 200, 77001, mddcm::McTest::global);
  const double rate = mddcm::rejection_rates(result.p_values.col(0), {0.05})[0];
  check.require(std::abs(rate - 0.956) <= 0.06, "power " + fmt(rate) + " not within 0.06 of 0.956");
  check.note("power at 5% = " + fmt(rate));
  return check;
}

// --- 8: p-value uniformity under the null --------------------------------------

Check criterion8() {
  Check check;
  const auto result =
      scenario_mc(mddcm::Scenario::A, 60, false, false, 500, 200, 88001, mddcm::McTest::global);
  std::vector<double> p(result.p_values.col(0).data(),
                        result.p_values.col(0).data() + result.p_values.rows());
  std::sort(p.begin(), p.end());
  const double M = static_cast<double>(p.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    ks = std::max(ks, (i + 1) / M - p[i]);
    ks = std::max(ks, p[i] - i / M);
  }
  // asymptotic Kolmogorov critical value at 1%: sqrt(-ln(0.005)/2)
  const double critical = std::sqrt(-0.5 * std::log(0.005)) / std::sqrt(M);
  check.require(ks <= critical,
                "KS statistic " + fmt(ks) + " exceeds 1% critical value " + fmt(critical));
  check.note("KS = " + fmt(ks) + ", critical = " + fmt(critical));
  return check;
}

// --- 9: deterministic property suite --------------------------------------------

Check criterion9() {
  Check check;
  std::mt19937 gen(99001);
  std::uniform_real_distribution<double> uniform(-2.0, 2.0);
  auto random_vec = [&](Index n) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = uniform(gen);
    return v;
  };

  // U-centering row sums
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 4 + static_cast<Index>(gen() % 10);
    const Matrix m = mddcm::pairwise_abs_distance(random_vec(n));
    const Matrix centered = mddcm::u_center(m);
    const double tol = 1e-10 * std::max(1.0, m.cwiseAbs().maxCoeff());
    for (Index i = 0; i < n; ++i) {
      double row = 0.0;
      for (Index l = 0; l < n; ++l)
        if (l != i) row += centered(i, l);
      check.require(std::abs(row) < tol, "centered row sum " + fmt(row) + " at n=" +
                                             std::to_string(n));
    }
  }

  // e = 1 bootstrap identities
  {
    const Index n = 9;
    const Vector x1 = random_vec(n), x2 = random_vec(n), y = random_vec(n);
    const std::vector<CenteredMatrix> a_list{centered_abs(x1), centered_abs(x2)};
    const CenteredMatrix b = centered_sq(y);
    const mddcm::MultiplierStream ones{0, 0, Vector::Ones(n)};
    const double mdd = mddcm::mdd_unbiased(a_list[0], b).value;
    const double star = mddcm::bootstrap_mdd_star(a_list[0], b, ones);
    check.require(std::abs(star - (double(n - 3) / double(n - 1)) * mdd) < 1e-12,
                  "MDD* with unit multipliers mismatched");
    const double vstar = mddcm::bootstrap_variance_star(a_list, b, ones);
    const double v = mddcm::pointwise_variance(a_list, b);
    check.require(std::abs(vstar - mddcm::cn_factor(n) * v) < 1e-12 * (1.0 + vstar),
                  "S*^2 with unit multipliers mismatched");
  }

  // rescaling invariance of the statistics
  {
    mddcm::ScenarioConfig config;
    config.scenario = mddcm::Scenario::A;
    config.n = 10;
    config.grid = TimeGrid::equispaced(6);
    config.seed = 5;
    const auto ds = mddcm::scenario_a(config);
    auto scaled = ds;
    for (auto& xmat : scaled.covariates) xmat *= 4.0;
    scaled.response *= 0.5;
    const auto base = mddcm::integrated_stats(ds, {0, 1});
    const auto after = mddcm::integrated_stats(scaled, {0, 1});
    check.require(std::abs(base.e_value - after.e_value) < 1e-9 * (1.0 + std::abs(base.e_value)),
                  "statistic_e changed under simultaneous rescaling");
    check.require(
        std::abs(base.td_value - after.td_value) < 1e-9 * (1.0 + std::abs(base.td_value)),
        "statistic_td changed under simultaneous rescaling");

    // translation invariance via per-instant centering
    const auto centered = mddcm::center_variables(ds);
    const auto after_center = mddcm::integrated_stats(centered, {0, 1});
    check.require(std::abs(base.e_value - after_center.e_value) <
                      1e-9 * (1.0 + std::abs(base.e_value)),
                  "statistic_e changed under center_variables");
  }

  // trapezoid exactness for linear integrands
  {
    const TimeGrid grid = TimeGrid::equispaced(9);
    const Vector linear = 3.0 * grid.instants.array() - 1.0;
    check.require(std::abs(mddcm::integrate_on_grid(linear, grid) - 0.5) < 1e-14,
                  "trapezoid not exact on a linear integrand");
  }

  // spline idempotence and linear exactness
  {
    Vector knots(5), values(5);
    knots << 0.0, 0.3, 0.45, 0.8, 1.0;
    values = 2.0 * knots.array() + 0.7;
    const mddcm::NaturalCubicSpline spline(knots, values);
    check.require(std::abs(spline(0.6) - (2.0 * 0.6 + 0.7)) < 1e-12,
                  "natural spline not exact on a line");

    mddcm::ScenarioConfig config;
    config.scenario = mddcm::Scenario::A;
    config.n = 6;
    config.grid = TimeGrid::equispaced(8);
    config.seed = 9;
    const auto complete = mddcm::scenario_a(config);
    const auto filled = mddcm::spline_fill(complete);
    check.require(filled.response == complete.response &&
                      filled.covariates[0] == complete.covariates[0],
                  "spline_fill not the identity on complete data");
  }

  // determinism of full reports across worker counts
  {
    mddcm::ScenarioConfig config;
    config.scenario = mddcm::Scenario::B;
    config.n = 10;
    config.grid = TimeGrid::equispaced(7);
    config.seed = 13;
    const auto ds = mddcm::scenario_b(config);
    const auto serial = mddcm::global_test(ds, mddcm::SubsetD::all(2), 40, 21,
                                           mddcm::MultiplierMode::per_instant, 1);
    const auto threaded = mddcm::global_test(ds, mddcm::SubsetD::all(2), 40, 21,
                                             mddcm::MultiplierMode::per_instant, 4);
    check.require(mddcm::to_json(serial) == mddcm::to_json(threaded),
                  "global test report depends on worker count");

    const auto partial1 =
        mddcm::partial_tests(ds, 24, 8, mddcm::Correction::bonferroni, 0.05,
                             mddcm::MultiplierMode::per_instant, 1);
    const auto partial4 =
        mddcm::partial_tests(ds, 24, 8, mddcm::Correction::bonferroni, 0.05,
                             mddcm::MultiplierMode::per_instant, 4);
    check.require(mddcm::to_json(partial1) == mddcm::to_json(partial4),
                  "partial test report depends on worker count");

    mddcm::McConfig mc;
    mc.scenario = config;
    mc.M = 4;
    mc.B = 12;
    mc.workers = 1;
    const auto mc1 = mddcm::run_monte_carlo(mc);
    mc.workers = 3;
    const auto mc3 = mddcm::run_monte_carlo(mc);
    check.require(mddcm::to_json(mc1) == mddcm::to_json(mc3),
                  "Monte Carlo result depends on worker count");
  }

  if (check.ok) check.note("all structural properties hold");
  return check;
}

// --- 10: performance of the production path -------------------------------------

Check criterion10() {
  Check check;
  const std::uint64_t oracle_before = mddcm::mdd_oracle_invocations();

  mddcm::ScenarioConfig config;
  config.scenario = mddcm::Scenario::A;
  config.n = 100;
  config.grid = TimeGrid::equispaced(25);
  config.seed = 101;
  const auto ds = mddcm::scenario_a(config);

  const auto start = std::chrono::steady_clock::now();
  const auto report =
      mddcm::global_test(ds, mddcm::SubsetD::all(2), 1000, 42,
                         mddcm::MultiplierMode::per_instant, g_workers);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  check.require(seconds <= 60.0, "global test took " + fmt(seconds) + "s > 60s");
  check.require(report.p_value <= 1.0, "invalid p-value");
  check.require(mddcm::mdd_oracle_invocations() == oracle_before,
                "O(n^4) oracle was invoked by the production path");
  check.note("n=100, p=2, T=25, B=1000 in " + fmt(seconds) + "s; oracle untouched");
  return check;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> requested;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--workers" && i + 1 < argc) {
      g_workers = std::atoi(argv[++i]);
    } else {
      requested.push_back(std::atoi(arg.c_str()));
    }
  }
  if (requested.empty())
    for (int k = 1; k <= 10; ++k) requested.push_back(k);

  using Criterion = Check (*)();
  const Criterion criteria[10] = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                  criterion6, criterion7, criterion8, criterion9, criterion10};
  const char* names[10] = {
      "oracle equivalence of the unbiased estimator",
      "unbiasedness under independence",
      "scenario A calibration (n=40, M=500, B=200)",
      "scenario A power (n=20, M=200, B=200)",
      "scenario A partial tests (n=20, M=200, B=200)",
      "scenario B calibration (n=100, M=500, B=200)",
      "scenario B selective power (n=60, M=200, B=200)",
      "p-value uniformity under the null (n=60, M=500)",
      "deterministic property suite",
      "performance of the production path",
  };

  int failures = 0;
  for (int k : requested) {
    if (k < 1 || k > 10) {
      std::fprintf(stderr, "unknown criterion %d\n", k);
      ++failures;
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    Check check;
    try {
      check = criteria[k - 1]();
    } catch (const std::exception& e) {
      check.ok = false;
      check.detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] criterion %2d: %s (%s) [%.1fs]\n", check.ok ? "PASS" : "FAIL", k, names[k - 1],
                check.detail.c_str(), seconds);
    std::fflush(stdout);
    if (!check.ok) ++failures;
  }
  return failures;
}
