#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "mddcm/centering.hpp"
#include "mddcm/integrated.hpp"
#include "mddcm/pointwise.hpp"
#include "support/datasets.hpp"

using mddcm::Index;
using mddcm::Matrix;
using mddcm::TimeGrid;
using mddcm::Vector;

TEST_CASE("trapezoid rule basics") {
  const TimeGrid grid = TimeGrid::equispaced(11);
  REQUIRE(mddcm::integrate_on_grid(Vector::Ones(11), grid) == Catch::Approx(1.0).epsilon(1e-14));
  REQUIRE(mddcm::integrate_on_grid(grid.instants, grid) == Catch::Approx(0.5).epsilon(1e-14));

  const TimeGrid fine = TimeGrid::equispaced(25);
  const Vector squares = fine.instants.array().square();
  REQUIRE(std::abs(mddcm::integrate_on_grid(squares, fine) - 1.0 / 3.0) < 3e-4);

  REQUIRE_THROWS_AS(mddcm::integrate_on_grid(Vector::Ones(5), fine), std::invalid_argument);
}

TEST_CASE("trapezoid is exact under piecewise-linear refinement") {
  std::mt19937 gen(301);
  const TimeGrid coarse = TimeGrid::equispaced(6);
  const Vector values = oracle::random_vector(gen, 6);
  const double coarse_integral = mddcm::integrate_on_grid(values, coarse);

  Vector refined_t(11), refined_v(11);
  for (Index u = 0; u < 5; ++u) {
    refined_t(2 * u) = coarse.instants(u);
    refined_v(2 * u) = values(u);
    refined_t(2 * u + 1) = 0.5 * (coarse.instants(u) + coarse.instants(u + 1));
    refined_v(2 * u + 1) = 0.5 * (values(u) + values(u + 1));
  }
  refined_t(10) = coarse.instants(5);
  refined_v(10) = values(5);
  REQUIRE(mddcm::integrate_on_grid(refined_v, TimeGrid(refined_t)) ==
          Catch::Approx(coarse_integral).epsilon(1e-13));
}

TEST_CASE("time grid validation") {
  Vector bad(3);
  bad << 0.0, 0.5, 0.5;
  REQUIRE_THROWS_AS(TimeGrid(bad), std::invalid_argument);
  REQUIRE_THROWS_AS(TimeGrid(Vector::Ones(1)), std::invalid_argument);
}

TEST_CASE("integrated_mdd: constant response integrates to zero") {
  std::mt19937 gen(302);
  auto ds = oracle::random_dataset(gen, 6, 5, 1);
  ds.response = Matrix::Ones(6, 5);
  REQUIRE(mddcm::integrated_mdd(ds, 0) == 0.0);
}

TEST_CASE("integrated_mdd: identical columns reduce to span times the single value") {
  std::mt19937 gen(303);
  const Vector x = oracle::random_vector(gen, 6);
  const Vector y = oracle::random_vector(gen, 6);
  Matrix xs(6, 2), ys(6, 2);
  xs << x, x;
  ys << y, y;
  Vector t(2);
  t << 0.25, 0.75;
  const auto ds = oracle::make_dataset(ys, {xs}, TimeGrid(t));
  const double single = mddcm::mdd_unbiased(mddcm::u_center(mddcm::pairwise_abs_distance(x)),
                                            mddcm::u_center(mddcm::half_squared_distance(y)))
                            .value;
  REQUIRE(mddcm::integrated_mdd(ds, 0) == Catch::Approx(0.5 * single).epsilon(1e-12));
}

TEST_CASE("integrated_mdd equals the trapezoid of per-column oracle values") {
  std::mt19937 gen(304);
  const auto ds = oracle::random_dataset(gen, 6, 5, 1);
  Vector per_column(5);
  for (Index u = 0; u < 5; ++u)
    per_column(u) = mddcm::mdd_oracle(ds.covariates[0].col(u), ds.response.col(u)).value;
  const double expected = mddcm::integrate_on_grid(per_column, ds.grid);
  REQUIRE(mddcm::integrated_mdd(ds, 0) == Catch::Approx(expected).epsilon(1e-10));
}

TEST_CASE("integrated_variance matches a naive quadruple loop") {
  std::mt19937 gen(305);
  const auto ds = oracle::random_dataset(gen, 6, 5, 2);
  const std::vector<int> subset{0, 1};

  // Per instant: Σ_{l<q} Σ_{j,j'} ā_j ā_j' b̄², then trapezoid, then scale.
  const Index n = 6;
  Vector per_instant(5);
  for (Index u = 0; u < 5; ++u) {
    const Matrix b = mddcm::u_center(mddcm::half_squared_distance(ds.response.col(u)));
    std::vector<Matrix> a;
    for (int j : subset)
      a.push_back(mddcm::u_center(mddcm::pairwise_abs_distance(ds.covariates[j].col(u))));
    double total = 0.0;
    for (Index l = 0; l < n; ++l)
      for (Index q = l + 1; q < n; ++q)
        for (const auto& aj : a)
          for (const auto& ajp : a) total += aj(l, q) * ajp(l, q) * b(l, q) * b(l, q);
    per_instant(u) = total;
  }
  const double expected = 2.0 * mddcm::integrate_on_grid(per_instant, ds.grid) /
                          (n * (n - 1) * mddcm::cn_factor(n));
  REQUIRE(mddcm::integrated_variance(ds, subset) == Catch::Approx(expected).epsilon(1e-12));
}

TEST_CASE("integrated_variance is nonnegative and zero for constant response") {
  std::mt19937 gen(306);
  auto ds = oracle::random_dataset(gen, 7, 4, 2);
  REQUIRE(mddcm::integrated_variance(ds, {0, 1}) >= 0.0);
  ds.response = Matrix::Constant(7, 4, 3.0);
  REQUIRE(mddcm::integrated_variance(ds, {0, 1}) == 0.0);
}

TEST_CASE("statistic_e composes integrate_on_grid with the pointwise ratio") {
  std::mt19937 gen(307);
  const TimeGrid grid = TimeGrid::equispaced(7);
  const Vector numerators = oracle::random_vector(gen, 7);
  const Vector scales = oracle::random_vector(gen, 7, 0.5, 2.0);
  const Vector ratio = numerators.array() / scales.array();
  REQUIRE(mddcm::statistic_e(numerators, scales, grid) ==
          Catch::Approx(mddcm::integrate_on_grid(ratio, grid)).epsilon(1e-13));

  // all ratios equal r on [0,1] -> r; a T=2 grid is the two-point trapezoid
  REQUIRE(mddcm::statistic_e(Vector::Constant(7, 1.5), Vector::Ones(7), grid) ==
          Catch::Approx(1.5).epsilon(1e-13));
  Vector t2(2), n2(2), s2(2);
  t2 << 0.0, 1.0;
  n2 << 2.0, 4.0;
  s2 << 1.0, 2.0;
  REQUIRE(mddcm::statistic_e(n2, s2, TimeGrid(t2)) == Catch::Approx(2.0).epsilon(1e-13));

  Vector zero_scale = scales;
  zero_scale(3) = 0.0;
  REQUIRE_THROWS_WITH(mddcm::statistic_e(numerators, zero_scale, grid),
                      Catch::Matchers::ContainsSubstring("instant index 3"));
}

TEST_CASE("integrated statistics are invariant under simultaneous positive rescaling") {
  std::mt19937 gen(308);
  auto ds = oracle::random_dataset(gen, 8, 5, 2);
  const auto base = mddcm::integrated_stats(ds, {0, 1});

  auto scaled = ds;
  for (auto& x : scaled.covariates) x *= 2.5;
  scaled.response *= 0.7;
  const auto after = mddcm::integrated_stats(scaled, {0, 1});

  REQUIRE(after.td_value == Catch::Approx(base.td_value).epsilon(1e-10));
  REQUIRE(after.e_value == Catch::Approx(base.e_value).epsilon(1e-10));
}

TEST_CASE("statistic_td relates its components and rejects degenerate data") {
  std::mt19937 gen(309);
  auto ds = oracle::random_dataset(gen, 8, 5, 2);
  const auto stats = mddcm::statistic_td(ds, {0, 1});
  REQUIRE(stats.td_value ==
          Catch::Approx(std::sqrt(8.0 * 7.0 / 2.0) * stats.integrated_mdd.sum() /
                        std::sqrt(stats.integrated_variance))
              .epsilon(1e-12));

  ds.response = Matrix::Constant(8, 5, -2.0);
  REQUIRE_THROWS_AS(mddcm::integrated_stats(ds, {0, 1}), mddcm::degenerate_data_error);
}

TEST_CASE("constant-in-time data collapses statistic_e to the pointwise statistic") {
  std::mt19937 gen(310);
  const Index n = 9;
  const Vector x = oracle::random_vector(gen, n);
  const Vector y = oracle::random_vector(gen, n);
  const Index T = 6;
  Matrix xs(n, T), ys(n, T);
  for (Index u = 0; u < T; ++u) {
    xs.col(u) = x;
    ys.col(u) = y;
  }
  const auto ds = oracle::make_dataset(ys, {xs}, TimeGrid::equispaced(T));
  const auto stats = mddcm::integrated_stats(ds, {0});
  const auto pointwise = mddcm::pointwise_statistic(x, y);
  REQUIRE(stats.e_value == Catch::Approx(pointwise.statistic).epsilon(1e-12));
}

TEST_CASE("integrated operations insist on complete data and valid subsets") {
  std::mt19937 gen(311);
  auto ds = oracle::random_dataset(gen, 6, 4, 2);
  REQUIRE_THROWS_AS(mddcm::integrated_stats(ds, {}), std::invalid_argument);
  REQUIRE_THROWS_AS(mddcm::integrated_stats(ds, {0, 0}), std::invalid_argument);
  REQUIRE_THROWS_AS(mddcm::integrated_stats(ds, {2}), std::invalid_argument);
  ds.response_missing(2, 1) = true;
  REQUIRE_THROWS_WITH(mddcm::integrated_stats(ds, {0}),
                      Catch::Matchers::ContainsSubstring("missing"));
}
