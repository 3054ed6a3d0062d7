#include "mddcm/pointwise.hpp"

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>

#include "mddcm/centering.hpp"

namespace mddcm {

double cn_factor(Index n) {
  if (n < 4) throw std::invalid_argument("cn_factor: need n >= 4");
  const double n1 = static_cast<double>(n - 1);
  const double n2 = static_cast<double>(n - 2);
  const double n3 = static_cast<double>(n - 3);
  const double n1_4 = n1 * n1 * n1 * n1;
  const double n2_3 = n2 * n2 * n2;
  const double n3_4 = n3 * n3 * n3 * n3;
  return n3_4 / n1_4 + 2.0 * n3_4 / (n1_4 * n2_3) + 2.0 * n3 / (n1_4 * n2_3);
}

MddValue mdd_unbiased(const CenteredMatrix& a, const CenteredMatrix& b) {
  const Index n = a.rows();
  if (n != a.cols() || n != b.rows() || n != b.cols())
    throw std::invalid_argument("mdd_unbiased: dimension mismatch");
  if (n < 4) throw std::invalid_argument("mdd_unbiased: need n >= 4");
  // Diagonals are zero by the CenteredMatrix convention, so the full sum
  // equals the i != l sum.
  const double dot = (a.array() * b.array()).sum();
  return MddValue{dot / (static_cast<double>(n) * static_cast<double>(n - 3)), n};
}

namespace {

// Kernel of the order-four U-statistic over one quadruple, written exactly as
// the symmetric form:
//   h = (1/6) Σ_{s<w, u<v} (A_sw B_uv + A_sw B_sw) - (1/12) Σ_{(s,w,u)} A_sw B_su
// where (s,w) and (u,v) range over the complementary pair splits of the
// quadruple and (s,w,u) over its ordered distinct triples.
double quadruple_kernel(const Matrix& a, const Matrix& b, Index i, Index l, Index q, Index r) {
  const std::array<Index, 4> idx{i, l, q, r};

  // Three splits of {i,l,q,r} into complementary pairs.
  static constexpr int splits[3][4] = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}};
  double cross = 0.0;  // Σ A_sw B_uv over complementary pairs (both orders)
  double diag = 0.0;   // Σ_{s<w} A_sw B_sw over the six pairs
  for (const auto& s : splits) {
    const Index p1a = idx[s[0]], p1b = idx[s[1]], p2a = idx[s[2]], p2b = idx[s[3]];
    cross += a(p1a, p1b) * b(p2a, p2b) + a(p2a, p2b) * b(p1a, p1b);
    diag += a(p1a, p1b) * b(p1a, p1b) + a(p2a, p2b) * b(p2a, p2b);
  }

  double triple = 0.0;  // Σ A_sw B_su over ordered distinct triples (s,w,u)
  for (int s = 0; s < 4; ++s)
    for (int w = 0; w < 4; ++w) {
      if (w == s) continue;
      for (int u = 0; u < 4; ++u) {
        if (u == s || u == w) continue;
        triple += a(idx[s], idx[w]) * b(idx[s], idx[u]);
      }
    }

  return (cross + diag) / 6.0 - triple / 12.0;
}

}  // namespace

namespace {
std::atomic<std::uint64_t> oracle_calls{0};
}  // namespace

std::uint64_t mdd_oracle_invocations() { return oracle_calls.load(); }

MddValue mdd_oracle(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y) {
  oracle_calls.fetch_add(1, std::memory_order_relaxed);
  const Index n = x.size();
  if (n != y.size()) throw std::invalid_argument("mdd_oracle: dimension mismatch");
  if (n < 4) throw std::invalid_argument("mdd_oracle: need n >= 4");

  const Matrix a = pairwise_abs_distance(x);
  const Matrix b = half_squared_distance(y);

  double sum = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index l = i + 1; l < n; ++l)
      for (Index q = l + 1; q < n; ++q)
        for (Index r = q + 1; r < n; ++r) sum += quadruple_kernel(a, b, i, l, q, r);

  const double quadruples = static_cast<double>(n) * static_cast<double>(n - 1) *
                            static_cast<double>(n - 2) * static_cast<double>(n - 3) / 24.0;
  return MddValue{sum / quadruples, n};
}

double pointwise_variance(const std::vector<CenteredMatrix>& a_list, const CenteredMatrix& b) {
  if (a_list.empty()) throw std::invalid_argument("pointwise_variance: empty covariate set");
  const Index n = b.rows();
  if (n != b.cols()) throw std::invalid_argument("pointwise_variance: b must be square");
  if (n < 4) throw std::invalid_argument("pointwise_variance: need n >= 4");

  Matrix a_sum = Matrix::Zero(n, n);
  for (const auto& a : a_list) {
    if (a.rows() != n || a.cols() != n)
      throw std::invalid_argument("pointwise_variance: dimension mismatch");
    a_sum += a;
  }
  // Σ_{j,j'} ā_j ā_j' = (Σ_j ā_j)², so the l<q double sum is half the full
  // elementwise-square sum (zero diagonal).
  const double full = (a_sum.array() * b.array()).square().sum();
  return full / (static_cast<double>(n) * static_cast<double>(n - 1) * cn_factor(n));
}

namespace detail {

InstantTerms instant_terms(const Eigen::Ref<const Matrix>& x_at_t,
                           const Eigen::Ref<const Vector>& y_at_t) {
  const Index n = y_at_t.size();
  const Index d = x_at_t.cols();
  if (x_at_t.rows() != n) throw std::invalid_argument("instant_terms: dimension mismatch");
  if (n < 4) throw std::invalid_argument("instant_terms: need n >= 4");
  if (d < 1) throw std::invalid_argument("instant_terms: empty covariate set");

  InstantTerms out;
  const Matrix b_bar = u_center(half_squared_distance(y_at_t));
  const double n_n3 = static_cast<double>(n) * static_cast<double>(n - 3);

  out.mdd.resize(d);
  Matrix a_sum = Matrix::Zero(n, n);
  for (Index j = 0; j < d; ++j) {
    const Matrix a_bar = u_center(pairwise_abs_distance(x_at_t.col(j)));
    out.mdd(j) = (a_bar.array() * b_bar.array()).sum() / n_n3;
    a_sum += a_bar;
  }

  out.pair_sum = a_sum.array() * b_bar.array();
  out.pair_sum_sq = out.pair_sum.array().square();
  out.numerator = std::sqrt(choose2(n)) * out.mdd.sum();
  out.variance = out.pair_sum_sq.sum() /
                 (static_cast<double>(n) * static_cast<double>(n - 1) * cn_factor(n));
  return out;
}

}  // namespace detail

PointwiseStat pointwise_statistic(const Eigen::Ref<const Matrix>& x_at_t,
                                  const Eigen::Ref<const Vector>& y_at_t) {
  const detail::InstantTerms terms = detail::instant_terms(x_at_t, y_at_t);
  if (terms.variance <= 0.0)
    throw degenerate_data_error(
        "pointwise_statistic: zero variance estimate (constant response or covariates at this "
        "instant)");
  return PointwiseStat{terms.numerator, terms.variance,
                       terms.numerator / std::sqrt(terms.variance)};
}

}  // namespace mddcm
