#pragma once

#include <cmath>

#include "mddcm/types.hpp"

namespace mddcm {

/// Strictly increasing observation instants t_1 < ... < t_T.
struct TimeGrid {
  Vector instants;

  TimeGrid() = default;
  explicit TimeGrid(Vector t) : instants(std::move(t)) {
    if (instants.size() < 2) throw std::invalid_argument("TimeGrid: need at least 2 instants");
    for (Index u = 0; u < instants.size(); ++u) {
      if (!std::isfinite(instants(u)))
        throw std::invalid_argument("TimeGrid: non-finite instant at index " + std::to_string(u));
      if (u > 0 && instants(u) <= instants(u - 1))
        throw std::invalid_argument("TimeGrid: instants must be strictly increasing (index " +
                                    std::to_string(u) + ")");
    }
  }

  static TimeGrid equispaced(Index count, double lo = 0.0, double hi = 1.0) {
    return TimeGrid(Vector::LinSpaced(count, lo, hi));
  }

  Index size() const { return instants.size(); }
};

/// Composite trapezoid rule on the (possibly non-uniform) grid. Exact for
/// piecewise-linear integrands.
inline double integrate_on_grid(const Eigen::Ref<const Vector>& values, const TimeGrid& grid) {
  if (values.size() != grid.size())
    throw std::invalid_argument("integrate_on_grid: length mismatch");
  double total = 0.0;
  for (Index u = 0; u + 1 < grid.size(); ++u)
    total += (grid.instants(u + 1) - grid.instants(u)) * (values(u) + values(u + 1)) * 0.5;
  return total;
}

}  // namespace mddcm
