#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace mddcm {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Pairwise matrices (|x_i - x_l|, (y_i - y_l)^2/2) and their U-centered
// versions are plain dense matrices. The producing functions guarantee the
// invariants: symmetry, zero diagonal, and (after centering) off-diagonal
// row sums equal to zero.
using PairwiseMatrix = Matrix;
using CenteredMatrix = Matrix;

/// The data cannot support the requested statistic (constant column at some
/// instant, zero bootstrap variance, ...).
class degenerate_data_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file contents.
class parse_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Filesystem-level failure (missing file, unwritable output, ...).
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mddcm
