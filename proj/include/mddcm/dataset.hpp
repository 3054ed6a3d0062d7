#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mddcm/grid.hpp"
#include "mddcm/types.hpp"

namespace mddcm {

using BoolArray = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Response and covariate curves sampled on a shared time grid. Matrices are
/// n (curves) × T (instants); a true mask cell marks an unobserved value.
struct ConcurrentDataset {
  TimeGrid grid;
  std::vector<std::string> curve_ids;  // length n
  std::string response_name = "Y";
  Matrix response;  // n × T
  std::vector<std::string> covariate_names;
  std::vector<Matrix> covariates;  // p matrices, each n × T
  BoolArray response_missing;      // n × T
  std::vector<BoolArray> covariate_missing;
  std::vector<std::string> provenance;  // preprocessing notes (spline end condition, ...)

  Index n() const { return response.rows(); }
  Index num_instants() const { return grid.size(); }
  int p() const { return static_cast<int>(covariates.size()); }

  bool has_missing() const;
  /// Shape consistency across matrices, masks, labels, grid.
  void validate() const;
  /// n×d matrix of the subset's covariate values at instant u.
  Matrix covariate_columns_at(Index u, const std::vector<int>& subset) const;
};

// --- CSV interchange ---------------------------------------------------------
//
// Long format: header `curve_id,variable,time,value`, one observation per row.
// The variable whose name equals the response name (default "Y") is the
// response; the others become covariates in lexicographic order. The grid is
// the sorted union of observed times; absent (curve, variable, time)
// combinations are marked missing.
//
// Wide format: one `<variable>.csv` per variable in a directory; first header
// cell `curve_id`, remaining header cells the time values; one row per curve.
// Empty value cells are missing.
//
// Written files use LF line endings, rows sorted by (curve_id, time), and 17
// significant digits so values round-trip exactly.

ConcurrentDataset load_long_csv(const std::filesystem::path& file,
                                const std::string& response_name = "Y");
ConcurrentDataset load_wide_csv(const std::filesystem::path& dir,
                                const std::string& response_name = "Y");
void save_long_csv(const ConcurrentDataset& ds, const std::filesystem::path& file);
void save_wide_csv(const ConcurrentDataset& ds, const std::filesystem::path& dir);

/// Fill missing cells curve by curve with a natural cubic spline through the
/// observed (time, value) pairs. Observed cells are copied bit-for-bit.
/// Missing cells outside a curve's observed span are an error unless
/// extrapolation is enabled, in which case they are filled by clamped linear
/// extension of the boundary slope.
ConcurrentDataset spline_fill(const ConcurrentDataset& ds, bool allow_extrapolation = false);

/// Subtract the per-instant cross-curve mean from every variable. The MDD
/// statistics are translation invariant, so this never changes a test result.
ConcurrentDataset center_variables(const ConcurrentDataset& ds);

}  // namespace mddcm
