#include "mddcm/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "mddcm/spline.hpp"

namespace mddcm {

namespace {

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& field, const std::string& where) {
  double out = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{} || ptr != end)
    throw parse_error(where + ": non-numeric field '" + field + "'");
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

std::vector<std::string> read_lines(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw io_error("cannot open " + file.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

Index grid_index(const Vector& instants, double t) {
  for (Index u = 0; u < instants.size(); ++u)
    if (instants(u) == t) return u;
  return -1;
}

}  // namespace

bool ConcurrentDataset::has_missing() const {
  if (response_missing.size() > 0 && response_missing.any()) return true;
  for (const auto& mask : covariate_missing)
    if (mask.size() > 0 && mask.any()) return true;
  return false;
}

void ConcurrentDataset::validate() const {
  const Index rows = response.rows();
  const Index cols = response.cols();
  if (grid.size() != cols) throw std::invalid_argument("dataset: grid/response width mismatch");
  if (static_cast<Index>(curve_ids.size()) != rows)
    throw std::invalid_argument("dataset: curve id count mismatch");
  if (covariates.size() != covariate_names.size())
    throw std::invalid_argument("dataset: covariate name count mismatch");
  for (const auto& x : covariates)
    if (x.rows() != rows || x.cols() != cols)
      throw std::invalid_argument("dataset: covariate shape mismatch");
  if (response_missing.size() > 0 &&
      (response_missing.rows() != rows || response_missing.cols() != cols))
    throw std::invalid_argument("dataset: response mask shape mismatch");
  if (!covariate_missing.empty() && covariate_missing.size() != covariates.size())
    throw std::invalid_argument("dataset: covariate mask count mismatch");
  for (const auto& mask : covariate_missing)
    if (mask.size() > 0 && (mask.rows() != rows || mask.cols() != cols))
      throw std::invalid_argument("dataset: covariate mask shape mismatch");
}

Matrix ConcurrentDataset::covariate_columns_at(Index u, const std::vector<int>& subset) const {
  Matrix out(n(), static_cast<Index>(subset.size()));
  for (std::size_t k = 0; k < subset.size(); ++k)
    out.col(static_cast<Index>(k)) = covariates[static_cast<std::size_t>(subset[k])].col(u);
  return out;
}

ConcurrentDataset load_long_csv(const std::filesystem::path& file,
                                const std::string& response_name) {
  const auto lines = read_lines(file);
  if (lines.empty()) throw parse_error(file.string() + ": empty file");
  if (split_csv_line(lines[0]) != std::vector<std::string>{"curve_id", "variable", "time", "value"})
    throw parse_error(file.string() + ": header must be exactly curve_id,variable,time,value");

  struct Record {
    std::string curve;
    std::string variable;
    double time;
    double value;
  };
  std::vector<Record> records;
  std::set<std::string> curves, variables;
  std::set<double> times;
  std::set<std::tuple<std::string, std::string, double>> seen;

  for (std::size_t row = 1; row < lines.size(); ++row) {
    if (lines[row].empty()) continue;
    const auto fields = split_csv_line(lines[row]);
    const std::string where = file.string() + ": row " + std::to_string(row + 1);
    if (fields.size() != 4) throw parse_error(where + ": expected 4 fields");
    Record rec{fields[0], fields[1], parse_double(fields[2], where), parse_double(fields[3], where)};
    if (!seen.insert({rec.curve, rec.variable, rec.time}).second)
      throw parse_error(where + ": duplicate record (" + rec.curve + "," + rec.variable + "," +
                        fields[2] + ")");
    curves.insert(rec.curve);
    variables.insert(rec.variable);
    times.insert(rec.time);
    records.push_back(std::move(rec));
  }

  if (!variables.count(response_name))
    throw parse_error(file.string() + ": no response variable '" + response_name + "' found");
  if (curves.size() < 4)
    throw parse_error(file.string() + ": fewer than 4 curves (" + std::to_string(curves.size()) +
                      ")");

  ConcurrentDataset ds;
  ds.response_name = response_name;
  ds.curve_ids.assign(curves.begin(), curves.end());
  Vector instants(static_cast<Index>(times.size()));
  Index u = 0;
  for (double t : times) instants(u++) = t;
  try {
    ds.grid = TimeGrid(std::move(instants));
  } catch (const std::invalid_argument& e) {
    throw parse_error(file.string() + ": invalid time grid: " + e.what());
  }

  std::map<std::string, Index> curve_row;
  for (std::size_t i = 0; i < ds.curve_ids.size(); ++i)
    curve_row[ds.curve_ids[i]] = static_cast<Index>(i);

  const Index n = static_cast<Index>(ds.curve_ids.size());
  const Index T = ds.grid.size();
  std::map<std::string, Index> var_col;
  for (const auto& v : variables) {
    if (v == response_name) continue;
    var_col[v] = static_cast<Index>(ds.covariate_names.size());
    ds.covariate_names.push_back(v);  // std::set iteration: lexicographic
    ds.covariates.push_back(Matrix::Zero(n, T));
    ds.covariate_missing.push_back(BoolArray::Constant(n, T, true));
  }
  ds.response = Matrix::Zero(n, T);
  ds.response_missing = BoolArray::Constant(n, T, true);

  for (const auto& rec : records) {
    const Index i = curve_row.at(rec.curve);
    const Index t = grid_index(ds.grid.instants, rec.time);
    if (rec.variable == response_name) {
      ds.response(i, t) = rec.value;
      ds.response_missing(i, t) = false;
    } else {
      const Index j = var_col.at(rec.variable);
      ds.covariates[static_cast<std::size_t>(j)](i, t) = rec.value;
      ds.covariate_missing[static_cast<std::size_t>(j)](i, t) = false;
    }
  }
  ds.validate();
  return ds;
}

ConcurrentDataset load_wide_csv(const std::filesystem::path& dir,
                                const std::string& response_name) {
  if (!std::filesystem::is_directory(dir))
    throw io_error(dir.string() + ": not a directory of per-variable CSV files");

  std::vector<std::string> variables;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".csv")
      variables.push_back(entry.path().stem().string());
  std::sort(variables.begin(), variables.end());
  if (std::find(variables.begin(), variables.end(), response_name) == variables.end())
    throw parse_error(dir.string() + ": no response file '" + response_name + ".csv'");

  struct Table {
    std::vector<double> times;
    std::vector<std::string> curves;
    std::map<std::string, std::vector<std::pair<bool, double>>> rows;  // present, value
  };

  auto read_table = [&](const std::string& variable) {
    const auto path = dir / (variable + ".csv");
    const auto lines = read_lines(path);
    if (lines.empty()) throw parse_error(path.string() + ": empty file");
    const auto header = split_csv_line(lines[0]);
    if (header.size() < 2 || header[0] != "curve_id")
      throw parse_error(path.string() + ": header must start with curve_id followed by times");
    Table table;
    for (std::size_t k = 1; k < header.size(); ++k)
      table.times.push_back(parse_double(header[k], path.string() + ": header"));
    for (std::size_t row = 1; row < lines.size(); ++row) {
      if (lines[row].empty()) continue;
      const auto fields = split_csv_line(lines[row]);
      const std::string where = path.string() + ": row " + std::to_string(row + 1);
      if (fields.size() != header.size())
        throw parse_error(where + ": expected " + std::to_string(header.size()) + " fields");
      std::vector<std::pair<bool, double>> values;
      for (std::size_t k = 1; k < fields.size(); ++k) {
        if (fields[k].empty())
          values.emplace_back(false, 0.0);
        else
          values.emplace_back(true, parse_double(fields[k], where));
      }
      if (table.rows.count(fields[0]))
        throw parse_error(where + ": duplicate curve_id '" + fields[0] + "'");
      table.curves.push_back(fields[0]);
      table.rows[fields[0]] = std::move(values);
    }
    return table;
  };

  const Table response_table = read_table(response_name);

  ConcurrentDataset ds;
  ds.response_name = response_name;
  ds.curve_ids = response_table.curves;
  std::sort(ds.curve_ids.begin(), ds.curve_ids.end());
  if (ds.curve_ids.size() < 4)
    throw parse_error(dir.string() + ": fewer than 4 curves");

  Vector instants(static_cast<Index>(response_table.times.size()));
  for (std::size_t k = 0; k < response_table.times.size(); ++k)
    instants(static_cast<Index>(k)) = response_table.times[k];
  try {
    ds.grid = TimeGrid(std::move(instants));
  } catch (const std::invalid_argument& e) {
    throw parse_error(dir.string() + ": invalid time grid: " + e.what());
  }

  const Index n = static_cast<Index>(ds.curve_ids.size());
  const Index T = ds.grid.size();

  auto fill_matrix = [&](const Table& table, Matrix& values, BoolArray& missing,
                         const std::string& variable) {
    if (table.times != response_table.times) {
      std::string detail;
      for (std::size_t k = 0; k < std::max(table.times.size(), response_table.times.size()); ++k) {
        const std::string a =
            k < response_table.times.size() ? format_value(response_table.times[k]) : "<none>";
        const std::string b = k < table.times.size() ? format_value(table.times[k]) : "<none>";
        if (a != b) detail += " [" + std::to_string(k) + ": " + a + " vs " + b + "]";
      }
      throw parse_error(dir.string() + ": grid of " + variable + ".csv differs from " +
                        response_name + ".csv:" + detail);
    }
    values = Matrix::Zero(n, T);
    missing = BoolArray::Constant(n, T, false);
    for (Index i = 0; i < n; ++i) {
      const auto it = table.rows.find(ds.curve_ids[static_cast<std::size_t>(i)]);
      if (it == table.rows.end())
        throw parse_error(dir.string() + ": " + variable + ".csv lacks curve '" +
                          ds.curve_ids[static_cast<std::size_t>(i)] + "'");
      for (Index t = 0; t < T; ++t) {
        const auto& cell = it->second[static_cast<std::size_t>(t)];
        missing(i, t) = !cell.first;
        values(i, t) = cell.second;
      }
    }
    if (static_cast<Index>(table.rows.size()) != n)
      throw parse_error(dir.string() + ": " + variable + ".csv has extra curves");
  };

  fill_matrix(response_table, ds.response, ds.response_missing, response_name);
  for (const auto& variable : variables) {
    if (variable == response_name) continue;
    ds.covariate_names.push_back(variable);
    ds.covariates.emplace_back();
    ds.covariate_missing.emplace_back();
    fill_matrix(read_table(variable), ds.covariates.back(), ds.covariate_missing.back(), variable);
  }
  ds.validate();
  return ds;
}

void save_long_csv(const ConcurrentDataset& ds, const std::filesystem::path& file) {
  ds.validate();
  std::ofstream out(file, std::ios::binary);  // binary: LF endings everywhere
  if (!out) throw io_error("cannot write " + file.string());
  out << "curve_id,variable,time,value\n";

  std::vector<std::size_t> order(ds.curve_ids.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return ds.curve_ids[a] < ds.curve_ids[b]; });

  const BoolArray no_mask;
  auto write_var = [&](std::size_t i, const std::string& variable, const Matrix& values,
                       const BoolArray& missing) {
    for (Index t = 0; t < ds.num_instants(); ++t) {
      if (missing.size() > 0 && missing(static_cast<Index>(i), t)) continue;
      out << ds.curve_ids[i] << ',' << variable << ',' << format_value(ds.grid.instants(t)) << ','
          << format_value(values(static_cast<Index>(i), t)) << '\n';
    }
  };
  for (std::size_t i : order) {
    write_var(i, ds.response_name, ds.response, ds.response_missing);
    for (std::size_t j = 0; j < ds.covariates.size(); ++j)
      write_var(i, ds.covariate_names[j], ds.covariates[j],
                ds.covariate_missing.empty() ? no_mask : ds.covariate_missing[j]);
  }
  if (!out) throw io_error("write failed: " + file.string());
}

void save_wide_csv(const ConcurrentDataset& ds, const std::filesystem::path& dir) {
  ds.validate();
  std::filesystem::create_directories(dir);

  std::vector<std::size_t> order(ds.curve_ids.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return ds.curve_ids[a] < ds.curve_ids[b]; });

  auto write_table = [&](const std::string& variable, const Matrix& values,
                         const BoolArray& missing) {
    const auto path = dir / (variable + ".csv");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write " + path.string());
    out << "curve_id";
    for (Index t = 0; t < ds.num_instants(); ++t)
      out << ',' << format_value(ds.grid.instants(t));
    out << '\n';
    for (std::size_t i : order) {
      out << ds.curve_ids[i];
      for (Index t = 0; t < ds.num_instants(); ++t) {
        out << ',';
        if (missing.size() == 0 || !missing(static_cast<Index>(i), t))
          out << format_value(values(static_cast<Index>(i), t));
      }
      out << '\n';
    }
    if (!out) throw io_error("write failed: " + path.string());
  };
  write_table(ds.response_name, ds.response, ds.response_missing);
  for (std::size_t j = 0; j < ds.covariates.size(); ++j)
    write_table(ds.covariate_names[j], ds.covariates[j],
                ds.covariate_missing.empty() ? BoolArray() : ds.covariate_missing[j]);
}

ConcurrentDataset spline_fill(const ConcurrentDataset& ds, bool allow_extrapolation) {
  ds.validate();
  ConcurrentDataset out = ds;
  bool filled_any = false;

  auto fill_variable = [&](const std::string& variable, Matrix& values, BoolArray& missing) {
    if (missing.size() == 0) return;
    for (Index i = 0; i < values.rows(); ++i) {
      Index observed = 0;
      for (Index t = 0; t < values.cols(); ++t)
        if (!missing(i, t)) ++observed;
      if (observed == values.cols()) continue;
      if (observed < 2)
        throw std::invalid_argument("spline_fill: curve '" + ds.curve_ids[static_cast<std::size_t>(i)] +
                                    "' of variable '" + variable + "' has " +
                                    std::to_string(observed) + " observation(s); need at least 2");
      Vector xs(observed), ys(observed);
      Index k = 0;
      for (Index t = 0; t < values.cols(); ++t) {
        if (missing(i, t)) continue;
        xs(k) = ds.grid.instants(t);
        ys(k) = values(i, t);
        ++k;
      }
      const NaturalCubicSpline spline(xs, ys);
      for (Index t = 0; t < values.cols(); ++t) {
        if (!missing(i, t)) continue;
        const double time = ds.grid.instants(t);
        if ((time < spline.x_front() || time > spline.x_back()) && !allow_extrapolation)
          throw std::invalid_argument(
              "spline_fill: curve '" + ds.curve_ids[static_cast<std::size_t>(i)] + "' of variable '" +
              variable + "' needs extrapolation at t = " + format_value(time) +
              " (enable extrapolation to allow clamped linear fill)");
        values(i, t) = spline(time);
        missing(i, t) = false;
        filled_any = true;
      }
    }
  };

  fill_variable(out.response_name, out.response, out.response_missing);
  if (!out.covariate_missing.empty())
    for (std::size_t j = 0; j < out.covariates.size(); ++j)
      fill_variable(out.covariate_names[j], out.covariates[j], out.covariate_missing[j]);

  if (filled_any) {
    out.provenance.push_back(std::string("spline_fill: natural cubic (zero second derivative at "
                                         "ends), extrapolation=") +
                             (allow_extrapolation ? "clamped-linear" : "off"));
  }
  return out;
}

ConcurrentDataset center_variables(const ConcurrentDataset& ds) {
  ds.validate();
  if (ds.has_missing())
    throw std::invalid_argument("center_variables: dataset has missing values");
  ConcurrentDataset out = ds;
  out.response.rowwise() -= out.response.colwise().mean();
  for (auto& x : out.covariates) x.rowwise() -= x.colwise().mean();
  return out;
}

}  // namespace mddcm
