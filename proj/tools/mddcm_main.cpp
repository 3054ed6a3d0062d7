#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mddcm/dataset.hpp"
#include "mddcm/inference.hpp"
#include "mddcm/report.hpp"
#include "mddcm/simulate.hpp"

namespace {

using nlohmann::json;

// Exit codes: 0 success, 2 usage/validation, 3 I/O, 4 parse, 5 degenerate
// data, 6 internal.
enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kIo = 3,
  kParse = 4,
  kDegenerate = 5,
  kInternal = 6,
};

void emit_error(int code, const std::string& kind, const std::string& message) {
  const json err{{"error", {{"exit_code", code}, {"kind", kind}, {"message", message}}}};
  std::cerr << err.dump() << "\n";
}

std::uint64_t resolve_seed(std::uint64_t seed) {
  if (seed != 0) return seed;
  std::random_device entropy;
  std::uint64_t drawn = 0;
  while (drawn == 0)
    drawn = (static_cast<std::uint64_t>(entropy()) << 32) ^ entropy();
  return drawn;
}

mddcm::ConcurrentDataset load_dataset(const std::string& path, const std::string& response) {
  if (!std::filesystem::exists(path)) throw mddcm::io_error("input not found: " + path);
  if (std::filesystem::is_directory(path)) return mddcm::load_wide_csv(path, response);
  return mddcm::load_long_csv(path, response);
}

void write_document(const json& document, const std::string& output, const std::string& format) {
  std::string rendered =
      format == "text" ? mddcm::render_text(document) : document.dump(2) + "\n";
  if (output.empty()) {
    std::cout << rendered;
    return;
  }
  std::ofstream out(output, std::ios::binary);
  if (!out) throw mddcm::io_error("cannot write " + output);
  out << rendered;
}

struct CommonOptions {
  std::string output;
  std::string format = "json";
  std::uint64_t seed = 0;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--output,-o", opts.output, "Report file (default: stdout)");
  cmd->add_option("--format", opts.format, "Report format: json or text")
      ->check(CLI::IsMember({"json", "text"}));
  cmd->add_option("--seed", opts.seed,
                  "Master seed; 0 draws entropy and echoes the concrete value");
  cmd->add_option("--threads", opts.threads, "Worker cap; 0 = hardware concurrency");
}

mddcm::TimeGrid parse_grid(int grid_points) {
  if (grid_points < 2) throw std::invalid_argument("--grid: need at least 2 instants");
  return mddcm::TimeGrid::equispaced(grid_points);
}

std::pair<bool, bool> parse_effects(const std::string& effects) {
  const auto comma = effects.find(',');
  if (comma == std::string::npos)
    throw std::invalid_argument("--effects: expected two comma-separated 0/1 flags");
  auto to_flag = [](const std::string& s) {
    if (s == "0") return false;
    if (s == "1") return true;
    throw std::invalid_argument("--effects: flags must be 0 or 1");
  };
  return {to_flag(effects.substr(0, comma)), to_flag(effects.substr(comma + 1))};
}

int run_test(const std::string& data, const std::string& response,
             const std::vector<std::string>& covariates, bool partial, long long B,
             double alpha, const std::string& correction, const std::string& mode,
             const CommonOptions& common) {
  const auto start = std::chrono::steady_clock::now();
  if (B < 1) throw std::invalid_argument("--B: need at least 1 bootstrap replicate");
  const std::uint64_t seed = resolve_seed(common.seed);
  const auto ds = load_dataset(data, response);
  const auto multiplier_mode = mddcm::multiplier_mode_from_string(mode);

  mddcm::TestReport report;
  if (partial) {
    const auto stream_result = [](const mddcm::PerCovariateResult& r) {
      std::cerr << "partial: " << r.name << " raw p = " << r.p_value_raw << ", adjusted p = "
                << r.p_value_adjusted << "\n";
    };
    report = mddcm::partial_tests(ds, B, seed, mddcm::correction_from_string(correction), alpha,
                                  multiplier_mode, common.threads, stream_result);
  } else {
    const auto subset = mddcm::SubsetD::from_names(covariates, ds.covariate_names);
    report = mddcm::global_test(ds, subset, B, seed, multiplier_mode, common.threads, alpha);
  }

  json config{{"data", data},
              {"response", response},
              {"covariates", covariates.empty() ? std::vector<std::string>{"all"} : covariates},
              {"partial", partial},
              {"B", B},
              {"seed", seed},
              {"alpha", alpha},
              {"correction", correction},
              {"multiplier_mode", mode},
              {"threads", common.threads},
              {"output", common.output},
              {"format", common.format}};
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_document(mddcm::report_document("test", config, mddcm::to_json(report), wall),
                 common.output, common.format);
  return kOk;
}

int run_simulate(const std::string& scenario, long long n, int grid_points,
                 const std::string& effects, const std::string& out_dir,
                 const CommonOptions& common) {
  const std::uint64_t seed = resolve_seed(common.seed);
  mddcm::ScenarioConfig config;
  config.scenario = mddcm::scenario_from_string(scenario);
  config.n = n;
  config.grid = parse_grid(grid_points);
  std::tie(config.use_effect_1, config.use_effect_2) = parse_effects(effects);
  config.seed = seed;

  const auto ds = mddcm::generate_scenario(config);
  mddcm::save_wide_csv(ds, out_dir);

  const json provenance{{"schema_version", mddcm::kReportSchemaVersion},
                        {"tool", {{"name", mddcm::kToolName}, {"version", mddcm::kToolVersion}}},
                        {"command", "simulate"},
                        {"config",
                         {{"scenario", scenario},
                          {"n", n},
                          {"grid", grid_points},
                          {"effects", effects},
                          {"seed", seed},
                          {"out", out_dir}}}};
  std::ofstream prov(std::filesystem::path(out_dir) / "provenance.json", std::ios::binary);
  if (!prov) throw mddcm::io_error("cannot write provenance.json in " + out_dir);
  prov << provenance.dump(2) << "\n";
  return kOk;
}

int run_mc(const std::string& scenario, bool null_model, const std::string& effects,
           long long n, int grid_points, long long M, long long B, bool partial,
           const std::vector<double>& alphas, const std::string& mode,
           const CommonOptions& common) {
  const auto start = std::chrono::steady_clock::now();
  if (M < 1) throw std::invalid_argument("--M: need at least 1 replicate");
  if (B < 1) throw std::invalid_argument("--B: need at least 1 bootstrap replicate");
  const std::uint64_t seed = resolve_seed(common.seed);

  mddcm::McConfig config;
  config.scenario.scenario = mddcm::scenario_from_string(scenario);
  config.scenario.n = n;
  config.scenario.grid = parse_grid(grid_points);
  std::tie(config.scenario.use_effect_1, config.scenario.use_effect_2) =
      null_model ? std::pair<bool, bool>{false, false} : parse_effects(effects);
  config.scenario.seed = seed;
  config.test = partial ? mddcm::McTest::partial : mddcm::McTest::global;
  config.M = M;
  config.B = B;
  config.mode = mddcm::multiplier_mode_from_string(mode);
  if (!alphas.empty()) config.alpha_levels = alphas;
  config.workers = common.threads;
  config.progress = true;

  const auto result = mddcm::run_monte_carlo(config);

  json config_echo{{"scenario", scenario},
                   {"null", null_model},
                   {"effects", effects},
                   {"n", n},
                   {"grid", grid_points},
                   {"M", M},
                   {"B", B},
                   {"partial", partial},
                   {"alpha_levels", config.alpha_levels},
                   {"multiplier_mode", mode},
                   {"seed", seed},
                   {"threads", common.threads},
                   {"output", common.output},
                   {"format", common.format}};
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_document(mddcm::report_document("mc", config_echo, mddcm::to_json(result), wall),
                 common.output, common.format);
  return kOk;
}

int run_interpolate(const std::string& data, const std::string& response, const std::string& out,
                    bool allow_extrapolation) {
  const auto ds = load_dataset(data, response);
  const auto filled = mddcm::spline_fill(ds, allow_extrapolation);
  if (std::filesystem::is_directory(data)) {
    mddcm::save_wide_csv(filled, out);
  } else {
    mddcm::save_long_csv(filled, out);
  }
  for (const auto& note : filled.provenance) std::cerr << note << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MDD-based conditional mean independence tests for functional concurrent models"};
  app.require_subcommand(1);

  CommonOptions test_common, sim_common, mc_common;

  // test
  auto* test_cmd = app.add_subcommand("test", "Run the global or partial significance test");
  std::string test_data, test_response = "Y", test_correction = "bonferroni";
  std::string test_mode = "shared";
  std::vector<std::string> test_covariates;
  bool test_partial = false;
  long long test_B = 1000;
  double test_alpha = 0.05;
  test_cmd->add_option("--data", test_data, "Long CSV file or wide CSV directory")->required();
  test_cmd->add_option("--response", test_response, "Response variable name");
  test_cmd->add_option("--covariates,--subset", test_covariates,
                       "Covariate names to test, or 'all'");
  test_cmd->add_flag("--partial", test_partial, "Per-covariate partial tests");
  test_cmd->add_option("--B", test_B, "Bootstrap replicates");
  test_cmd->add_option("--alpha", test_alpha, "Significance level for reject flags");
  test_cmd->add_option("--correction", test_correction, "Multiplicity correction")
      ->check(CLI::IsMember({"bonferroni", "none"}));
  test_cmd->add_option("--multiplier-mode", test_mode, "Bootstrap multiplier scoping")
      ->check(CLI::IsMember({"per-instant", "shared"}));
  add_common(test_cmd, test_common);

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a scenario dataset as wide CSV");
  std::string sim_scenario = "A", sim_effects = "1,1", sim_out;
  long long sim_n = 20;
  int sim_grid = 25;
  sim_cmd->add_option("--scenario", sim_scenario, "A (linear) or B (nonlinear)")->required();
  sim_cmd->add_option("--n", sim_n, "Number of curves");
  sim_cmd->add_option("--grid", sim_grid, "Equispaced instants on [0,1]");
  sim_cmd->add_option("--effects", sim_effects, "Effect flags as '0/1,0/1'");
  sim_cmd->add_option("--out", sim_out, "Output directory")->required();
  add_common(sim_cmd, sim_common);

  // mc
  auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo size/power study on a scenario");
  std::string mc_scenario = "A", mc_effects = "1,1", mc_mode = "shared";
  bool mc_null = false, mc_partial = false;
  long long mc_n = 40, mc_M = 500, mc_B = 1000;
  int mc_grid = 25;
  std::vector<double> mc_alphas;
  mc_cmd->add_option("--scenario", mc_scenario, "A or B")->required();
  mc_cmd->add_flag("--null", mc_null, "Simulate under the null (both effects off)");
  mc_cmd->add_option("--effects", mc_effects, "Effect flags as '0/1,0/1'");
  mc_cmd->add_option("--n", mc_n, "Curves per replicate");
  mc_cmd->add_option("--grid", mc_grid, "Equispaced instants on [0,1]");
  mc_cmd->add_option("--M", mc_M, "Monte Carlo replicates");
  mc_cmd->add_option("--B", mc_B, "Bootstrap replicates per test");
  mc_cmd->add_flag("--partial", mc_partial, "Track per-covariate partial tests");
  mc_cmd->add_option("--alphas", mc_alphas, "Significance levels");
  mc_cmd->add_option("--multiplier-mode", mc_mode, "Bootstrap multiplier scoping")
      ->check(CLI::IsMember({"per-instant", "shared"}));
  add_common(mc_cmd, mc_common);

  // interpolate
  auto* interp_cmd =
      app.add_subcommand("interpolate", "Fill missing curve values by natural cubic splines");
  std::string interp_data, interp_response = "Y", interp_out;
  bool interp_extrapolate = false;
  interp_cmd->add_option("--data", interp_data, "Long CSV file or wide CSV directory")->required();
  interp_cmd->add_option("--response", interp_response, "Response variable name");
  interp_cmd->add_option("--out", interp_out, "Output file (long) or directory (wide)")
      ->required();
  interp_cmd->add_flag("--allow-extrapolation", interp_extrapolate,
                       "Clamped linear fill outside a curve's observed span");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kUsage;
  }

  try {
    if (test_cmd->parsed())
      return run_test(test_data, test_response, test_covariates, test_partial, test_B, test_alpha,
                      test_correction, test_mode, test_common);
    if (sim_cmd->parsed())
      return run_simulate(sim_scenario, sim_n, sim_grid, sim_effects, sim_out, sim_common);
    if (mc_cmd->parsed())
      return run_mc(mc_scenario, mc_null, mc_effects, mc_n, mc_grid, mc_M, mc_B, mc_partial,
                    mc_alphas, mc_mode, mc_common);
    if (interp_cmd->parsed())
      return run_interpolate(interp_data, interp_response, interp_out, interp_extrapolate);
    emit_error(kUsage, "usage", "no subcommand given");
    return kUsage;
  } catch (const mddcm::io_error& e) {
    emit_error(kIo, "io", e.what());
    return kIo;
  } catch (const mddcm::parse_error& e) {
    emit_error(kParse, "parse", e.what());
    return kParse;
  } catch (const mddcm::degenerate_data_error& e) {
    emit_error(kDegenerate, "degenerate_data", e.what());
    return kDegenerate;
  } catch (const std::invalid_argument& e) {
    emit_error(kUsage, "validation", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    emit_error(kInternal, "internal", e.what());
    return kInternal;
  }
}
