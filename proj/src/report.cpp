#include "mddcm/report.hpp"

#include <cmath>
#include <sstream>

namespace mddcm {

namespace {

nlohmann::json number_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

}  // namespace

nlohmann::json to_json(const TestReport& report) {
  nlohmann::json subset = nlohmann::json::object();
  nlohmann::json indices = nlohmann::json::array();
  for (int j : report.subset) indices.push_back(j + 1);
  subset["indices"] = indices;
  subset["names"] = report.subset_names;

  nlohmann::json out{
      {"kind", "test_report"},
      {"subset", subset},
      {"statistic_e", number_or_null(report.statistic_e)},
      {"statistic_td", number_or_null(report.statistic_td)},
      {"integrated_variance", number_or_null(report.integrated_variance)},
      {"p_value", report.p_value},
      {"asymptotic",
       {{"p_value", number_or_null(report.p_value_asymptotic)}, {"note", report.asymptotic_note}}},
      {"B", report.B},
      {"seed", report.seed},
      {"multiplier_mode", to_string(report.multiplier_mode)},
      {"n", report.n},
      {"p", report.p},
      {"num_instants", report.num_instants},
      {"alpha", report.alpha},
      {"correction", to_string(report.correction)},
  };
  if (report.integrated_mdd.size() > 0) {
    nlohmann::json mdd = nlohmann::json::array();
    for (Index k = 0; k < report.integrated_mdd.size(); ++k)
      mdd.push_back(report.integrated_mdd(k));
    out["integrated_mdd"] = mdd;
  } else {
    out["integrated_mdd"] = nullptr;
  }
  if (!report.per_covariate.empty()) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& r : report.per_covariate) {
      list.push_back({{"index", r.index + 1},
                      {"name", r.name},
                      {"statistic_e", r.statistic_e},
                      {"statistic_td", r.statistic_td},
                      {"p_value_raw", r.p_value_raw},
                      {"p_value_adjusted", r.p_value_adjusted},
                      {"reject_at_alpha", r.reject_at_alpha},
                      {"seed", r.seed}});
    }
    out["per_covariate"] = list;
  }
  return out;
}

nlohmann::json to_json(const McResult& result) {
  nlohmann::json rates = nlohmann::json::array();
  nlohmann::json within = nlohmann::json::array();
  for (Index k = 0; k < result.rejection_rates.rows(); ++k) {
    nlohmann::json row = nlohmann::json::array();
    nlohmann::json wrow = nlohmann::json::array();
    for (Index a = 0; a < result.rejection_rates.cols(); ++a) {
      row.push_back(result.rejection_rates(k, a));
      wrow.push_back(
          static_cast<bool>(result.within_ci[static_cast<std::size_t>(k)][static_cast<std::size_t>(a)]));
    }
    rates.push_back(row);
    within.push_back(wrow);
  }
  nlohmann::json ci = nlohmann::json::array();
  for (const auto& [lo, hi] : result.ci) ci.push_back({lo, hi});
  nlohmann::json p_values = nlohmann::json::array();
  for (Index r = 0; r < result.p_values.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Index k = 0; k < result.p_values.cols(); ++k) row.push_back(result.p_values(r, k));
    p_values.push_back(row);
  }
  // runtime is reported in the document timing block, not here: the payload
  // must be reproducible bit-for-bit from the configuration.
  return nlohmann::json{{"kind", "mc_result"},
                        {"M", result.M},
                        {"alpha_levels", result.alpha_levels},
                        {"test_labels", result.test_labels},
                        {"rejection_rates", rates},
                        {"ci_bounds", ci},
                        {"within_ci", within},
                        {"p_values", p_values}};
}

nlohmann::json report_document(const std::string& command, const nlohmann::json& config_echo,
                               const nlohmann::json& payload, double wall_seconds) {
  return nlohmann::json{{"schema_version", kReportSchemaVersion},
                        {"tool", {{"name", kToolName}, {"version", kToolVersion}}},
                        {"command", command},
                        {"config", config_echo},
                        {"payload", payload},
                        {"timing", {{"wall_seconds", wall_seconds}}}};
}

std::string render_text(const nlohmann::json& document) {
  std::ostringstream out;
  out << kToolName << " " << document["command"].get<std::string>() << " report\n";
  const auto& payload = document["payload"];
  const std::string kind = payload["kind"].get<std::string>();
  if (kind == "test_report") {
    out << "  subset:";
    for (const auto& name : payload["subset"]["names"]) out << " " << name.get<std::string>();
    out << "\n";
    if (!payload["statistic_e"].is_null())
      out << "  statistic E  = " << payload["statistic_e"].get<double>() << "\n"
          << "  statistic Td = " << payload["statistic_td"].get<double>() << " (asymptotic p = "
          << payload["asymptotic"]["p_value"].get<double>() << ", diagnostic)\n";
    out << "  bootstrap p-value = " << payload["p_value"].get<double>() << "  (B = "
        << payload["B"].get<long long>() << ", seed = " << payload["seed"].get<unsigned long long>()
        << ", multipliers " << payload["multiplier_mode"].get<std::string>() << ")\n";
    if (payload.contains("per_covariate")) {
      out << "  per-covariate tests (correction: " << payload["correction"].get<std::string>()
          << ", alpha = " << payload["alpha"].get<double>() << "):\n";
      for (const auto& r : payload["per_covariate"])
        out << "    " << r["name"].get<std::string>() << ": raw p = "
            << r["p_value_raw"].get<double>() << ", adjusted p = "
            << r["p_value_adjusted"].get<double>()
            << (r["reject_at_alpha"].get<bool>() ? "  [reject]" : "  [keep]") << "\n";
    }
  } else if (kind == "mc_result") {
    out << "  M = " << payload["M"].get<long long>() << " replicates\n";
    const auto& labels = payload["test_labels"];
    const auto& levels = payload["alpha_levels"];
    for (std::size_t k = 0; k < labels.size(); ++k) {
      out << "  " << labels[k].get<std::string>() << ":";
      for (std::size_t a = 0; a < levels.size(); ++a) {
        out << "  " << levels[a].get<double>() << " -> "
            << payload["rejection_rates"][k][a].get<double>();
        out << (payload["within_ci"][k][a].get<bool>() ? " (in CI)" : " (out of CI)");
      }
      out << "\n";
    }
  }
  out << "  wall seconds: " << document["timing"]["wall_seconds"].get<double>() << "\n";
  return out.str();
}

}  // namespace mddcm
