#pragma once

#include <string>

#include <json.hpp>

#include "mddcm/inference.hpp"
#include "mddcm/simulate.hpp"

namespace mddcm {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kToolName = "mddcm";
inline constexpr const char* kToolVersion = "0.1.0";

/// Payload objects. Covariate indices are reported 1-based; NaN statistics
/// (partial-mode top level) serialize as null. The payload of a report is a
/// pure function of (data, config): timing lives outside it.
nlohmann::json to_json(const TestReport& report);
nlohmann::json to_json(const McResult& result);

/// Full report document: schema/tool identification, the effective
/// configuration echo, the payload, and wall-clock timing.
nlohmann::json report_document(const std::string& command, const nlohmann::json& config_echo,
                               const nlohmann::json& payload, double wall_seconds);

std::string render_text(const nlohmann::json& document);

}  // namespace mddcm
