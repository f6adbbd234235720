#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "sotm/autotune.hpp"
#include "sotm/training.hpp"

namespace sotm {

inline constexpr int kModelFormatVersion = 1;

nlohmann::json model_to_json(const SotmModel& model);
/// Throws SchemaError naming the offending field.
SotmModel model_from_json(const nlohmann::json& doc);

std::string serialize_model(const SotmModel& model);
SotmModel parse_model(std::string_view text);
SotmModel load_model(const std::filesystem::path& path);

nlohmann::json tune_report_to_json(const TuneReport& report);
TuneReport tune_report_from_json(const nlohmann::json& doc);
std::string serialize_tune_report(const TuneReport& report);
TuneReport parse_tune_report(std::string_view text);

}  // namespace sotm
