#include "sotm/model_io.hpp"

#include <cmath>

#include "sotm/error.hpp"
#include "sotm/file_io.hpp"

namespace sotm {

using nlohmann::json;

namespace {

const json& field(const json& doc, const char* name) {
  if (!doc.is_object()) throw SchemaError("expected a JSON object");
  auto it = doc.find(name);
  if (it == doc.end()) throw SchemaError(std::string("missing field '") + name + "'");
  return *it;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw SchemaError("field '" + where + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw SchemaError("field '" + where + "' must be finite");
  return x;
}

std::size_t count(const json& v, const std::string& where) {
  if (!v.is_number_unsigned()) throw SchemaError("field '" + where + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

std::vector<double> numbers(const json& v, const std::string& where) {
  if (!v.is_array()) throw SchemaError("field '" + where + "' must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(number(x, where));
  return out;
}

json config_to_json(const TrainConfig& c) {
  return {{"units", c.units},
          {"steps", c.steps},
          {"sigma", c.sigma},
          {"decay", to_string(c.decay)},
          {"sigma_floor", c.sigma_floor},
          {"pca_span", c.pca_span},
          {"seed", c.seed}};
}

TrainConfig config_from_json(const json& doc) {
  TrainConfig c;
  c.units = count(field(doc, "units"), "config.units");
  const auto& steps = field(doc, "steps");
  if (!steps.is_array()) throw SchemaError("field 'config.steps' must be an array");
  c.steps.clear();
  for (const auto& s : steps) {
    if (!s.is_number_integer()) throw SchemaError("field 'config.steps' must hold integers");
    c.steps.push_back(s.get<int>());
  }
  c.sigma = numbers(field(doc, "sigma"), "config.sigma");
  const auto& decay = field(doc, "decay");
  if (!decay.is_string()) throw SchemaError("field 'config.decay' must be a string");
  try {
    c.decay = parse_sigma_decay(decay.get<std::string>());
  } catch (const ContractError& e) {
    throw SchemaError(std::string("field 'config.decay': ") + e.what());
  }
  c.sigma_floor = number(field(doc, "sigma_floor"), "config.sigma_floor");
  c.pca_span = number(field(doc, "pca_span"), "config.pca_span");
  const auto& seed = field(doc, "seed");
  if (!seed.is_number_unsigned()) throw SchemaError("field 'config.seed' must be a non-negative integer");
  c.seed = seed.get<std::uint64_t>();
  return c;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

json model_to_json(const SotmModel& model) {
  json keys = json::array();
  for (const auto& k : model.time_keys) keys.push_back(k.label);
  json arrays = json::array();
  for (const auto& a : model.arrays) {
    json units = json::array();
    for (std::size_t i = 0; i < a.units(); ++i) units.push_back(std::vector<double>(a.unit(i).begin(), a.unit(i).end()));
    arrays.push_back(std::move(units));
  }
  return {{"version", kModelFormatVersion},
          {"M", model.units()},
          {"d", model.dim()},
          {"T", model.slice_count()},
          {"time_keys", std::move(keys)},
          {"feature_names", model.feature_names},
          {"sigma_chosen", model.sigma_chosen},
          {"sigma_final", model.sigma_final},
          {"normalization", model.normalization},
          {"config", config_to_json(model.config)},
          {"arrays", std::move(arrays)}};
}

SotmModel model_from_json(const json& doc) {
  const auto& version = field(doc, "version");
  if (!version.is_number_integer() || version.get<int>() != kModelFormatVersion) {
    throw SchemaError("unsupported model version (expected " + std::to_string(kModelFormatVersion) + ")");
  }
  const std::size_t M = count(field(doc, "M"), "M");
  const std::size_t d = count(field(doc, "d"), "d");
  const std::size_t T = count(field(doc, "T"), "T");
  if (M < 2) throw SchemaError("field 'M' must be at least 2");
  if (d < 1) throw SchemaError("field 'd' must be at least 1");
  if (T < 1) throw SchemaError("field 'T' must be at least 1");

  SotmModel model;
  const auto& keys = field(doc, "time_keys");
  if (!keys.is_array() || keys.size() != T) throw SchemaError("field 'time_keys' must hold T strings");
  bool saw_integer = false;
  bool saw_text = false;
  for (const auto& k : keys) {
    if (!k.is_string()) throw SchemaError("field 'time_keys' must hold strings");
    model.time_keys.push_back(TimeKey::parse(k.get<std::string>()));
    (model.time_keys.back().is_integer() ? saw_integer : saw_text) = true;
  }
  if (saw_integer && saw_text) throw SchemaError("field 'time_keys' mixes integer and text keys");

  const auto& names = field(doc, "feature_names");
  if (!names.is_array() || names.size() != d) throw SchemaError("field 'feature_names' must hold d strings");
  for (const auto& n : names) {
    if (!n.is_string()) throw SchemaError("field 'feature_names' must hold strings");
    model.feature_names.push_back(n.get<std::string>());
  }

  model.sigma_chosen = numbers(field(doc, "sigma_chosen"), "sigma_chosen");
  if (model.sigma_chosen.size() != T) throw SchemaError("field 'sigma_chosen' must hold T numbers");
  if (doc.contains("sigma_final")) {
    model.sigma_final = numbers(doc["sigma_final"], "sigma_final");
    if (model.sigma_final.size() != T) throw SchemaError("field 'sigma_final' must hold T numbers");
  } else {
    model.sigma_final = model.sigma_chosen;
  }
  if (doc.contains("normalization")) {
    if (!doc["normalization"].is_string()) throw SchemaError("field 'normalization' must be a string");
    model.normalization = doc["normalization"].get<std::string>();
  }
  if (doc.contains("config")) {
    model.config = config_from_json(doc["config"]);
  } else {
    model.config.units = M;
    model.config.sigma = model.sigma_chosen;
  }
  if (model.config.units != M) throw SchemaError("field 'config.units' disagrees with 'M'");

  const auto& arrays = field(doc, "arrays");
  if (!arrays.is_array() || arrays.size() != T) throw SchemaError("field 'arrays' must hold T arrays");
  for (std::size_t t = 0; t < T; ++t) {
    const auto& units = arrays[t];
    const std::string where = "arrays[" + std::to_string(t) + "]";
    if (!units.is_array() || units.size() != M) throw SchemaError("field '" + where + "' must hold M units");
    std::vector<double> values;
    values.reserve(M * d);
    for (std::size_t i = 0; i < M; ++i) {
      const auto unit = numbers(units[i], where + "[" + std::to_string(i) + "]");
      if (unit.size() != d) {
        throw SchemaError("field '" + where + "[" + std::to_string(i) + "]' must hold d numbers");
      }
      values.insert(values.end(), unit.begin(), unit.end());
    }
    model.arrays.emplace_back(M, d, std::move(values));
  }
  model.validate();
  return model;
}

std::string serialize_model(const SotmModel& model) {
  return model_to_json(model).dump(1) + "\n";
}

SotmModel parse_model(std::string_view text) { return model_from_json(parse_json(text)); }

SotmModel load_model(const std::filesystem::path& path) { return parse_model(read_file(path)); }

json tune_report_to_json(const TuneReport& report) {
  json slices = json::array();
  for (const auto& s : report.per_slice) {
    json candidates = json::array();
    for (const auto& c : s.kl_by_candidate) candidates.push_back({{"sigma", c.sigma}, {"kl", c.kl}});
    slices.push_back({{"time_key", s.time_key.label},
                      {"chosen_sigma", s.chosen_sigma},
                      {"kl_by_candidate", std::move(candidates)}});
  }
  return {{"per_slice", std::move(slices)}};
}

TuneReport tune_report_from_json(const json& doc) {
  TuneReport report;
  const auto& slices = field(doc, "per_slice");
  if (!slices.is_array()) throw SchemaError("field 'per_slice' must be an array");
  for (const auto& s : slices) {
    SliceTune entry;
    const auto& key = field(s, "time_key");
    if (!key.is_string()) throw SchemaError("field 'time_key' must be a string");
    entry.time_key = TimeKey::parse(key.get<std::string>());
    entry.chosen_sigma = number(field(s, "chosen_sigma"), "chosen_sigma");
    const auto& candidates = field(s, "kl_by_candidate");
    if (!candidates.is_array()) throw SchemaError("field 'kl_by_candidate' must be an array");
    for (const auto& c : candidates) {
      entry.kl_by_candidate.push_back(
          {number(field(c, "sigma"), "kl_by_candidate.sigma"), number(field(c, "kl"), "kl_by_candidate.kl")});
    }
    report.per_slice.push_back(std::move(entry));
  }
  return report;
}

std::string serialize_tune_report(const TuneReport& report) {
  return tune_report_to_json(report).dump(1) + "\n";
}

TuneReport parse_tune_report(std::string_view text) { return tune_report_from_json(parse_json(text)); }

}  // namespace sotm
