#include "cli/commands.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cli/run_config.hpp"
#include "sotm/autotune.hpp"
#include "sotm/datacube.hpp"
#include "sotm/error.hpp"
#include "sotm/file_io.hpp"
#include "sotm/model_io.hpp"
#include "sotm/quality.hpp"
#include "sotm/training.hpp"
#include "sotm/viz.hpp"

namespace sotm::cli {

namespace fs = std::filesystem;

namespace {

/// Files written by one command. Unless committed, they are removed when the
/// command fails part-way.
class OutputSet {
 public:
  OutputSet() = default;
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;
  ~OutputSet() {
    if (committed_) return;
    for (const auto& p : written_) {
      std::error_code ignored;
      fs::remove(p, ignored);
    }
  }

  void write(const fs::path& path, std::string_view content) {
    write_file_atomic(path, content);
    written_.push_back(path);
  }

  void commit() { committed_ = true; }

 private:
  std::vector<fs::path> written_;
  bool committed_ = false;
};

/// Flag values as typed; applied on top of the config file.
struct Overrides {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> settings;
  bool verify = false;
};

void add_setting_option(CLI::App* cmd, Overrides& o, const std::string& flag, const std::string& key,
                        const std::string& help) {
  cmd->add_option_function<std::string>(
      flag, [&o, key](const std::string& v) { o.settings.emplace_back(key, v); }, help);
}

void add_run_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "key = value configuration file");
  add_setting_option(cmd, o, "--input", "input", "input CSV (entity,time[,weight],features...)");
  add_setting_option(cmd, o, "--out", "out", "output directory");
  add_setting_option(cmd, o, "--units", "units", "units per slice (M)");
  add_setting_option(cmd, o, "--steps", "steps", "training steps per slice (scalar or per-slice list)");
  add_setting_option(cmd, o, "--sigma", "sigma", "starting neighborhood radius (scalar or per-slice list)");
  add_setting_option(cmd, o, "--normalize", "normalize", "none | expanding | full");
  add_setting_option(cmd, o, "--decay", "decay", "constant | linear");
  add_setting_option(cmd, o, "--sigma-floor", "sigma_floor", "lower bound for the decayed radius");
  add_setting_option(cmd, o, "--pca-span", "pca_span", "PCA init extent in standard deviations");
  add_setting_option(cmd, o, "--weight-column", "weight_column", "name of the weight column");
}

RunConfig resolve(const Overrides& o) {
  RunConfig config;
  if (!o.config_path.empty()) {
    std::string text;
    try {
      text = read_file(o.config_path);
    } catch (const Error&) {
      throw Error("cannot read config file '" + o.config_path + "'");
    }
    for (const auto& [key, value] : parse_config_text(text)) apply_setting(config, key, value);
  }
  if (const char* seed = std::getenv("SOTM_SEED"); seed != nullptr && *seed != '\0') {
    apply_setting(config, "seed", seed);
  }
  for (const auto& [key, value] : o.settings) apply_setting(config, key, value);
  return config;
}

bool has_flag(const Overrides& o, const std::string& key) {
  for (const auto& [k, v] : o.settings) {
    if (k == key) return true;
  }
  return false;
}

DataCube load_cube(const RunConfig& config) {
  if (config.input.empty()) throw Error("no input file given (use --input)");
  if (!fs::exists(config.input)) throw Error("input file '" + config.input.string() + "' does not exist");
  DataCube cube = load_csv(config.input, config.schema);
  if (config.normalize == "none") return cube;
  return percentile_normalize(cube, parse_percentile_mode(config.normalize));
}

void prepare_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw WriteError("cannot create output directory '" + dir.string() + "'");
}

std::string metrics_text(const QualityReport& report) {
  std::ostringstream out;
  write_metrics_csv(report, out);
  return out.str();
}

int cmd_train(const Overrides& o, std::ostream& out) {
  if (has_flag(o, "grid")) throw ContractError("train takes a fixed --sigma; use `sotm tune` for a grid");
  RunConfig config = resolve(o);
  const DataCube cube = load_cube(config);
  SotmModel model = train_sotm(cube, config.train);
  model.normalization = config.normalize;
  const auto quality = aggregate(model, cube, config.metrics);

  prepare_out_dir(config.out);
  OutputSet outputs;
  outputs.write(config.out / "model.json", serialize_model(model));
  outputs.write(config.out / "metrics.csv", metrics_text(quality));
  outputs.write(config.out / "effective_config.txt", effective_config_text(config, "train"));
  outputs.commit();
  out << "trained " << model.slice_count() << " slices x " << model.units() << " units; wrote "
      << (config.out / "model.json").string() << '\n';
  return kExitOk;
}

int cmd_tune(const Overrides& o, std::ostream& out, std::ostream& err) {
  RunConfig config = resolve(o);
  if (has_flag(o, "sigma") && has_flag(o, "grid")) throw ContractError("give either --sigma or --grid, not both");
  if (has_flag(o, "sigma")) config.grid = config.train.sigma;
  const TuneGrid grid = config.grid ? TuneGrid{*config.grid} : TuneGrid::defaults(config.train.units);
  grid.validate();
  config.grid = grid.candidates;

  const DataCube cube = load_cube(config);
  auto result = auto_train(cube, config.train, grid, config.metrics);
  result.model.normalization = config.normalize;

  prepare_out_dir(config.out);
  const std::string model_text = serialize_model(result.model);
  const std::string tune_text = serialize_tune_report(result.tune);
  OutputSet outputs;
  outputs.write(config.out / "model.json", model_text);
  outputs.write(config.out / "metrics.csv", metrics_text(result.quality));
  outputs.write(config.out / "tune.json", tune_text);
  outputs.write(config.out / "effective_config.txt", effective_config_text(config, "tune"));
  outputs.commit();
  out << "tuned " << result.model.slice_count() << " slices over " << grid.candidates.size()
      << " candidates; wrote " << (config.out / "tune.json").string() << '\n';

  if (!o.verify) return kExitOk;
  // Re-check from the serialized artifacts, not the in-memory results.
  const SotmModel model = parse_model(model_text);
  const TuneReport report = parse_tune_report(tune_text);
  auto problems = verify_tune_report(model, cube, report, config.metrics);
  const auto quality = aggregate(model, cube, config.metrics);
  for (const auto& q : quality.per_slice) {
    if (q.kl < q.qe) problems.push_back("slice '" + q.time_key.label + "': kl below qe");
  }
  if (!problems.empty()) {
    for (const auto& p : problems) err << "verify: " << p << '\n';
    return kExitInternalError;
  }
  out << "verify: ok (" << report.per_slice.size() << " slices, grid optimality and kl >= qe hold)\n";
  return kExitOk;
}

int cmd_metrics(const Overrides& o, const std::string& model_path, std::ostream& out) {
  const SotmModel model = [&] {
    try {
      return load_model(model_path);
    } catch (const SchemaError& e) {
      throw SchemaError("invalid model file '" + model_path + "': " + e.what());
    }
  }();
  RunConfig config = resolve(o);
  if (!has_flag(o, "normalize")) config.normalize = model.normalization;
  const DataCube cube = load_cube(config);
  const auto quality = aggregate(model, cube, config.metrics);
  prepare_out_dir(config.out);
  OutputSet outputs;
  outputs.write(config.out / "metrics.csv", metrics_text(quality));
  outputs.commit();
  out << "wrote " << (config.out / "metrics.csv").string() << '\n';
  return kExitOk;
}

struct RenderArgs {
  std::string model_path;
  std::string what;
  std::string index;
  std::string out_path;
  std::string format = "svg";
  std::string title;
};

std::size_t parse_feature_index(const std::string& text, std::size_t d) {
  std::size_t k = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), k);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || k == 0 || k > d) {
    throw RangeError("feature index '" + text + "' out of range 1.." + std::to_string(d));
  }
  return k - 1;
}

int cmd_render(const RenderArgs& a, std::ostream& out) {
  if (a.out_path.empty()) throw Error("no output path given (use --out)");
  const SotmModel model = [&] {
    try {
      return load_model(a.model_path);
    } catch (const SchemaError& e) {
      throw SchemaError("invalid model file '" + a.model_path + "': " + e.what());
    }
  }();
  if (a.format != "svg" && a.format != "csv") throw ContractError("unknown format '" + a.format + "'");
  SvgLayout layout;
  layout.title = a.title;
  OutputSet outputs;

  if (a.what == "map") {
    const auto colors = unit_colors(model);
    outputs.write(a.out_path, render_map_svg(model, colors, layout));
  } else if (a.what == "topology") {
    std::ostringstream csv;
    write_topology_csv(model, project_units(model), csv);
    outputs.write(a.out_path, csv.str());
  } else if (a.what == "plane") {
    if (a.index.empty()) throw ContractError("render plane needs a feature index (1-based) or 'all'");
    auto emit = [&](std::size_t k, const fs::path& path) {
      const auto plane = feature_plane(model, k);
      if (a.format == "csv") {
        std::ostringstream csv;
        write_plane_csv(model, plane, csv);
        outputs.write(path, csv.str());
      } else {
        outputs.write(path, render_plane_svg(model, plane, layout));
      }
    };
    if (a.index == "all") {
      prepare_out_dir(a.out_path);
      for (std::size_t k = 0; k < model.dim(); ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "plane_%02zu.%s", k + 1, a.format.c_str());
        emit(k, fs::path(a.out_path) / name);
      }
    } else {
      emit(parse_feature_index(a.index, model.dim()), a.out_path);
    }
  } else {
    throw ContractError("unknown render target '" + a.what + "' (expected map, plane or topology)");
  }
  outputs.commit();
  out << "wrote " << a.out_path << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Self-organizing time maps: train, tune, evaluate and render"};
  app.require_subcommand(1);

  Overrides train_opts;
  auto* train = app.add_subcommand("train", "train a SOTM with a fixed radius schedule");
  add_run_options(train, train_opts);
  add_setting_option(train, train_opts, "--grid", "grid", "not accepted; see tune");

  Overrides tune_opts;
  auto* tune = app.add_subcommand("tune", "train with per-slice radius chosen by the Kaski-Lagus measure");
  add_run_options(tune, tune_opts);
  add_setting_option(tune, tune_opts, "--grid", "grid", "candidate radii, comma-separated");
  tune->add_flag("--verify", tune_opts.verify, "re-check grid optimality from the written files");

  Overrides metrics_opts;
  std::string metrics_model;
  auto* metrics = app.add_subcommand("metrics", "recompute quality measures for a saved model");
  metrics->add_option("--model", metrics_model, "model.json")->required();
  add_run_options(metrics, metrics_opts);

  RenderArgs render_args;
  auto* render = app.add_subcommand("render", "render a saved model as SVG or CSV");
  render->add_option("what", render_args.what, "map | plane | topology")->required();
  render->add_option("index", render_args.index, "feature index for plane (1-based) or 'all'");
  render->add_option("--model", render_args.model_path, "model.json")->required();
  render->add_option("--out", render_args.out_path, "output file (directory for 'plane all')")->required();
  render->add_option("--format", render_args.format, "svg | csv (plane only)");
  render->add_option("--title", render_args.title, "title text");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUserError;
  }

  try {
    if (*train) return cmd_train(train_opts, out);
    if (*tune) return cmd_tune(tune_opts, out, err);
    if (*metrics) return cmd_metrics(metrics_opts, metrics_model, out);
    if (*render) return cmd_render(render_args, out);
  } catch (const InvariantError& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternalError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUserError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternalError;
  }
  return kExitUserError;
}

}  // namespace sotm::cli
