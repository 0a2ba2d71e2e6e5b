// SPDX-License-Identifier: Apache-2.0
#pragma once

// Command-line front end. Exit codes: 0 success, 1 runtime or I/O failure,
// 2 usage error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mmwpl/mmwpl.hpp"

namespace mmwpl::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Environment variable naming a directory whose scenario.conf replaces the
/// bundled defaults.
inline constexpr const char* kConfigDirEnv = "MMWPL_CONFIG_DIR";

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ------------------------------------------------------------ simulate ----

struct SimulateOptions {
  std::string config;
  std::string manifest;
  std::string out;
  std::vector<std::string> seasons;
  std::vector<double> freqs;
  std::optional<double> dist_min, dist_max;
  std::optional<int> dist_steps, drops, paths_min, paths_max;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
};

inline config::Document scenario_document(const std::string& explicit_path) {
  if (!explicit_path.empty()) return config::parse_file(explicit_path);
  if (const char* dir = std::getenv(kConfigDirEnv); dir && *dir) {
    const fs::path p = fs::path(dir) / "scenario.conf";
    if (fs::exists(p)) return config::parse_file(p.string());
  }
  return config::parse_string(std::string(kDefaultConfig));
}

inline ScenarioConfig resolve_scenario(const SimulateOptions& o) {
  ScenarioConfig cfg;
  if (!o.manifest.empty()) {
    const auto m = read_manifest(o.manifest);
    if (m.value("command", "") != "simulate") throw UsageError("manifest '" + o.manifest + "' is not a simulate run");
    cfg = load_scenario(config::parse_string(m.at("config").get<std::string>()));
  } else {
    cfg = load_scenario(scenario_document(o.config));
  }
  if (!o.seasons.empty()) {
    cfg.seasons.clear();
    for (const auto& s : o.seasons) {
      auto season = parse_season(s);
      if (!season) throw UsageError("unknown season '" + s + "' (expected Spring, Summer, Fall, Winter)");
      cfg.seasons.push_back(*season);
    }
  }
  if (!o.freqs.empty()) cfg.frequencies = o.freqs;
  if (o.dist_min) cfg.dist_min = *o.dist_min;
  if (o.dist_max) cfg.dist_max = *o.dist_max;
  if (o.dist_steps) cfg.dist_steps = *o.dist_steps;
  if (o.drops) cfg.drops = *o.drops;
  if (o.paths_min) cfg.channel.multipath.min_paths = *o.paths_min;
  if (o.paths_max) cfg.channel.multipath.max_paths = *o.paths_max;
  if (o.seed) cfg.seed = *o.seed;

  if (cfg.dist_min < 1.0 || cfg.dist_max < cfg.dist_min) throw UsageError("require 1 <= --dist-min <= --dist-max");
  if (cfg.dist_steps < 1 || cfg.drops < 1) throw UsageError("--dist-steps and --drops must be >= 1");
  const auto& mp = cfg.channel.multipath;
  if (mp.min_paths < 1 || mp.max_paths < mp.min_paths) throw UsageError("require 1 <= --paths-min <= --paths-max");
  for (double f : cfg.frequencies) {
    try {
      (void)cfg.atmosphere.coefficients.lookup(f);
    } catch (const UnsupportedFrequencyError&) {
      throw UsageError("frequency " + detail::shortest(f) + " GHz has no attenuation coefficients in the configuration");
    }
  }
  return cfg;
}

inline int run_simulate(const SimulateOptions& o, std::ostream& out) {
  const ScenarioConfig cfg = resolve_scenario(o);
  fs::create_directories(o.out);
  const auto records = sweep_scenario(cfg, o.threads);
  const TabularDataset table = to_table(records);
  check_schema(table);
  const std::string csv_path = (fs::path(o.out) / "dataset.csv").string();
  write_csv(table, csv_path);
  const std::string resolved = render_scenario(cfg);
  write_text_file((fs::path(o.out) / "scenario.conf").string(), resolved);

  auto m = make_manifest("simulate", cfg.seed);
  m["config"] = resolved;
  m["inputs"] = {{"config", o.config}, {"manifest", o.manifest}};
  m["outputs"] = {{"dataset", "dataset.csv"}, {"rows", records.size()}};
  write_manifest(m, (fs::path(o.out) / "manifest.json").string());
  out << "wrote " << records.size() << " rows to " << csv_path << '\n';
  return kExitOk;
}

// --------------------------------------------------------------- train ----

struct TrainOptions {
  std::string data;
  std::string manifest;
  std::string out;
  std::string models = "all";
  double split = 0.8;
  std::uint64_t seed = 42;
  std::string format = "text";
  std::vector<std::string> overrides;  // kind.param=value
  unsigned threads = 1;
  bool strict = true;
};

inline std::vector<RegressorKind> parse_model_list(const std::string& list) {
  if (list == "all") return {kAllRegressors.begin(), kAllRegressors.end()};
  std::vector<RegressorKind> kinds;
  for (const auto& name : config::split_list(list)) {
    auto k = parse_kind(name);
    if (!k) {
      std::string valid;
      for (auto kk : kAllRegressors) valid += (valid.empty() ? "" : ", ") + std::string(kind_id(kk));
      throw UsageError("unknown model '" + name + "'; valid kinds: all, " + valid);
    }
    if (std::find(kinds.begin(), kinds.end(), *k) == kinds.end()) kinds.push_back(*k);
  }
  if (kinds.empty()) throw UsageError("--models is empty");
  return kinds;
}

/// Apply "kind.param=value" to the matching spec(s); kind "*" applies to all.
inline void apply_override(std::vector<RegressorSpec>& specs, const std::string& text) {
  const auto eq = text.find('=');
  const auto dot = text.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq)
    throw UsageError("--set expects kind.param=value, got '" + text + "'");
  const std::string kind = text.substr(0, dot), param = text.substr(dot + 1, eq - dot - 1), value = text.substr(eq + 1);
  std::optional<RegressorKind> target;
  if (kind != "*") {
    target = parse_kind(kind);
    if (!target) throw UsageError("--set: unknown model '" + kind + "'");
  }
  auto j = model_io::to_json(Hyperparameters{});
  if (!j.contains(param)) throw UsageError("--set: unknown hyperparameter '" + param + "'");
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(value);
  } catch (const nlohmann::json::exception&) {
    throw UsageError("--set: cannot parse value '" + value + "'");
  }
  for (auto& s : specs) {
    if (target && s.kind != *target) continue;
    auto hp = model_io::to_json(s.hp);
    hp[param] = parsed;
    try {
      s.hp = model_io::hyperparameters_from(hp);
      validate(s);
    } catch (const nlohmann::json::exception&) {
      throw UsageError("--set: bad value for '" + param + "'");
    } catch (const DomainError& e) {
      throw UsageError(std::string("--set: ") + e.what());
    }
  }
}

inline int run_train(TrainOptions o, std::ostream& out) {
  if (!o.manifest.empty()) {
    const auto m = read_manifest(o.manifest);
    if (m.value("command", "") != "train") throw UsageError("manifest '" + o.manifest + "' is not a train run");
    const auto& c = m.at("config");
    if (o.data.empty()) o.data = c.at("data").get<std::string>();
    o.models = c.at("models").get<std::string>();
    o.split = c.at("split").get<double>();
    o.seed = c.at("seed").get<std::uint64_t>();
    o.strict = c.at("strict").get<bool>();
    o.overrides = c.at("overrides").get<std::vector<std::string>>();
  }
  if (o.data.empty()) throw UsageError("--data is required");
  if (!(o.split > 0.0 && o.split < 1.0)) throw UsageError("--split must be in (0, 1)");
  if (o.format != "text" && o.format != "csv") throw UsageError("--format must be text or csv");
  const auto kinds = parse_model_list(o.models);
  std::vector<RegressorSpec> specs;
  for (auto k : kinds) {
    auto s = RegressorSpec::defaults(k, o.seed);
    s.hp.threads = o.threads;
    specs.push_back(s);
  }
  for (const auto& ov : o.overrides) apply_override(specs, ov);

  if (!fs::exists(o.data)) throw Error("data file '" + o.data + "' not found");
  const TabularDataset raw = read_csv(o.data, CsvOptions{o.strict});
  const TabularDataset data = drop_ignored_columns(raw);
  auto [train_t, test_t] = split(data, o.split, o.seed);
  const FeatureSet train = to_features(train_t), test = to_features(test_t);

  const auto results = benchmark_all(train, test, specs);

  fs::create_directories(fs::path(o.out) / "models");
  const auto rows = metrics_rows(results);
  {
    std::ofstream csv(fs::path(o.out) / "metrics.csv", std::ios::binary);
    if (!csv) throw Error("cannot write metrics.csv in '" + o.out + "'");
    write_metrics_csv(rows, csv);
  }
  std::string table = metrics_table_text(rows);
  for (const auto& e : results)
    if (!e.metrics) table += "FAILED " + std::string(kind_label(e.kind)) + ": " + e.error + "\n";
  write_text_file((fs::path(o.out) / "metrics.txt").string(), table);

  std::ostringstream cmp;
  cmp << "Model                    RMSE(run)  RMSE(published)  R2(run)  R2(published)\n";
  for (const auto& p : published_results()) {
    auto it = std::find_if(results.begin(), results.end(), [&](const auto& e) { return e.kind == p.kind; });
    if (it == results.end()) continue;
    cmp << std::left << std::setw(24) << kind_label(p.kind) << std::right << ' ' << std::setw(9)
        << (it->metrics ? format_fixed(it->metrics->rmse, 3) : "failed") << "  " << std::setw(15)
        << format_fixed(p.rmse, 3) << "  " << std::setw(7)
        << (it->metrics && it->metrics->r2 ? format_fixed(*it->metrics->r2, 3) : "n/a") << "  " << std::setw(13)
        << format_fixed(p.r2, 3) << '\n';
  }
  write_text_file((fs::path(o.out) / "published_comparison.txt").string(), cmp.str());

  nlohmann::json outputs = {{"metrics", "metrics.csv"}, {"table", "metrics.txt"}};
  nlohmann::json failures = nlohmann::json::object();
  for (const auto& e : results) {
    if (e.model) {
      const std::string rel = "models/" + std::string(kind_id(e.kind)) + ".json";
      save_model(*e.model, (fs::path(o.out) / rel).string());
      outputs["models"][std::string(kind_id(e.kind))] = rel;
    } else {
      failures[std::string(kind_id(e.kind))] = e.error;
    }
  }
  auto m = make_manifest("train", o.seed);
  m["config"] = {{"data", o.data}, {"models", o.models}, {"split", o.split},  {"seed", o.seed},
                 {"strict", o.strict}, {"overrides", o.overrides}};
  nlohmann::json hp = nlohmann::json::object();
  for (const auto& s : specs) hp[std::string(kind_id(s.kind))] = model_io::to_json(s.hp);
  m["hyperparameters"] = hp;
  m["inputs"] = {{"data", o.data}, {"train_rows", train.target.size()}, {"test_rows", test.target.size()}};
  m["outputs"] = outputs;
  m["failures"] = failures;
  write_manifest(m, (fs::path(o.out) / "manifest.json").string());

  if (o.format == "csv")
    write_metrics_csv(rows, out);
  else
    out << table;
  return rows.empty() ? kExitRuntime : kExitOk;
}

// -------------------------------------------------------------- report ----

struct ReportOptions {
  std::string data;
  std::string metrics;
  std::string out;
  bool per_row = false;
};

inline std::string lower(std::string_view s) {
  std::string r(s);
  for (auto& c : r) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return r;
}

inline int run_report(const ReportOptions& o, std::ostream& out) {
  if (o.data.empty() && o.metrics.empty()) throw UsageError("report needs --data and/or --metrics");
  for (const auto& p : {o.data, o.metrics})
    if (!p.empty() && !fs::exists(p)) throw Error("input file '" + p + "' not found");
  fs::create_directories(o.out);
  const fs::path dir(o.out);
  nlohmann::json outputs = nlohmann::json::array();
  auto emit = [&](const std::string& name, const std::string& text) {
    write_text_file((dir / name).string(), text);
    outputs.push_back(name);
  };

  if (!o.data.empty()) {
    const TabularDataset data = read_csv(o.data);
    for (Season s : seasons_in(data)) {
      const auto series = path_loss_series(data, s, o.per_row);
      const std::string base = "pathloss_" + lower(season_name(s));
      const std::string title = "Path loss vs. T-R separation in " + lower(season_name(s));
      emit(base + ".svg", render_line_chart(series, title, "T-R separation (m)", "Path loss (dB)"));
      emit(base + ".csv", series_csv(series));
    }
  }
  if (!o.metrics.empty()) {
    const auto rows = read_metrics_csv(o.metrics);
    std::vector<Bar> r2;
    for (const auto& r : rows)
      if (r.metrics.r2) r2.push_back({r.model, *r.metrics.r2, "model"});
    emit("r2_models.svg", render_bar_chart(r2, "Comparison of R2 across regression models", "R2"));
    emit("r2_models.csv", bars_csv(r2, "R2"));
    if (!rows.empty()) {
      const auto best = *std::min_element(rows.begin(), rows.end(),
                                          [](const auto& a, const auto& b) { return a.metrics.rmse < b.metrics.rmse; });
      const auto bars = rmse_comparison_bars(best);
      emit("rmse_comparison.svg", render_bar_chart(bars, "RMSE comparison with prior path-loss studies", "RMSE (dB)"));
      emit("rmse_comparison.csv", bars_csv(bars, "RMSE"));
      emit("literature_comparison.txt", literature_table_text(best));
    }
  }
  auto m = make_manifest("report", 0);
  m["config"] = {{"per_row", o.per_row}};
  m["inputs"] = {{"data", o.data}, {"metrics", o.metrics}};
  m["outputs"] = outputs;
  write_manifest(m, (dir / "manifest.json").string());
  for (const auto& f : outputs) out << "wrote " << (dir / f.get<std::string>()).string() << '\n';
  return kExitOk;
}

// ------------------------------------------------------------ pathloss ----

struct PathLossOptions {
  double freq = 0.0;
  double dist = 0.0;
  double n = 3.2;
  std::optional<double> alpha;
  std::optional<double> temperature, humidity, pressure, rain_rate;
  bool foliage = false;
  double shadow = 0.0;
  std::string config;
  std::string format = "text";
};

inline int run_pathloss(const PathLossOptions& o, std::ostream& out) {
  const bool weather = o.temperature || o.humidity || o.pressure || o.rain_rate;
  if (o.alpha && weather) throw UsageError("give either --alpha or weather flags, not both");
  if (o.format != "text" && o.format != "csv") throw UsageError("--format must be text or csv");
  double alpha = o.alpha.value_or(0.0);
  std::optional<AttenuationBreakdown> att;
  if (weather) {
    const auto cfg = load_scenario(scenario_document(o.config));
    AtmosphericState s;
    s.temperature = o.temperature.value_or(s.temperature);
    s.humidity = o.humidity.value_or(s.humidity);
    s.pressure = o.pressure.value_or(s.pressure);
    s.rain_rate = o.rain_rate.value_or(s.rain_rate);
    AtmosphereBounds relaxed = cfg.atmosphere.bounds;
    relaxed.strict = false;
    validate(s, relaxed);
    att = specific_attenuation(o.freq, s, cfg.atmosphere.coefficients, o.foliage);
    alpha = att->total_alpha;
  } else if (o.foliage) {
    alpha += kFoliageAttenuationDbPerM;
  }
  const PathLossTerms t = ci_path_loss_terms(o.freq, o.dist, o.n, alpha, o.shadow);
  using detail::shortest;
  if (o.format == "csv") {
    out << "fspl_db,distance_term_db,atmospheric_db,shadow_db,total_db,alpha_db_per_m\n"
        << shortest(t.fspl) << ',' << shortest(t.distance_term) << ',' << shortest(t.atmospheric) << ','
        << shortest(t.shadow) << ',' << shortest(t.total) << ',' << shortest(alpha) << '\n';
    return kExitOk;
  }
  if (att)
    out << "gas attenuation (dB/km)     " << shortest(att->gas) << '\n'
        << "rain attenuation (dB/km)    " << shortest(att->rain) << '\n'
        << "foliage (dB/m)              " << shortest(att->foliage) << '\n';
  out << "alpha (dB/m)                " << shortest(alpha) << '\n'
      << "FSPL at 1 m (dB)            " << shortest(t.fspl) << '\n'
      << "distance term (dB)          " << shortest(t.distance_term) << '\n'
      << "atmospheric term (dB)       " << shortest(t.atmospheric) << '\n'
      << "shadow (dB)                 " << shortest(t.shadow) << '\n'
      << "path loss (dB)              " << shortest(t.total) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- main ----

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Seasonal mm-wave path loss simulation and regression benchmarking", "mmwpl"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* c_sim = app.add_subcommand("simulate", "Simulate a channel dataset over the scenario grid");
  c_sim->add_option("--config", sim.config, "Scenario configuration file");
  c_sim->add_option("--manifest", sim.manifest, "Repeat a previous run from its manifest.json")->excludes("--config");
  c_sim->add_option("--out", sim.out, "Output directory")->required();
  c_sim->add_option("--seasons", sim.seasons, "Seasons to simulate")->delimiter(',');
  c_sim->add_option("--freqs", sim.freqs, "Carrier frequencies, GHz")->delimiter(',');
  c_sim->add_option("--dist-min", sim.dist_min, "Smallest T-R separation, m");
  c_sim->add_option("--dist-max", sim.dist_max, "Largest T-R separation, m");
  c_sim->add_option("--dist-steps", sim.dist_steps, "Number of distances");
  c_sim->add_option("--drops", sim.drops, "Drops per grid point");
  c_sim->add_option("--paths-min", sim.paths_min, "Minimum multipath components per drop");
  c_sim->add_option("--paths-max", sim.paths_max, "Maximum multipath components per drop");
  c_sim->add_option("--seed", sim.seed, "Master seed");
  c_sim->add_option("--threads", sim.threads, "Worker threads (0: all cores)");

  TrainOptions tr;
  auto* c_train = app.add_subcommand("train", "Fit and evaluate the regression models on a dataset");
  c_train->add_option("--data", tr.data, "Dataset CSV");
  c_train->add_option("--manifest", tr.manifest, "Repeat a previous run from its manifest.json");
  c_train->add_option("--out", tr.out, "Output directory")->required();
  c_train->add_option("--models", tr.models, "all, or a comma list of model kinds");
  c_train->add_option("--split", tr.split, "Training fraction");
  c_train->add_option("--seed", tr.seed, "Seed for the split and stochastic models");
  c_train->add_option("--format", tr.format, "Metric output on stdout: text or csv");
  c_train->add_option("--set", tr.overrides, "Hyperparameter override kind.param=value (kind may be *)");
  c_train->add_option("--threads", tr.threads, "Random forest training threads");
  bool lenient = false;
  c_train->add_flag("--no-strict", lenient, "Accept datasets that do not match the channel schema");

  ReportOptions rep;
  auto* c_rep = app.add_subcommand("report", "Render charts and tables from a dataset and/or metrics");
  c_rep->add_option("--data", rep.data, "Dataset CSV");
  c_rep->add_option("--metrics", rep.metrics, "metrics.csv written by train");
  c_rep->add_option("--out", rep.out, "Output directory")->required();
  c_rep->add_flag("--per-row", rep.per_row, "Average every record instead of one value per drop");

  PathLossOptions pl;
  auto* c_pl = app.add_subcommand("pathloss", "Evaluate the close-in path loss model once");
  c_pl->add_option("--freq", pl.freq, "Carrier frequency, GHz")->required();
  c_pl->add_option("--dist", pl.dist, "T-R separation, m")->required();
  c_pl->add_option("--n", pl.n, "Path loss exponent");
  c_pl->add_option("--alpha", pl.alpha, "Specific attenuation, dB/m");
  c_pl->add_option("--temperature", pl.temperature, "deg C (derives alpha from the configuration)");
  c_pl->add_option("--humidity", pl.humidity, "% relative humidity");
  c_pl->add_option("--pressure", pl.pressure, "mbar");
  c_pl->add_option("--rain-rate", pl.rain_rate, "mm/h");
  c_pl->add_flag("--foliage", pl.foliage, "Add foliage attenuation");
  c_pl->add_option("--shadow", pl.shadow, "Shadow fading term, dB");
  c_pl->add_option("--config", pl.config, "Configuration providing attenuation coefficients");
  c_pl->add_option("--format", pl.format, "text or csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (c_sim->parsed()) return run_simulate(sim, out);
    if (c_train->parsed()) {
      tr.strict = !lenient;
      return run_train(tr, out);
    }
    if (c_rep->parsed()) return run_report(rep, out);
    if (c_pl->parsed()) return run_pathloss(pl, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace mmwpl::cli
