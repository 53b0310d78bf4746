#include "supwatt/cli.hpp"

#include "supwatt/io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <optional>

namespace supwatt::cli {

namespace fs = std::filesystem;

std::vector<std::size_t> parse_range(const std::string& text) {
  std::vector<std::size_t> parts;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto colon = text.find(':', pos);
    auto token = text.substr(pos, colon == std::string::npos ? std::string::npos : colon - pos);
    try {
      std::size_t used = 0;
      auto v = std::stoull(token, &used);
      if (used != token.size() || token.empty() || token.front() == '-') throw std::invalid_argument("n");
      parts.push_back(static_cast<std::size_t>(v));
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::Validation, "bad range '" + text + "', expected a:b:step");
    }
    if (colon == std::string::npos) break;
    pos = colon + 1;
  }
  if (parts.size() == 1) return parts;
  if (parts.size() != 3 || parts[2] == 0 || parts[0] > parts[1] || parts[0] == 0) {
    throw Error(ErrorKind::Validation, "bad range '" + text + "', expected a:b:step with 0 < a <= b, step > 0");
  }
  std::vector<std::size_t> out;
  for (std::size_t n = parts[0]; n <= parts[1]; n += parts[2]) out.push_back(n);
  return out;
}

namespace {

struct Common {
  std::uint64_t seed = 0;
  std::string out;
  std::string config;
  std::string data_dir = SUPWATT_DATA_DIR;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "RNG seed; all randomness derives from it");
  sub->add_option("--out", c.out, "Output file or directory (default: stdout where applicable)");
  sub->add_option("--config", c.config, "JSON file of option values; flags win");
  sub->add_option("--data-dir", c.data_dir, "Directory holding the shipped fixtures");
}

fs::path resolve_appliance(const std::string& name_or_path, const std::string& data_dir) {
  fs::path p(name_or_path);
  if (p.has_extension() || fs::exists(p)) return p;
  return fs::path(data_dir) / "appliances" / (name_or_path + ".json");
}

UsageIntensity resolve_intensity(const std::string& text, const std::vector<std::string>& modes) {
  if (text.find('=') != std::string::npos) return io::parse_intensity(text);
  if (text == "uniform") return uniform_intensity(modes);
  if (text.empty() && modes.size() == 1) return uniform_intensity(modes);
  const std::string level = text.empty() ? "medium" : text;
  const std::map<std::string, std::string> dominant = {
      {"high", "heavy"}, {"medium", "medium"}, {"low", "light"}};
  auto it = dominant.find(level);
  if (it == dominant.end()) {
    throw Error(ErrorKind::Validation, "unknown intensity '" + text +
                                           "' (use high|medium|low|uniform or mode=weight,...)");
  }
  return three_mode_intensity(modes, it->second);
}

std::optional<double> optional_jitter(double jitter) {
  if (jitter < 0.0) return std::nullopt;
  if (jitter >= 1.0) throw Error(ErrorKind::Validation, "--jitter must lie in [0, 1)");
  return jitter;
}

// A pending output file; everything is computed and validated before any
// file is touched.
struct Output {
  fs::path path;
  std::string text;
};

void flush(const std::vector<Output>& outputs) {
  for (const auto& o : outputs) {
    if (o.path.has_parent_path()) fs::create_directories(o.path.parent_path());
    write_text_file(o.path, o.text);
  }
}

void emit(const Common& c, std::string text, std::ostream& out) {
  if (c.out.empty()) {
    out << text;
  } else {
    flush({{c.out, std::move(text)}});
  }
}

std::string dump_line(const io::Json& j) { return j.dump() + "\n"; }

// ---------------------------------------------------------------------------

struct SimulateArgs {
  Common c;
  std::vector<std::string> supros;
  std::string appliance;
  std::string turn_on;
  std::optional<std::size_t> fixed_t_on;
  std::string intensity;
  std::size_t days = 1;
  std::size_t usages = 1;
  double jitter = -1.0;
  double noise = 0.0;
  std::size_t retries = 100;
  std::size_t ref_n = 0;
  std::string ref_out;
};

int do_simulate(const SimulateArgs& a, std::ostream&) {
  if (a.c.out.empty()) throw Error(ErrorKind::Validation, "simulate needs --out");
  if (a.supros.empty() == a.appliance.empty()) {
    throw Error(ErrorKind::Validation, "give either --supro files or --appliance");
  }
  if (a.noise < 0.0) throw Error(ErrorKind::Validation, "--noise must be >= 0");

  std::map<std::string, Supro> supros;
  std::optional<EmpiricalCdf> cdf;
  if (!a.appliance.empty()) {
    auto config = io::load_appliance(resolve_appliance(a.appliance, a.c.data_dir));
    supros = config.supros;
    cdf = config.cdf;
  } else {
    for (const auto& path : a.supros) {
      auto s = io::load_supro(path);
      if (!supros.empty() && supros.begin()->second.appliance_id != s.appliance_id) {
        throw Error(ErrorKind::Validation, "all --supro files must describe one appliance");
      }
      supros[s.mode_id] = s;
    }
    auto manifest = fs::path(a.c.data_dir) / "appliances" / (supros.begin()->second.appliance_id + ".json");
    if (a.turn_on.empty() && !a.fixed_t_on && fs::exists(manifest)) {
      cdf = io::load_appliance(manifest).cdf;
    }
  }
  if (a.fixed_t_on) {
    cdf = build_empirical_cdf({static_cast<double>(*a.fixed_t_on)});
  } else if (!a.turn_on.empty()) {
    auto j = io::load_json(a.turn_on);
    cdf = build_empirical_cdf(j.is_array() ? j.get<std::vector<double>>()
                                           : j.at("turn_on_seconds").get<std::vector<double>>());
  }
  if (!cdf) {
    throw Error(ErrorKind::Validation, "no turn-on distribution: pass --turn-on or --t-on");
  }
  if (auto j = optional_jitter(a.jitter)) {
    for (auto& [m, s] : supros) s = with_jitter(s, *j);
  }
  std::vector<std::string> modes;
  for (const auto& [m, s] : supros) modes.push_back(m);
  auto intensity = resolve_intensity(a.intensity, modes);
  DayOptions options;
  options.max_retries = a.retries;
  options.noise_sigma = a.noise;

  std::vector<Output> outputs;
  const fs::path out(a.c.out);
  const bool single_file = a.days == 1 && out.extension() == ".csv";
  for (std::size_t d = 0; d < a.days; ++d) {
    auto day = generate_day(supros, intensity, *cdf, a.usages, mix_seed(a.c.seed, d), options);
    fs::path trace;
    if (single_file) {
      trace = out;
    } else {
      char name[32];
      std::snprintf(name, sizeof(name), "day_%03zu.csv", d);
      trace = out / name;
    }
    auto truth = trace;
    truth.replace_extension(".truth.json");
    outputs.push_back({trace, format_series(day.series)});
    outputs.push_back({truth, io::to_json(day.truth).dump(2) + "\n"});
  }
  if (a.ref_n > 0) {
    if (a.ref_out.empty()) throw Error(ErrorKind::Validation, "--ref-n needs --ref-out");
    auto mode = sample_mode(uniform_intensity(modes), mix_seed(a.c.seed, 1'000'003));
    auto sup = generate_sup(supros.at(mode), mix_seed(a.c.seed, 1'000'004));
    auto ref = make_reference_pattern(sup, a.ref_n);
    outputs.push_back({a.ref_out, format_series(PowerSeries(ref.samples))});
  }
  flush(outputs);
  return kExitOk;
}

// ---------------------------------------------------------------------------

// Plain trace CSV, or one channel of a multi-channel meter file.
PowerSeries load_day(const std::string& path, const std::string& column) {
  return column.empty() ? load_series(path) : io::load_channel_csv(path, column);
}

struct DetectArgs {
  Common c;
  std::string day;
  std::string column;
  std::string ref;
  DetectOptions options;
};

int do_detect(const DetectArgs& a, std::ostream& out) {
  auto day = load_day(a.day, a.column);
  auto ref_series = load_series(a.ref);
  ReferencePattern ref{{ref_series.samples().begin(), ref_series.samples().end()}, "", ""};
  auto result = detect(day, ref, a.options);
  emit(a.c, io::to_json(result).dump(2) + "\n", out);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct ClassifyArgs {
  Common c;
  std::string day;
  std::string column;
  std::string detections;
  std::vector<std::size_t> t_on;
  std::string appliance;
  std::vector<std::string> patterns;
  bool normalize = false;
  long long band = -1;
};

DtwOptions dtw_options(bool normalize, long long band) {
  DtwOptions o;
  o.normalize = normalize;
  if (band >= 0) o.band = static_cast<std::size_t>(band);
  return o;
}

int do_classify(const ClassifyArgs& a, std::ostream& out) {
  auto day = load_day(a.day, a.column);
  std::vector<ModePattern> patterns;
  if (!a.appliance.empty()) {
    patterns = nominal_patterns(io::load_appliance(resolve_appliance(a.appliance, a.c.data_dir)));
  }
  for (const auto& item : a.patterns) {
    auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::Validation, "--pattern expects mode=trace.csv");
    }
    auto series = load_series(item.substr(eq + 1));
    patterns.push_back({item.substr(0, eq), {series.samples().begin(), series.samples().end()}});
  }
  if (patterns.empty()) throw Error(ErrorKind::Validation, "give --appliance or --pattern");

  DetectionResult detection;
  if (!a.detections.empty()) detection = io::detection_from_json(io::load_json(a.detections));
  detection.turn_on_times.insert(detection.turn_on_times.end(), a.t_on.begin(), a.t_on.end());

  std::string text;
  for (const auto& e : classify_day(day, detection, patterns, dtw_options(a.normalize, a.band))) {
    text += dump_line(io::to_json(e));
  }
  emit(a.c, text, out);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct EvaluateArgs {
  Common c;
  std::vector<std::string> appliances;
  std::size_t days = 100;
  std::size_t usages = 1;
  double jitter = -1.0;
  double noise = 0.0;
  bool normalize = false;
  long long band = -1;
  bool end_to_end = false;
  std::size_t ref_n = 600;
  std::size_t tolerance = 30;
  DetectOptions detect;
};

int do_evaluate(const EvaluateArgs& a, std::ostream& out) {
  if (a.noise < 0.0) throw Error(ErrorKind::Validation, "--noise must be >= 0");
  auto names = a.appliances.empty() ? std::vector<std::string>{"dishwasher", "washer", "dryer"}
                                    : a.appliances;
  const auto jitter = optional_jitter(a.jitter);
  DayOptions day_options;
  day_options.noise_sigma = a.noise;

  EvaluateOptions options;
  options.dtw = dtw_options(a.normalize, a.band);
  options.end_to_end = a.end_to_end;
  options.detect = a.detect;
  options.tolerance = a.tolerance;

  const std::vector<std::pair<std::string, std::string>> levels = {
      {"high", "heavy"}, {"medium", "medium"}, {"low", "light"}};
  std::vector<HouseholdDataset> households;
  std::map<std::string, std::vector<ModePattern>> patterns;
  std::uint64_t stream = 0;
  for (const auto& name : names) {
    auto config = with_jitter(io::load_appliance(resolve_appliance(name, a.c.data_dir)), jitter);
    patterns[config.name] = nominal_patterns(config);
    if (a.end_to_end) {
      auto modes = config.modes();
      auto mode = sample_mode(uniform_intensity(modes), mix_seed(a.c.seed, 2'000'000 + stream));
      auto sup = generate_sup(config.supros.at(mode), mix_seed(a.c.seed, 3'000'000 + stream));
      options.references.emplace(config.name, make_reference_pattern(sup, a.ref_n));
    }
    for (const auto& [level, dominant] : levels) {
      households.push_back(simulate_household(config, level,
                                              three_mode_intensity(config.modes(), dominant),
                                              a.days, a.usages, mix_seed(a.c.seed, stream++),
                                              day_options));
    }
  }
  auto report = evaluate_classification(households, patterns, options);
  emit(a.c, io::format_metrics_csv(report), out);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct SweepArgs {
  Common c;
  std::string appliance;
  std::string n_range = "50:1600:50";
  std::size_t days = 100;
  double jitter = -1.0;
  double noise = 0.0;
  bool same_mode_ref = false;
  DetectOptions detect;
};

int do_sweep(const SweepArgs& a, std::ostream& out) {
  if (a.noise < 0.0) throw Error(ErrorKind::Validation, "--noise must be >= 0");
  auto config = with_jitter(io::load_appliance(resolve_appliance(a.appliance, a.c.data_dir)),
                            optional_jitter(a.jitter));
  SweepOptions options;
  options.days = a.days;
  options.seed = a.c.seed;
  options.detect = a.detect;
  options.reference = a.same_mode_ref ? ReferenceSource::SameModeAsDay : ReferenceSource::RandomMode;
  options.day.noise_sigma = a.noise;
  auto report = sweep_pattern_size(config, parse_range(a.n_range), options);
  emit(a.c, io::format_sweep_csv(report), out);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct RecommendArgs {
  Common c;
  std::string events;
  std::string schedule;
  std::string ranking;
  std::string appliance;
};

int do_recommend(const RecommendArgs& a, std::ostream& out) {
  auto schedule_path = a.schedule.empty() ? fs::path(a.c.data_dir) / "tariff_ontario.json"
                                          : fs::path(a.schedule);
  auto schedule = io::tariff_from_json(io::load_json(schedule_path));

  std::vector<std::string> ranking;
  if (!a.ranking.empty()) {
    std::stringstream ss(a.ranking);
    for (std::string m; std::getline(ss, m, ',');) ranking.push_back(m);
  } else if (!a.appliance.empty()) {
    ranking = io::load_appliance(resolve_appliance(a.appliance, a.c.data_dir)).mode_ranking;
  } else {
    ranking = {"light", "medium", "heavy"};
  }

  std::string text;
  auto lines = read_text_file(a.events);
  std::stringstream ss(lines);
  std::size_t line_no = 0;
  for (std::string line; std::getline(ss, line);) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto event = io::classified_from_json(io::parse_json(line, a.events + ":" + std::to_string(line_no)));
    text += dump_line(io::to_json(recommend(event, schedule, ranking)));
  }
  emit(a.c, text, out);
  return kExitOk;
}

// ---------------------------------------------------------------------------

bool has_flag(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

// Appends option values from a JSON config for every flag the caller did not
// pass explicitly.
std::vector<std::string> apply_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  auto j = io::load_json(path);
  if (!j.is_object()) throw Error(ErrorKind::Validation, path + ": config must be a JSON object");
  std::vector<std::string> extra;
  for (const auto& [key, value] : j.items()) {
    const std::string flag = "--" + key;
    if (key == "config" || has_flag(args, flag)) continue;
    auto scalar = [](const io::Json& v) {
      return v.is_string() ? v.get<std::string>() : v.dump();
    };
    if (value.is_boolean()) {
      if (value.get<bool>()) extra.push_back(flag);
    } else if (value.is_array()) {
      for (const auto& v : value) {
        extra.push_back(flag);
        extra.push_back(scalar(v));
      }
    } else {
      extra.push_back(flag);
      extra.push_back(scalar(value));
    }
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

int exit_code(ErrorKind kind) {
  return kind == ErrorKind::Io ? kExitIo : kExitValidation;
}

void add_detect_options(CLI::App* sub, DetectOptions& d) {
  sub->add_option("--delta", d.delta, "Low-amplitude canceling coefficient in (0, 1)");
  sub->add_option("--min-gap", d.min_gap, "Merge residue runs closer than this many samples");
  sub->add_option("--smooth", d.smooth_window, "Moving-average window over X(t); 0 disables");
}

} // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Appliance usage detection, operation-mode classification and DR advice"};
  app.name("supwatt");
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Generate labeled daily traces");
  add_common(simulate, sim.c);
  simulate->add_option("--supro", sim.supros, "SUPRO JSON file (repeat per mode)");
  simulate->add_option("--appliance", sim.appliance, "Appliance manifest name or path");
  simulate->add_option("--turn-on", sim.turn_on, "JSON array of turn-on seconds-of-day");
  simulate->add_option("--t-on", sim.fixed_t_on, "Fixed turn-on second (degenerate distribution)");
  simulate->add_option("--intensity", sim.intensity, "high|medium|low|uniform or mode=weight,...");
  simulate->add_option("--days", sim.days, "Number of days")->check(CLI::PositiveNumber);
  simulate->add_option("--usages", sim.usages, "Usages per day");
  simulate->add_option("--jitter", sim.jitter, "Override every cycle's duration jitter");
  simulate->add_option("--noise", sim.noise, "Baseline Gaussian noise sigma (watts)");
  simulate->add_option("--retries", sim.retries, "Placement retries per usage");
  simulate->add_option("--ref-n", sim.ref_n, "Also write an n-sample reference pattern");
  simulate->add_option("--ref-out", sim.ref_out, "Reference pattern output path");

  DetectArgs det;
  auto* detect_cmd = app.add_subcommand("detect", "Detect turn-on times in a day trace");
  add_common(detect_cmd, det.c);
  detect_cmd->add_option("--day", det.day, "Day trace CSV")->required();
  detect_cmd->add_option("--column", det.column, "Read this channel of a unix_ts meter CSV");
  detect_cmd->add_option("--ref", det.ref, "Reference pattern trace CSV")->required();
  add_detect_options(detect_cmd, det.options);

  ClassifyArgs cls;
  auto* classify_cmd = app.add_subcommand("classify", "Classify operation modes at turn-on times");
  add_common(classify_cmd, cls.c);
  classify_cmd->add_option("--day", cls.day, "Day trace CSV")->required();
  classify_cmd->add_option("--column", cls.column, "Read this channel of a unix_ts meter CSV");
  classify_cmd->add_option("--detections", cls.detections, "DetectionResult JSON");
  classify_cmd->add_option("--t-on", cls.t_on, "Explicit turn-on sample index (repeatable)");
  classify_cmd->add_option("--appliance", cls.appliance, "Use this appliance's nominal patterns");
  classify_cmd->add_option("--pattern", cls.patterns, "mode=trace.csv (repeatable)");
  classify_cmd->add_flag("--normalize", cls.normalize, "Path-length normalized DTW");
  classify_cmd->add_option("--band", cls.band, "Sakoe-Chiba half-width (default unconstrained)");

  EvaluateArgs ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Per-mode precision/recall/F1 on simulated households");
  add_common(evaluate_cmd, ev.c);
  evaluate_cmd->add_option("--appliance", ev.appliances, "Appliance(s); default all shipped");
  evaluate_cmd->add_option("--days", ev.days, "Days per household")->check(CLI::PositiveNumber);
  evaluate_cmd->add_option("--usages", ev.usages, "Usages per day");
  evaluate_cmd->add_option("--jitter", ev.jitter, "Override every cycle's duration jitter");
  evaluate_cmd->add_option("--noise", ev.noise, "Baseline Gaussian noise sigma (watts)");
  evaluate_cmd->add_flag("--normalize", ev.normalize, "Path-length normalized DTW");
  evaluate_cmd->add_option("--band", ev.band, "Sakoe-Chiba half-width");
  evaluate_cmd->add_flag("--end-to-end", ev.end_to_end, "Classify detector output");
  evaluate_cmd->add_option("--ref-n", ev.ref_n, "Reference size for --end-to-end");
  evaluate_cmd->add_option("--tolerance", ev.tolerance, "Detection match tolerance (samples)");
  add_detect_options(evaluate_cmd, ev.detect);

  SweepArgs sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "Detected-SUP count versus reference size");
  add_common(sweep_cmd, sw.c);
  sweep_cmd->add_option("--appliance", sw.appliance, "Appliance manifest name or path")->required();
  sweep_cmd->add_option("--n", sw.n_range, "Reference sizes a:b:step");
  sweep_cmd->add_option("--days", sw.days, "Simulated days")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--jitter", sw.jitter, "Override every cycle's duration jitter");
  sweep_cmd->add_option("--noise", sw.noise, "Baseline Gaussian noise sigma (watts)");
  sweep_cmd->add_flag("--same-mode-ref", sw.same_mode_ref, "Reference from the day's own mode");
  add_detect_options(sweep_cmd, sw.detect);

  RecommendArgs rec;
  auto* recommend_cmd = app.add_subcommand("recommend", "Demand-response advice for classified events");
  add_common(recommend_cmd, rec.c);
  recommend_cmd->add_option("--events", rec.events, "ClassifiedEvent JSON lines")->required();
  recommend_cmd->add_option("--schedule", rec.schedule, "Tariff schedule JSON");
  recommend_cmd->add_option("--ranking", rec.ranking, "Modes lightest to heaviest, comma separated");
  recommend_cmd->add_option("--appliance", rec.appliance, "Take the ranking from this appliance");

  try {
    auto args = apply_config(raw_args);
    std::vector<std::string> storage{"supwatt"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : storage) argv.push_back(s.data());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return kExitOk;
    } catch (const CLI::ParseError& e) {
      err << "supwatt: " << e.what() << "\n";
      return kExitUsage;
    }

    if (*simulate) return do_simulate(sim, out);
    if (*detect_cmd) {
      if (!(det.options.delta > 0.0 && det.options.delta < 1.0)) {
        throw Error(ErrorKind::Validation, "--delta must lie in (0, 1)");
      }
      return do_detect(det, out);
    }
    if (*classify_cmd) return do_classify(cls, out);
    if (*evaluate_cmd) return do_evaluate(ev, out);
    if (*sweep_cmd) return do_sweep(sw, out);
    if (*recommend_cmd) return do_recommend(rec, out);
    return kExitUsage;
  } catch (const Error& e) {
    err << "supwatt: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    err << "supwatt: " << e.what() << "\n";
    return kExitIo;
  } catch (const nlohmann::json::exception& e) {
    err << "supwatt: " << e.what() << "\n";
    return kExitValidation;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

} // namespace supwatt::cli
