#include "supwatt/io.hpp"

#include <charconv>
#include <cmath>
#include <optional>
#include <sstream>

namespace supwatt::io {

namespace {

template <typename T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorKind::Parse, std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("field '") + key + "': " + e.what());
  }
}

} // namespace

Json parse_json(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, origin + ": " + e.what());
  }
}

Json load_json(const std::filesystem::path& path) {
  return parse_json(read_text_file(path), path.string());
}

Supro supro_from_json(const Json& j) {
  Supro s;
  s.appliance_id = field<std::string>(j, "appliance");
  s.mode_id = field<std::string>(j, "mode");
  for (const auto& pj : field<Json>(j, "phases")) {
    Phase p;
    p.rep_lower = field<std::uint32_t>(pj, "rep_lower");
    p.rep_upper = field<std::uint32_t>(pj, "rep_upper");
    for (const auto& cj : field<Json>(pj, "cycles")) {
      Cycle c;
      c.duration_s = field<double>(cj, "duration_s");
      c.watts = field<double>(cj, "watts");
      c.duration_jitter = cj.contains("duration_jitter") ? field<double>(cj, "duration_jitter") : 0.05;
      p.cycles.push_back(c);
    }
    s.phases.push_back(std::move(p));
  }
  s.validate();
  return s;
}

Json to_json(const Supro& supro) {
  Json phases = Json::array();
  for (const auto& p : supro.phases) {
    Json cycles = Json::array();
    for (const auto& c : p.cycles) {
      cycles.push_back({{"duration_s", c.duration_s},
                        {"watts", c.watts},
                        {"duration_jitter", c.duration_jitter}});
    }
    phases.push_back({{"rep_lower", p.rep_lower}, {"rep_upper", p.rep_upper}, {"cycles", cycles}});
  }
  return {{"appliance", supro.appliance_id}, {"mode", supro.mode_id}, {"phases", phases}};
}

Supro load_supro(const std::filesystem::path& path) {
  try {
    return supro_from_json(load_json(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Io) throw;
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

ApplianceConfig load_appliance(const std::filesystem::path& path) {
  auto j = load_json(path);
  auto base = path.parent_path();
  auto name = field<std::string>(j, "appliance");
  std::map<std::string, Supro> supros;
  const auto modes = field<Json>(j, "modes");
  for (const auto& [mode, rel] : modes.items()) {
    auto supro = load_supro(base / rel.get<std::string>());
    if (supro.mode_id != mode || supro.appliance_id != name) {
      throw Error(ErrorKind::Validation, path.string() + ": mode '" + mode +
                                             "' points at a SUPRO for " +
                                             supro.appliance_id + "/" + supro.mode_id);
    }
    supros.emplace(mode, std::move(supro));
  }
  ApplianceConfig config{name, std::move(supros),
                         build_empirical_cdf(field<std::vector<double>>(j, "turn_on_seconds")),
                         field<std::vector<std::string>>(j, "mode_ranking")};
  config.validate();
  return config;
}

Json to_json(const std::vector<GroundTruthEvent>& truth) {
  Json out = Json::array();
  for (const auto& e : truth) {
    out.push_back({{"t_on", e.t_on}, {"mode", e.mode_id}, {"duration", e.duration}});
  }
  return out;
}

std::vector<GroundTruthEvent> truth_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorKind::Parse, "ground truth must be an array");
  std::vector<GroundTruthEvent> out;
  for (const auto& e : j) {
    out.push_back({field<std::size_t>(e, "t_on"), field<std::string>(e, "mode"),
                   field<std::size_t>(e, "duration")});
  }
  return out;
}

Json to_json(const DetectionResult& result) {
  Json periods = Json::array();
  for (const auto& p : result.periods) {
    periods.push_back({{"start", p.start}, {"end", p.end}, {"argmax", p.argmax},
                       {"max_value", p.max_value}});
  }
  return {{"delta", result.delta},
          {"tau", result.tau},
          {"n", result.n},
          {"turn_on_times", result.turn_on_times},
          {"periods", periods}};
}

DetectionResult detection_from_json(const Json& j) {
  DetectionResult r;
  r.delta = field<double>(j, "delta");
  r.tau = field<double>(j, "tau");
  r.n = field<std::size_t>(j, "n");
  r.turn_on_times = field<std::vector<SampleIndex>>(j, "turn_on_times");
  for (const auto& p : field<Json>(j, "periods")) {
    r.periods.push_back({field<std::size_t>(p, "start"), field<std::size_t>(p, "end"),
                         field<std::size_t>(p, "argmax"), field<double>(p, "max_value")});
  }
  return r;
}

Json to_json(const ClassifiedEvent& event) {
  Json distances = Json::object();
  for (const auto& [mode, d] : event.distances) distances[mode] = d;
  return {{"t_on", event.t_on},
          {"chosen_mode", event.chosen_mode},
          {"min_distance", event.min_distance},
          {"distances", distances},
          {"truncated", event.truncated}};
}

ClassifiedEvent classified_from_json(const Json& j) {
  ClassifiedEvent e;
  e.t_on = field<SampleIndex>(j, "t_on");
  e.chosen_mode = field<std::string>(j, "chosen_mode");
  e.min_distance = field<double>(j, "min_distance");
  const auto distances = field<Json>(j, "distances");
  for (const auto& [mode, d] : distances.items()) e.distances[mode] = field<double>(distances, mode.c_str());
  e.truncated = j.contains("truncated") && field<bool>(j, "truncated");
  return e;
}

Json to_json(const Recommendation& rec) {
  Json advice = Json::array();
  for (auto a : rec.advice) advice.push_back(to_string(a));
  Json out = {{"t_on", rec.t_on}, {"mode", rec.mode}, {"advice", advice}};
  out["suggested_t_on"] = rec.suggested_t_on ? Json(*rec.suggested_t_on) : Json(nullptr);
  out["detail"] = rec.detail;
  return out;
}

TariffSchedule tariff_from_json(const Json& j) {
  TariffSchedule s;
  for (const auto& iv : field<Json>(j, "intervals")) {
    s.intervals.push_back({field<std::size_t>(iv, "start"), field<std::size_t>(iv, "end"),
                           parse_tier(field<std::string>(iv, "tier"))});
  }
  s.validate();
  return s;
}

namespace {

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  while (true) {
    auto comma = line.find(',');
    auto cell = line.substr(0, comma);
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '"')) cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '"' || cell.back() == '\r')) cell.remove_suffix(1);
    cells.push_back(cell);
    if (comma == std::string_view::npos) return cells;
    line.remove_prefix(comma + 1);
  }
}

double number(std::string_view cell, std::size_t line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
    throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": bad number '" +
                                      std::string(cell) + "'");
  }
  return v;
}

} // namespace

PowerSeries parse_channel_csv(const std::string& text, const std::string& column) {
  std::string_view rest(text);
  std::size_t line_no = 0;
  std::optional<std::size_t> ts_col, value_col;
  std::size_t width = 0;
  std::vector<Watts> samples;
  long long first = 0, last = 0;
  while (!rest.empty()) {
    auto nl = rest.find('\n');
    auto line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    ++line_no;
    if (line.empty() || line == "\r" || line.front() == '#') continue;
    auto cells = split_cells(line);
    if (!ts_col) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i] == "unix_ts") ts_col = i;
        if (cells[i] == column) value_col = i;
      }
      if (!ts_col) throw Error(ErrorKind::Parse, "header has no 'unix_ts' column");
      if (!value_col) throw Error(ErrorKind::Validation, "no column named '" + column + "'");
      width = cells.size();
      continue;
    }
    if (cells.size() != width) {
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": expected " +
                                        std::to_string(width) + " columns");
    }
    const double ts = number(cells[*ts_col], line_no);
    const auto t = std::llround(ts);
    const Watts w = std::max(0.0, number(cells[*value_col], line_no));
    if (samples.empty()) {
      first = last = t;
      samples.push_back(w);
      continue;
    }
    if (t <= last) {
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": timestamps must increase");
    }
    samples.insert(samples.end(), static_cast<std::size_t>(t - last - 1), samples.back());
    samples.push_back(w);
    last = t;
  }
  if (!ts_col) throw Error(ErrorKind::Parse, "empty meter file");
  if (samples.empty()) throw Error(ErrorKind::Parse, "meter file has no rows");
  return PowerSeries(std::move(samples), 1.0, static_cast<double>(first));
}

PowerSeries load_channel_csv(const std::filesystem::path& path, const std::string& column) {
  try {
    return parse_channel_csv(read_text_file(path), column);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Io) throw;
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

UsageIntensity parse_intensity(const std::string& text) {
  UsageIntensity intensity;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorKind::Validation, "intensity entries look like mode=weight, got '" + item + "'");
    }
    try {
      std::size_t used = 0;
      double w = std::stod(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument("trailing");
      intensity.mode_weights[item.substr(0, eq)] = w;
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::Validation, "bad weight in '" + item + "'");
    }
  }
  intensity.validate();
  return intensity;
}

std::string format_sweep_csv(const SweepReport& report) {
  std::string out = "# appliance=" + report.appliance + " days=" + std::to_string(report.days) +
                    " delta=" + format_number(report.delta) + "\n";
  out += "n,mean_detections,std_detections\n";
  for (const auto& row : report.rows) {
    out += std::to_string(row.n) + "," + format_number(row.mean_detections) + "," +
           format_number(row.std_detections) + "\n";
  }
  return out;
}

std::string format_metrics_csv(const ClassificationReport& report) {
  std::string out = "# days=" + std::to_string(report.days) +
                    " events=" + std::to_string(report.events) + "\n";
  out += "appliance,mode,precision,recall,f1\n";
  auto emit = [&](const ModeMetrics& m) {
    out += m.appliance + "," + m.mode_id + "," + format_number(m.precision) + "," +
           format_number(m.recall) + "," + format_number(m.f1) + "\n";
  };
  for (const auto& m : report.per_appliance) emit(m);
  for (const auto& m : report.per_mode) emit(m);
  return out;
}

} // namespace supwatt::io
