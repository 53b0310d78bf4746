#include "supwatt/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

namespace supwatt {

PowerSeries::PowerSeries(std::vector<Watts> samples, double sample_rate,
                         double epoch)
    : samples_(std::move(samples)), sample_rate_(sample_rate), epoch_(epoch) {
  if (samples_.empty()) {
    throw Error(ErrorKind::Validation, "power series must have at least one sample");
  }
  if (!(sample_rate_ > 0.0) || !std::isfinite(sample_rate_)) {
    throw Error(ErrorKind::Validation, "sample rate must be positive");
  }
  if (!std::isfinite(epoch_)) {
    throw Error(ErrorKind::Validation, "epoch must be finite");
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!(samples_[i] >= 0.0) || !std::isfinite(samples_[i])) {
      throw Error(ErrorKind::Validation,
                  "negative or non-finite watts at sample " + std::to_string(i));
    }
  }
}

PowerSeries slice(const PowerSeries& series, std::size_t start,
                  std::size_t len) {
  if (start > series.size() || len > series.size() - start || len == 0) {
    throw Error(ErrorKind::OutOfRange,
                "slice [" + std::to_string(start) + ", +" + std::to_string(len) +
                    ") outside series of length " + std::to_string(series.size()));
  }
  auto s = series.samples().subspan(start, len);
  return PowerSeries({s.begin(), s.end()}, series.sample_rate(),
                     series.epoch() + static_cast<double>(start) / series.sample_rate());
}

Watts max_value(std::span<const Watts> samples) {
  if (samples.empty()) {
    throw Error(ErrorKind::Validation, "max of empty series");
  }
  return *std::max_element(samples.begin(), samples.end());
}

std::string format_number(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) {
    throw Error(ErrorKind::Validation, "cannot format number");
  }
  return std::string(buf, end);
}

namespace {

double parse_double(std::string_view text, std::size_t line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) +
                                      ": bad number '" + std::string(text) + "'");
  }
  return v;
}

std::string_view trim_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

// Parses "key=value" tokens from the metadata comment.
void parse_metadata(std::string_view line, std::size_t line_no, double& rate,
                    double& epoch) {
  line.remove_prefix(1);
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && line[pos] == ' ') ++pos;
    if (pos >= line.size()) break;
    auto end = line.find(' ', pos);
    if (end == std::string_view::npos) end = line.size();
    auto token = line.substr(pos, end - pos);
    auto eq = token.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) +
                                        ": malformed metadata token");
    }
    auto key = token.substr(0, eq);
    auto value = parse_double(token.substr(eq + 1), line_no);
    if (key == "rate") {
      rate = value;
    } else if (key == "epoch") {
      epoch = value;
    }
    pos = end;
  }
}

} // namespace

PowerSeries parse_series(const std::string& text) {
  double rate = 1.0;
  double epoch = 0.0;
  bool header_seen = false;
  std::vector<Watts> samples;

  std::string_view rest(text);
  std::size_t line_no = 0;
  while (!rest.empty()) {
    auto nl = rest.find('\n');
    auto line = trim_cr(rest.substr(0, nl));
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    ++line_no;

    if (line.empty()) continue;
    if (line.front() == '#') {
      if (header_seen) {
        throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) +
                                          ": metadata after header");
      }
      parse_metadata(line, line_no, rate, epoch);
      continue;
    }
    if (!header_seen) {
      if (line != "t,watts") {
        throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) +
                                          ": expected header 't,watts'");
      }
      header_seen = true;
      continue;
    }

    auto comma = line.find(',');
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) +
                                        ": expected two columns");
    }
    auto t_text = line.substr(0, comma);
    std::size_t t = 0;
    auto [ptr, ec] = std::from_chars(t_text.data(), t_text.data() + t_text.size(), t);
    if (ec != std::errc{} || ptr != t_text.data() + t_text.size()) {
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) +
                                        ": bad sample index");
    }
    if (t != samples.size()) {
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) +
                                        ": sample index " + std::to_string(t) +
                                        " breaks the gap-free sequence");
    }
    double w = parse_double(line.substr(comma + 1), line_no);
    if (w < 0.0) {
      throw Error(ErrorKind::Validation, "line " + std::to_string(line_no) +
                                             ": negative watts");
    }
    samples.push_back(w);
  }
  if (samples.empty()) {
    throw Error(ErrorKind::Parse, "trace has no samples");
  }
  return PowerSeries(std::move(samples), rate, epoch);
}

std::string format_series(const PowerSeries& series) {
  std::string out;
  out.reserve(series.size() * 10 + 64);
  out += "# rate=" + format_number(series.sample_rate()) +
         " epoch=" + format_number(series.epoch()) + "\n";
  out += "t,watts\n";
  char buf[64];
  for (std::size_t i = 0; i < series.size(); ++i) {
    auto [p1, e1] = std::to_chars(buf, buf + sizeof(buf), i);
    *p1++ = ',';
    auto [p2, e2] = std::to_chars(p1, buf + sizeof(buf), series[i]);
    *p2++ = '\n';
    out.append(buf, p2);
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::Io, "cannot write " + path.string());
  }
  out << text;
  if (!out) {
    throw Error(ErrorKind::Io, "write failed for " + path.string());
  }
}

PowerSeries load_series(const std::filesystem::path& path, TraceFormat) {
  auto text = read_text_file(path);
  if (text.empty()) {
    throw Error(ErrorKind::Parse, path.string() + ": empty file");
  }
  return parse_series(text);
}

void save_series(const PowerSeries& series, const std::filesystem::path& path,
                 TraceFormat) {
  write_text_file(path, format_series(series));
}

} // namespace supwatt
