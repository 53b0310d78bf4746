#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace supwatt {

enum class ErrorKind {
  Parse,
  Validation,
  OutOfRange,
  Io,
  Placement,
};

// Single exception type for the library; `kind()` drives CLI exit codes.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

using Watts = double;
using SampleIndex = std::size_t;

// Uniformly sampled, gap-free power trace. Immutable after construction.
class PowerSeries {
public:
  PowerSeries(std::vector<Watts> samples, double sample_rate = 1.0,
              double epoch = 0.0);

  std::span<const Watts> samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double sample_rate() const noexcept { return sample_rate_; }
  double epoch() const noexcept { return epoch_; }
  Watts operator[](std::size_t i) const noexcept { return samples_[i]; }

  bool operator==(const PowerSeries&) const = default;

private:
  std::vector<Watts> samples_;
  double sample_rate_;
  double epoch_;
};

// One appliance run, t_on through t_off inclusive.
struct Sup {
  std::vector<Watts> samples;
  std::string mode_id;
  std::string appliance_id;
};

// Prefix of a SUP used as the matching template.
struct ReferencePattern {
  std::vector<Watts> samples;
  std::string appliance_id;
  std::string source_mode_id;

  std::size_t n() const noexcept { return samples.size(); }
};

PowerSeries slice(const PowerSeries& series, std::size_t start,
                  std::size_t len);

Watts max_value(std::span<const Watts> samples);
inline Watts max_value(const PowerSeries& series) {
  return max_value(series.samples());
}

// Trace CSV:
//   # rate=<Hz> epoch=<seconds>
//   t,watts
//   0,<w>
//   ...
PowerSeries parse_series(const std::string& text);
std::string format_series(const PowerSeries& series);

enum class TraceFormat { Csv };

PowerSeries load_series(const std::filesystem::path& path,
                        TraceFormat format = TraceFormat::Csv);
void save_series(const PowerSeries& series, const std::filesystem::path& path,
                 TraceFormat format = TraceFormat::Csv);

// Shortest round-trip decimal representation.
std::string format_number(double value);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path,
                     const std::string& text);

} // namespace supwatt
