#pragma once

#include "supwatt/core.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace supwatt {

using Seed = std::uint64_t;

// Portable RNG wrapper: draws are defined in terms of raw mt19937_64 output so
// traces are identical across standard library implementations.
class Rng {
public:
  explicit Rng(Seed seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // Uniform integer in [lo, hi].
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);
  double normal(double mean, double sigma);

private:
  std::mt19937_64 engine_;
};

// Derives an independent stream seed; used to fan one seed out across days,
// households and references.
Seed mix_seed(Seed seed, std::uint64_t stream);

struct Cycle {
  double duration_s = 1.0;
  Watts watts = 0.0;
  double duration_jitter = 0.05;
};

struct Phase {
  std::vector<Cycle> cycles;
  std::uint32_t rep_lower = 1;
  std::uint32_t rep_upper = 1;
};

struct Supro {
  std::string appliance_id;
  std::string mode_id;
  std::vector<Phase> phases;

  // Throws Error{Validation} on any broken invariant.
  void validate() const;
};

// Copy of `supro` with every cycle's jitter replaced.
Supro with_jitter(Supro supro, double jitter);

Sup generate_sup(const Supro& supro, Seed seed);
std::size_t cycle_samples(const Cycle& cycle, double u);

class EmpiricalCdf {
public:
  EmpiricalCdf(std::vector<double> support, std::vector<double> cumulative);

  std::span<const double> support() const noexcept { return support_; }
  std::span<const double> cumulative() const noexcept { return cumulative_; }

  // P(X <= x).
  double evaluate(double x) const;
  // Smallest support value whose cumulative probability is >= u.
  double inverse(double u) const;

private:
  std::vector<double> support_;
  std::vector<double> cumulative_;
};

EmpiricalCdf build_empirical_cdf(std::vector<double> turn_on_samples);
double sample_turn_on_time(const EmpiricalCdf& cdf, Seed seed);

// Mode weights keyed by mode_id; std::map keeps the lexicographic order the
// multinomial draw relies on.
struct UsageIntensity {
  std::map<std::string, double> mode_weights;

  void validate() const;
  const std::string& mode_at(double u) const;
};

std::string sample_mode(const UsageIntensity& intensity, Seed seed);

// Three-mode default: `dominant` gets 0.6, the others 0.2 each.
UsageIntensity three_mode_intensity(const std::vector<std::string>& modes,
                                    const std::string& dominant);
UsageIntensity uniform_intensity(const std::vector<std::string>& modes);

struct GroundTruthEvent {
  SampleIndex t_on = 0;
  std::string mode_id;
  std::size_t duration = 0;

  bool operator==(const GroundTruthEvent&) const = default;
};

struct DayOptions {
  std::size_t day_length = 86400;
  std::size_t max_retries = 100;
  double noise_sigma = 0.0;
};

struct SimulatedDay {
  PowerSeries series;
  std::vector<GroundTruthEvent> truth;
  // SUPs in the same order as `truth`.
  std::vector<Sup> sups;
};

SimulatedDay generate_day(const std::map<std::string, Supro>& supros,
                          const UsageIntensity& intensity,
                          const EmpiricalCdf& cdf, std::size_t usages_per_day,
                          Seed seed, const DayOptions& options = {});

} // namespace supwatt
