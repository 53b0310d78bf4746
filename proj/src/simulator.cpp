#include "supwatt/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace supwatt {

std::uint64_t Rng::uniform_int(std::uint64_t lo, std::uint64_t hi) {
  if (hi <= lo) return lo;
  auto span = hi - lo + 1;
  auto offset = static_cast<std::uint64_t>(uniform() * static_cast<double>(span));
  return lo + std::min(offset, span - 1);
}

double Rng::normal(double mean, double sigma) {
  // Box-Muller; 1 - uniform() keeps the log argument in (0, 1].
  double u1 = 1.0 - uniform();
  double u2 = uniform();
  return mean + sigma * std::sqrt(-2.0 * std::log(u1)) *
                    std::cos(2.0 * std::numbers::pi * u2);
}

Seed mix_seed(Seed seed, std::uint64_t stream) {
  // splitmix64 finalizer over the combined value
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void Supro::validate() const {
  auto where = appliance_id + "/" + mode_id;
  if (phases.empty()) {
    throw Error(ErrorKind::Validation, where + ": SUPRO needs at least one phase");
  }
  for (std::size_t p = 0; p < phases.size(); ++p) {
    const auto& phase = phases[p];
    auto at = where + " phase " + std::to_string(p);
    if (phase.cycles.empty()) {
      throw Error(ErrorKind::Validation, at + ": phase needs at least one cycle");
    }
    if (phase.rep_lower < 1 || phase.rep_upper < phase.rep_lower) {
      throw Error(ErrorKind::Validation, at + ": need 1 <= rep_lower <= rep_upper");
    }
    for (const auto& c : phase.cycles) {
      if (!(c.duration_s > 0.0) || !std::isfinite(c.duration_s)) {
        throw Error(ErrorKind::Validation, at + ": cycle duration must be > 0");
      }
      if (!(c.watts >= 0.0) || !std::isfinite(c.watts)) {
        throw Error(ErrorKind::Validation, at + ": cycle watts must be >= 0");
      }
      if (!(c.duration_jitter >= 0.0 && c.duration_jitter < 1.0)) {
        throw Error(ErrorKind::Validation, at + ": duration_jitter must be in [0, 1)");
      }
    }
  }
}

Supro with_jitter(Supro supro, double jitter) {
  for (auto& phase : supro.phases) {
    for (auto& c : phase.cycles) c.duration_jitter = jitter;
  }
  return supro;
}

std::size_t cycle_samples(const Cycle& cycle, double u) {
  auto n = std::llround(cycle.duration_s * (1.0 + u));
  return static_cast<std::size_t>(std::max<long long>(n, 1));
}

Sup generate_sup(const Supro& supro, Seed seed) {
  supro.validate();
  Rng rng(seed);
  Sup sup{{}, supro.mode_id, supro.appliance_id};
  for (const auto& phase : supro.phases) {
    auto reps = rng.uniform_int(phase.rep_lower, phase.rep_upper);
    for (std::uint64_t r = 0; r < reps; ++r) {
      for (const auto& cycle : phase.cycles) {
        // Draw even when jitter is zero so the stream layout is config-independent.
        double u = (2.0 * rng.uniform() - 1.0) * cycle.duration_jitter;
        sup.samples.insert(sup.samples.end(), cycle_samples(cycle, u), cycle.watts);
      }
    }
  }
  return sup;
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> support,
                           std::vector<double> cumulative)
    : support_(std::move(support)), cumulative_(std::move(cumulative)) {
  if (support_.empty() || support_.size() != cumulative_.size()) {
    throw Error(ErrorKind::Validation, "CDF needs matching, nonempty support and probabilities");
  }
  for (std::size_t i = 1; i < support_.size(); ++i) {
    if (!(support_[i] > support_[i - 1])) {
      throw Error(ErrorKind::Validation, "CDF support must be strictly increasing");
    }
    if (cumulative_[i] < cumulative_[i - 1]) {
      throw Error(ErrorKind::Validation, "CDF probabilities must be nondecreasing");
    }
  }
  if (cumulative_.front() < 0.0 || cumulative_.back() != 1.0) {
    throw Error(ErrorKind::Validation, "CDF must end at exactly 1");
  }
}

double EmpiricalCdf::evaluate(double x) const {
  auto it = std::upper_bound(support_.begin(), support_.end(), x);
  if (it == support_.begin()) return 0.0;
  return cumulative_[static_cast<std::size_t>(it - support_.begin()) - 1];
}

double EmpiricalCdf::inverse(double u) const {
  auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  return support_[static_cast<std::size_t>(it - cumulative_.begin())];
}

EmpiricalCdf build_empirical_cdf(std::vector<double> turn_on_samples) {
  if (turn_on_samples.empty()) {
    throw Error(ErrorKind::Validation, "cannot build a CDF from no samples");
  }
  std::sort(turn_on_samples.begin(), turn_on_samples.end());
  std::vector<double> support;
  std::vector<double> cumulative;
  const auto total = static_cast<double>(turn_on_samples.size());
  for (std::size_t i = 0; i < turn_on_samples.size(); ++i) {
    if (i + 1 < turn_on_samples.size() && turn_on_samples[i + 1] == turn_on_samples[i]) {
      continue;
    }
    support.push_back(turn_on_samples[i]);
    cumulative.push_back(static_cast<double>(i + 1) / total);
  }
  cumulative.back() = 1.0;
  return EmpiricalCdf(std::move(support), std::move(cumulative));
}

double sample_turn_on_time(const EmpiricalCdf& cdf, Seed seed) {
  Rng rng(seed);
  return cdf.inverse(rng.uniform());
}

void UsageIntensity::validate() const {
  if (mode_weights.empty()) {
    throw Error(ErrorKind::Validation, "usage intensity has no modes");
  }
  double sum = 0.0;
  for (const auto& [mode, w] : mode_weights) {
    if (!(w >= 0.0)) {
      throw Error(ErrorKind::Validation, "negative weight for mode " + mode);
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorKind::Validation, "usage intensity weights must sum to 1");
  }
}

const std::string& UsageIntensity::mode_at(double u) const {
  double cum = 0.0;
  const std::string* last_positive = nullptr;
  for (const auto& [mode, w] : mode_weights) {
    if (w <= 0.0) continue;
    cum += w;
    last_positive = &mode;
    if (cum >= u) return mode;
  }
  // Rounding can leave the final cumulative weight a hair below u.
  return *last_positive;
}

std::string sample_mode(const UsageIntensity& intensity, Seed seed) {
  intensity.validate();
  Rng rng(seed);
  return intensity.mode_at(rng.uniform());
}

UsageIntensity three_mode_intensity(const std::vector<std::string>& modes,
                                    const std::string& dominant) {
  if (modes.size() != 3) {
    throw Error(ErrorKind::Validation,
                "the 0.2/0.2/0.6 split is only defined for three modes");
  }
  UsageIntensity intensity;
  for (const auto& m : modes) intensity.mode_weights[m] = m == dominant ? 0.6 : 0.2;
  if (!intensity.mode_weights.contains(dominant)) {
    throw Error(ErrorKind::Validation, "unknown dominant mode " + dominant);
  }
  return intensity;
}

UsageIntensity uniform_intensity(const std::vector<std::string>& modes) {
  if (modes.empty()) {
    throw Error(ErrorKind::Validation, "no modes");
  }
  UsageIntensity intensity;
  for (const auto& m : modes) intensity.mode_weights[m] = 1.0 / static_cast<double>(modes.size());
  return intensity;
}

SimulatedDay generate_day(const std::map<std::string, Supro>& supros,
                          const UsageIntensity& intensity,
                          const EmpiricalCdf& cdf, std::size_t usages_per_day,
                          Seed seed, const DayOptions& options) {
  intensity.validate();
  for (const auto& [mode, w] : intensity.mode_weights) {
    if (w > 0.0 && !supros.contains(mode)) {
      throw Error(ErrorKind::Validation, "no SUPRO for mode " + mode);
    }
  }
  if (options.day_length == 0) {
    throw Error(ErrorKind::Validation, "day length must be positive");
  }

  Rng rng(seed);
  std::vector<Watts> samples(options.day_length, 0.0);
  struct Placed {
    GroundTruthEvent event;
    Sup sup;
  };
  std::vector<Placed> placed;

  for (std::size_t u = 0; u < usages_per_day; ++u) {
    auto mode = sample_mode(intensity, rng.next());
    auto sup = generate_sup(supros.at(mode), rng.next());
    const auto len = sup.samples.size();

    bool ok = false;
    for (std::size_t attempt = 0; attempt <= options.max_retries && !ok; ++attempt) {
      double when = sample_turn_on_time(cdf, rng.next());
      if (when < 0.0) continue;
      auto t_on = static_cast<std::size_t>(std::llround(when));
      if (t_on + len > options.day_length) continue;
      bool overlaps = std::any_of(placed.begin(), placed.end(), [&](const Placed& p) {
        return t_on < p.event.t_on + p.event.duration && p.event.t_on < t_on + len;
      });
      if (overlaps) continue;
      placed.push_back({{t_on, mode, len}, std::move(sup)});
      ok = true;
    }
    if (!ok) {
      throw Error(ErrorKind::Placement,
                  "could not place usage " + std::to_string(u) + " after " +
                      std::to_string(options.max_retries) + " retries");
    }
  }

  std::sort(placed.begin(), placed.end(), [](const Placed& a, const Placed& b) {
    return a.event.t_on < b.event.t_on;
  });

  SimulatedDay day{PowerSeries({0.0}), {}, {}};
  for (auto& p : placed) {
    std::copy(p.sup.samples.begin(), p.sup.samples.end(),
              samples.begin() + static_cast<std::ptrdiff_t>(p.event.t_on));
    day.truth.push_back(p.event);
    day.sups.push_back(std::move(p.sup));
  }
  if (options.noise_sigma > 0.0) {
    for (auto& s : samples) s = std::max(0.0, s + rng.normal(0.0, options.noise_sigma));
  }
  day.series = PowerSeries(std::move(samples), 1.0, 0.0);
  return day;
}

} // namespace supwatt
