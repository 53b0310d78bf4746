#include "supwatt/evaluation.hpp"

#include "supwatt/parallel.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <cmath>
#include <set>

namespace supwatt {

MatchReport match_detections(const std::vector<GroundTruthEvent>& truth,
                             std::vector<SampleIndex> detected,
                             std::size_t tolerance) {
  std::sort(detected.begin(), detected.end());
  std::vector<SampleIndex> truth_times;
  truth_times.reserve(truth.size());
  for (const auto& e : truth) truth_times.push_back(e.t_on);
  std::sort(truth_times.begin(), truth_times.end());

  MatchReport report;
  std::vector<bool> used(detected.size(), false);
  for (auto t : truth_times) {
    std::optional<std::size_t> best;
    std::size_t best_dist = 0;
    for (std::size_t i = 0; i < detected.size(); ++i) {
      if (used[i]) continue;
      auto d = detected[i];
      std::size_t dist = d > t ? d - t : t - d;
      if (dist > tolerance) continue;
      if (!best || dist < best_dist) {
        best = i;
        best_dist = dist;
      }
    }
    if (best) {
      used[*best] = true;
      report.matched_pairs.emplace_back(t, detected[*best]);
    } else {
      ++report.false_negatives;
    }
  }
  report.true_positives = report.matched_pairs.size();
  report.false_positives = detected.size() - report.true_positives;
  return report;
}

Prf1 prf1(std::size_t tp, std::size_t fp, std::size_t fn) {
  auto ratio = [](double num, double den) { return den == 0.0 ? 0.0 : num / den; };
  Prf1 m;
  m.precision = ratio(static_cast<double>(tp), static_cast<double>(tp + fp));
  m.recall = ratio(static_cast<double>(tp), static_cast<double>(tp + fn));
  m.f1 = ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
  return m;
}

std::vector<std::string> ApplianceConfig::modes() const {
  std::vector<std::string> out;
  for (const auto& [mode, supro] : supros) out.push_back(mode);
  return out;
}

void ApplianceConfig::validate() const {
  if (supros.empty()) {
    throw Error(ErrorKind::Validation, name + ": appliance has no modes");
  }
  for (const auto& [mode, supro] : supros) {
    supro.validate();
    if (supro.mode_id != mode) {
      throw Error(ErrorKind::Validation, name + ": SUPRO keyed '" + mode +
                                             "' declares mode '" + supro.mode_id + "'");
    }
  }
  const auto all = modes();
  std::set<std::string> ranked(mode_ranking.begin(), mode_ranking.end());
  if (ranked.size() != mode_ranking.size() ||
      ranked != std::set<std::string>(all.begin(), all.end())) {
    throw Error(ErrorKind::Validation,
                name + ": mode_ranking must list every mode exactly once");
  }
}

ApplianceConfig with_jitter(ApplianceConfig config, std::optional<double> jitter) {
  if (!jitter) return config;
  for (auto& [mode, supro] : config.supros) supro = with_jitter(supro, *jitter);
  return config;
}

std::vector<ModePattern> nominal_patterns(const ApplianceConfig& config, Seed seed) {
  std::vector<ModePattern> out;
  std::uint64_t stream = 0;
  for (const auto& [mode, supro] : config.supros) {
    auto sup = generate_sup(with_jitter(supro, 0.0), mix_seed(seed, stream++));
    out.push_back({mode, std::move(sup.samples)});
  }
  return out;
}

HouseholdDataset simulate_household(const ApplianceConfig& config,
                                    const std::string& household,
                                    const UsageIntensity& intensity,
                                    std::size_t days, std::size_t usages_per_day,
                                    Seed seed, const DayOptions& options) {
  HouseholdDataset out{household, config.name, {}};
  std::vector<std::optional<SimulatedDay>> slots(days);
  parallel_for(days, [&](std::size_t d) {
    slots[d] = generate_day(config.supros, intensity, config.cdf, usages_per_day,
                            mix_seed(seed, d), options);
  });
  out.days.reserve(days);
  for (auto& s : slots) out.days.push_back(std::move(*s));
  return out;
}

SweepReport sweep_pattern_size(const ApplianceConfig& config,
                               const std::vector<std::size_t>& n_values,
                               const SweepOptions& options) {
  if (n_values.empty()) {
    throw Error(ErrorKind::Validation, "sweep needs at least one reference size");
  }
  if (options.days == 0) {
    throw Error(ErrorKind::Validation, "sweep needs at least one day");
  }
  config.validate();
  const auto uniform = uniform_intensity(config.modes());

  // counts[day][n_index]
  std::vector<std::vector<std::size_t>> counts(options.days);
  parallel_for(options.days, [&](std::size_t d) {
    auto day = generate_day(config.supros, uniform, config.cdf, 1,
                            mix_seed(options.seed, 3 * d), options.day);
    const auto ref_mode = options.reference == ReferenceSource::RandomMode
                              ? sample_mode(uniform, mix_seed(options.seed, 3 * d + 2))
                              : day.truth.front().mode_id;
    auto ref_sup = generate_sup(config.supros.at(ref_mode), mix_seed(options.seed, 3 * d + 1));
    counts[d].reserve(n_values.size());
    for (auto n : n_values) {
      auto ref = make_reference_pattern(ref_sup, n);
      counts[d].push_back(detect(day.series, ref, options.detect).turn_on_times.size());
    }
  });

  SweepReport report{config.name, options.days, options.detect.delta, {}};
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    SweepRow row;
    row.n = n_values[i];
    double sum = 0.0;
    for (std::size_t d = 0; d < options.days; ++d) {
      row.counts.push_back(counts[d][i]);
      sum += static_cast<double>(counts[d][i]);
    }
    row.mean_detections = sum / static_cast<double>(options.days);
    double var = 0.0;
    for (auto c : row.counts) {
      double diff = static_cast<double>(c) - row.mean_detections;
      var += diff * diff;
    }
    row.std_detections = std::sqrt(var / static_cast<double>(options.days));
    report.rows.push_back(std::move(row));
  }
  return report;
}

namespace {

struct Outcome {
  std::optional<std::string> truth_mode;
  std::optional<std::string> predicted_mode;
};

std::vector<Outcome> score_day(const SimulatedDay& day, const std::string& appliance,
                               const std::vector<ModePattern>& patterns,
                               const EvaluateOptions& options) {
  std::vector<Outcome> out;
  if (!options.end_to_end) {
    for (const auto& truth : day.truth) {
      auto event = classify(day.series, truth.t_on, patterns, options.dtw);
      out.push_back({truth.mode_id, event.chosen_mode});
    }
    return out;
  }

  auto ref = options.references.find(appliance);
  if (ref == options.references.end()) {
    throw Error(ErrorKind::Validation, "no detection reference for " + appliance);
  }
  auto detection = detect(day.series, ref->second, options.detect);
  auto events = classify_day(day.series, detection, patterns, options.dtw);
  std::vector<SampleIndex> times;
  for (const auto& e : events) times.push_back(e.t_on);
  auto match = match_detections(day.truth, times, options.tolerance);

  std::map<SampleIndex, const ClassifiedEvent*> by_time;
  for (const auto& e : events) by_time[e.t_on] = &e;
  std::map<SampleIndex, const GroundTruthEvent*> truth_by_time;
  for (const auto& t : day.truth) truth_by_time[t.t_on] = &t;

  std::set<SampleIndex> matched_detections;
  std::set<SampleIndex> matched_truths;
  for (const auto& [truth_t, det_t] : match.matched_pairs) {
    matched_truths.insert(truth_t);
    matched_detections.insert(det_t);
    out.push_back({truth_by_time.at(truth_t)->mode_id, by_time.at(det_t)->chosen_mode});
  }
  for (const auto& t : day.truth) {
    if (!matched_truths.contains(t.t_on)) out.push_back({t.mode_id, std::nullopt});
  }
  for (const auto& e : events) {
    if (!matched_detections.contains(e.t_on)) out.push_back({std::nullopt, e.chosen_mode});
  }
  return out;
}

ModeMetrics finish(std::string appliance, std::string mode, std::size_t tp,
                   std::size_t fp, std::size_t fn) {
  auto m = prf1(tp, fp, fn);
  return ModeMetrics{std::move(appliance), std::move(mode), tp, fp, fn,
                     m.precision, m.recall, m.f1};
}

} // namespace

ClassificationReport evaluate_classification(
    const std::vector<HouseholdDataset>& households,
    const std::map<std::string, std::vector<ModePattern>>& patterns,
    const EvaluateOptions& options) {
  struct Job {
    std::size_t household;
    std::size_t day;
  };
  std::vector<Job> jobs;
  for (std::size_t h = 0; h < households.size(); ++h) {
    if (!patterns.contains(households[h].appliance)) {
      throw Error(ErrorKind::Validation, "no patterns for appliance " + households[h].appliance);
    }
    for (std::size_t d = 0; d < households[h].days.size(); ++d) jobs.push_back({h, d});
  }

  std::vector<std::vector<Outcome>> results(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    const auto& hh = households[jobs[i].household];
    results[i] = score_day(hh.days[jobs[i].day], hh.appliance, patterns.at(hh.appliance), options);
  });

  // counts[(appliance, mode)] = {tp, fp, fn}
  std::map<std::pair<std::string, std::string>, std::array<std::size_t, 3>> counts;
  ClassificationReport report;
  report.days = jobs.size();
  for (const auto& [appliance, list] : patterns) {
    for (const auto& p : list) counts[{appliance, p.mode_id}];
  }
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& appliance = households[jobs[i].household].appliance;
    for (const auto& o : results[i]) {
      if (o.truth_mode) ++report.events;
      if (o.truth_mode && o.predicted_mode && *o.truth_mode == *o.predicted_mode) {
        ++counts[{appliance, *o.truth_mode}][0];
        continue;
      }
      if (o.predicted_mode) ++counts[{appliance, *o.predicted_mode}][1];
      if (o.truth_mode) ++counts[{appliance, *o.truth_mode}][2];
    }
  }

  std::map<std::string, std::array<std::size_t, 3>> overall;
  for (const auto& [key, c] : counts) {
    report.per_appliance.push_back(finish(key.first, key.second, c[0], c[1], c[2]));
    auto& o = overall[key.second];
    for (std::size_t k = 0; k < 3; ++k) o[k] += c[k];
  }
  for (const auto& [mode, c] : overall) {
    report.per_mode.push_back(finish("all", mode, c[0], c[1], c[2]));
  }
  return report;
}

void TariffSchedule::validate() const {
  if (intervals.empty()) {
    throw Error(ErrorKind::Validation, "tariff schedule is empty");
  }
  std::size_t cursor = 0;
  for (const auto& iv : intervals) {
    if (iv.start != cursor || iv.end <= iv.start) {
      throw Error(ErrorKind::Validation,
                  "tariff intervals must be contiguous and nonempty starting at 0");
    }
    cursor = iv.end;
  }
  if (cursor != 86400) {
    throw Error(ErrorKind::Validation, "tariff intervals must end at 86400");
  }
}

Tier TariffSchedule::tier_at(std::size_t second_of_day) const {
  second_of_day %= 86400;
  for (const auto& iv : intervals) {
    if (second_of_day >= iv.start && second_of_day < iv.end) return iv.tier;
  }
  throw Error(ErrorKind::Validation, "second not covered by tariff schedule");
}

std::string to_string(Tier tier) {
  switch (tier) {
  case Tier::OnPeak: return "on-peak";
  case Tier::MidPeak: return "mid-peak";
  case Tier::OffPeak: return "off-peak";
  }
  return "?";
}

std::string to_string(Advice advice) {
  switch (advice) {
  case Advice::ShiftEarlier: return "shift-earlier";
  case Advice::ShiftLater: return "shift-later";
  case Advice::UseLighterMode: return "use-lighter-mode";
  case Advice::None: return "none";
  }
  return "?";
}

Tier parse_tier(const std::string& text) {
  if (text == "on-peak") return Tier::OnPeak;
  if (text == "mid-peak") return Tier::MidPeak;
  if (text == "off-peak") return Tier::OffPeak;
  throw Error(ErrorKind::Validation, "unknown tariff tier '" + text + "'");
}

namespace {

std::string clock(std::size_t second_of_day) {
  second_of_day %= 86400;
  char buf[8];
  std::snprintf(buf, sizeof(buf), "%02zu:%02zu", second_of_day / 3600,
                (second_of_day % 3600) / 60);
  return buf;
}

} // namespace

Recommendation recommend(const ClassifiedEvent& event,
                         const TariffSchedule& schedule,
                         const std::vector<std::string>& mode_ranking) {
  schedule.validate();
  auto rank = std::find(mode_ranking.begin(), mode_ranking.end(), event.chosen_mode);
  if (rank == mode_ranking.end()) {
    throw Error(ErrorKind::Validation, "mode '" + event.chosen_mode + "' missing from ranking");
  }

  Recommendation rec;
  rec.t_on = event.t_on;
  rec.mode = event.chosen_mode;
  const auto t = static_cast<long long>(event.t_on % 86400);
  const auto tier = schedule.tier_at(event.t_on);
  std::string detail = "start " + clock(event.t_on) + " falls in " + to_string(tier);

  if (tier == Tier::OnPeak) {
    // Off-peak seconds on either side, looking across midnight as well.
    std::optional<long long> earlier, later;
    for (long long wrap : {-86400LL, 0LL, 86400LL}) {
      for (const auto& iv : schedule.intervals) {
        if (iv.tier != Tier::OffPeak) continue;
        long long last = static_cast<long long>(iv.end) - 1 + wrap;
        long long first = static_cast<long long>(iv.start) + wrap;
        if (last < t && (!earlier || last > *earlier)) earlier = last;
        if (first > t && (!later || first < *later)) later = first;
      }
    }
    if (earlier && later) {
      if (t - *earlier < *later - t) {
        later.reset();
      } else {
        earlier.reset();
      }
    }
    if (earlier || later) {
      long long target = earlier ? *earlier : *later;
      rec.advice.push_back(earlier ? Advice::ShiftEarlier : Advice::ShiftLater);
      rec.suggested_t_on = static_cast<std::size_t>((target % 86400 + 86400) % 86400);
      detail += "; shift " + std::string(earlier ? "earlier" : "later") + " to " +
                clock(*rec.suggested_t_on) + " (off-peak)";
    }
  }
  if (rank != mode_ranking.begin()) {
    rec.advice.push_back(Advice::UseLighterMode);
    detail += "; '" + mode_ranking.front() + "' mode uses less energy than '" +
              event.chosen_mode + "'";
  }
  if (rec.advice.empty()) {
    rec.advice.push_back(Advice::None);
    detail += "; no change needed";
  }
  rec.detail = detail;
  return rec;
}

} // namespace supwatt
