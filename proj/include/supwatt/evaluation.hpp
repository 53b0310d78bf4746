#pragma once

#include "supwatt/classification.hpp"
#include "supwatt/detection.hpp"
#include "supwatt/simulator.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace supwatt {

// ---------------------------------------------------------------------------
// Scoring

struct MatchReport {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  // (truth t_on, detected t_on)
  std::vector<std::pair<SampleIndex, SampleIndex>> matched_pairs;
};

// Greedy nearest match in ascending truth order; each side used at most once.
// Distance ties go to the earlier detection.
MatchReport match_detections(const std::vector<GroundTruthEvent>& truth,
                             std::vector<SampleIndex> detected,
                             std::size_t tolerance);

struct Prf1 {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// 0/0 is defined as 0 for every ratio.
Prf1 prf1(std::size_t tp, std::size_t fp, std::size_t fn);

struct ModeMetrics {
  std::string appliance; // "all" for the cross-appliance rows
  std::string mode_id;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// ---------------------------------------------------------------------------
// Experiment configuration

struct ApplianceConfig {
  std::string name;
  std::map<std::string, Supro> supros;
  EmpiricalCdf cdf;
  // Lightest first.
  std::vector<std::string> mode_ranking;

  std::vector<std::string> modes() const;
  void validate() const;
};

// Overrides every cycle's jitter when set.
ApplianceConfig with_jitter(ApplianceConfig config, std::optional<double> jitter);

// Jitter-free SUP per mode, in lexicographic mode order.
std::vector<ModePattern> nominal_patterns(const ApplianceConfig& config,
                                          Seed seed = 0);

// Simulated days for one household and appliance.
struct HouseholdDataset {
  std::string household;
  std::string appliance;
  std::vector<SimulatedDay> days;
};

HouseholdDataset simulate_household(const ApplianceConfig& config,
                                    const std::string& household,
                                    const UsageIntensity& intensity,
                                    std::size_t days, std::size_t usages_per_day,
                                    Seed seed, const DayOptions& options = {});

// ---------------------------------------------------------------------------
// Reference-size sweep

enum class ReferenceSource {
  // Reference sliced from an independent SUP of a uniformly drawn mode.
  RandomMode,
  // Reference sliced from a fresh SUP of the same mode as the day's usage.
  SameModeAsDay,
};

struct SweepOptions {
  std::size_t days = 100;
  Seed seed = 0;
  DetectOptions detect;
  ReferenceSource reference = ReferenceSource::RandomMode;
  DayOptions day;
};

struct SweepRow {
  std::size_t n = 0;
  double mean_detections = 0.0;
  double std_detections = 0.0;
  // Per-day raw counts, in day order.
  std::vector<std::size_t> counts;
};

struct SweepReport {
  std::string appliance;
  std::size_t days = 0;
  double delta = 0.0;
  std::vector<SweepRow> rows;
};

SweepReport sweep_pattern_size(const ApplianceConfig& config,
                               const std::vector<std::size_t>& n_values,
                               const SweepOptions& options);

// ---------------------------------------------------------------------------
// Classification evaluation

struct EvaluateOptions {
  DtwOptions dtw;
  // Classify detector output instead of ground-truth turn-on times.
  bool end_to_end = false;
  DetectOptions detect;
  // Detection template per appliance; required for the end-to-end path.
  std::map<std::string, ReferencePattern> references;
  std::size_t tolerance = 30;
};

struct ClassificationReport {
  std::vector<ModeMetrics> per_mode;      // appliance == "all"
  std::vector<ModeMetrics> per_appliance; // sorted by (appliance, mode)
  std::size_t events = 0;
  std::size_t days = 0;
};

ClassificationReport evaluate_classification(
    const std::vector<HouseholdDataset>& households,
    const std::map<std::string, std::vector<ModePattern>>& patterns,
    const EvaluateOptions& options = {});

// ---------------------------------------------------------------------------
// Demand-response advice

enum class Tier { OnPeak, MidPeak, OffPeak };

struct TariffInterval {
  std::size_t start = 0; // second of day, inclusive
  std::size_t end = 0;   // exclusive
  Tier tier = Tier::OffPeak;
};

struct TariffSchedule {
  std::vector<TariffInterval> intervals;

  // Intervals must tile [0, 86400) in order.
  void validate() const;
  Tier tier_at(std::size_t second_of_day) const;
};

enum class Advice { ShiftEarlier, ShiftLater, UseLighterMode, None };

struct Recommendation {
  SampleIndex t_on = 0;
  std::string mode;
  std::vector<Advice> advice;
  std::optional<std::size_t> suggested_t_on;
  std::string detail;
};

Recommendation recommend(const ClassifiedEvent& event,
                         const TariffSchedule& schedule,
                         const std::vector<std::string>& mode_ranking);

std::string to_string(Tier tier);
std::string to_string(Advice advice);
Tier parse_tier(const std::string& text);

} // namespace supwatt
