#pragma once

#include "supwatt/core.hpp"
#include "supwatt/detection.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace supwatt {

struct ModePattern {
  std::string mode_id;
  std::vector<Watts> pattern;

  std::size_t k() const noexcept { return pattern.size(); }
};

struct Segment {
  PowerSeries series;
  // Set when the requested length ran past the end of the day.
  bool truncated = false;
};

Segment segment(const PowerSeries& day, SampleIndex t_on, std::size_t k);

struct DtwOptions {
  // Sakoe-Chiba half-width; unset means unconstrained. The effective width is
  // never narrower than the length difference, so a path always exists.
  std::optional<std::size_t> band;
  // Divide the cumulative cost by the number of steps on the optimal path.
  bool normalize = false;
};

double dtw_distance(std::span<const Watts> x, std::span<const Watts> y,
                    const DtwOptions& options = {});

struct DtwAlignment {
  double distance = 0.0;
  // (i, j) pairs from (0, 0) to (len(x) - 1, len(y) - 1).
  std::vector<std::pair<std::size_t, std::size_t>> path;
};

// Full-matrix variant that also traces the optimal warping path.
DtwAlignment dtw_align(std::span<const Watts> x, std::span<const Watts> y,
                       const DtwOptions& options = {});

struct ClassifiedEvent {
  SampleIndex t_on = 0;
  std::string chosen_mode;
  double min_distance = 0.0;
  std::map<std::string, double> distances;
  bool truncated = false;
};

ClassifiedEvent classify(const PowerSeries& day, SampleIndex t_on,
                         const std::vector<ModePattern>& patterns,
                         const DtwOptions& options = {});

std::vector<ClassifiedEvent> classify_day(const PowerSeries& day,
                                          const DetectionResult& detection,
                                          const std::vector<ModePattern>& patterns,
                                          const DtwOptions& options = {});

} // namespace supwatt
