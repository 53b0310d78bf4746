#pragma once

#include "supwatt/core.hpp"

#include <vector>

namespace supwatt {

// Lag-indexed similarity X(t) for t in [0, m - n].
struct CorrelationTrace {
  std::vector<double> values;
  std::size_t n = 0;
  // (max(S) + max(D)) / 2, the value X reaches on a perfect overlap.
  double norm_level = 0.0;
};

struct ResiduePeriod {
  std::size_t start = 0;
  std::size_t end = 0; // inclusive
  std::size_t argmax = 0;
  double max_value = 0.0;

  bool operator==(const ResiduePeriod&) const = default;
};

struct DetectionResult {
  std::vector<SampleIndex> turn_on_times;
  std::vector<ResiduePeriod> periods;
  double tau = 0.0;
  double delta = 0.0;
  std::size_t n = 0;
};

struct DetectOptions {
  double delta = 0.9;
  std::size_t min_gap = 60;
  // Centered moving average over X before thresholding; 0 or 1 disables it.
  std::size_t smooth_window = 0;
};

ReferencePattern make_reference_pattern(const Sup& sup, std::size_t n);

// X(t) = norm_level - (1/n) * sum_k |S(k) - D(t + k)|
//
// Lags whose window lies entirely on zero-valued samples share a closed form;
// all other lags run the direct sum in the same order as the naive loop, so the
// result is bit-identical to it.
CorrelationTrace xcorr(const ReferencePattern& ref, const PowerSeries& day);

double threshold_tau(const ReferencePattern& ref, const PowerSeries& day,
                     double delta);

// Pointwise max(X - tau, 0).
CorrelationTrace residue(const CorrelationTrace& x, double tau);

CorrelationTrace moving_average(const CorrelationTrace& x, std::size_t window);

// Maximal positive runs of the residue; runs separated by fewer than
// `min_gap` zero samples are merged. Argmax ties resolve to the earliest lag.
std::vector<ResiduePeriod> extract_turn_on_times(const CorrelationTrace& xbar,
                                                 std::size_t min_gap = 0);

DetectionResult detect(const PowerSeries& day, const ReferencePattern& ref,
                       const DetectOptions& options = {});

} // namespace supwatt
