#include "supwatt/detection.hpp"

#include <algorithm>
#include <cmath>

namespace supwatt {

ReferencePattern make_reference_pattern(const Sup& sup, std::size_t n) {
  if (n < 1 || n > sup.samples.size()) {
    throw Error(ErrorKind::OutOfRange,
                "reference size " + std::to_string(n) + " outside [1, " +
                    std::to_string(sup.samples.size()) + "]");
  }
  return ReferencePattern{{sup.samples.begin(), sup.samples.begin() + static_cast<std::ptrdiff_t>(n)},
                          sup.appliance_id, sup.mode_id};
}

CorrelationTrace xcorr(const ReferencePattern& ref, const PowerSeries& day) {
  const std::size_t n = ref.n();
  const std::size_t m = day.size();
  if (n == 0) {
    throw Error(ErrorKind::Validation, "empty reference pattern");
  }
  if (n > m) {
    throw Error(ErrorKind::Validation,
                "reference pattern (" + std::to_string(n) + ") longer than day (" +
                    std::to_string(m) + ")");
  }
  const auto s = std::span<const Watts>(ref.samples);
  const auto d = day.samples();

  CorrelationTrace out;
  out.n = n;
  out.norm_level = (max_value(s) + max_value(d)) / 2.0;
  out.values.resize(m - n + 1);

  std::vector<std::size_t> nonzero(m + 1, 0);
  for (std::size_t i = 0; i < m; ++i) nonzero[i + 1] = nonzero[i] + (d[i] != 0.0);

  double zero_window_sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) zero_window_sum += std::abs(s[k] - 0.0);
  const double zero_window_value = out.norm_level - zero_window_sum / static_cast<double>(n);

  for (std::size_t t = 0; t + n <= m; ++t) {
    if (nonzero[t + n] == nonzero[t]) {
      out.values[t] = zero_window_value;
      continue;
    }
    double acc = 0.0;
    const Watts* dw = d.data() + t;
    for (std::size_t k = 0; k < n; ++k) acc += std::abs(s[k] - dw[k]);
    out.values[t] = out.norm_level - acc / static_cast<double>(n);
  }
  return out;
}

double threshold_tau(const ReferencePattern& ref, const PowerSeries& day,
                     double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorKind::Validation, "delta must lie in (0, 1)");
  }
  return delta * (max_value(std::span<const Watts>(ref.samples)) + max_value(day)) / 2.0;
}

CorrelationTrace residue(const CorrelationTrace& x, double tau) {
  CorrelationTrace out{{}, x.n, x.norm_level};
  out.values.reserve(x.values.size());
  for (double v : x.values) out.values.push_back(std::max(v - tau, 0.0));
  return out;
}

CorrelationTrace moving_average(const CorrelationTrace& x, std::size_t window) {
  if (window <= 1 || x.values.empty()) return x;
  const std::size_t half = window / 2;
  const std::size_t len = x.values.size();
  CorrelationTrace out{std::vector<double>(len), x.n, x.norm_level};
  for (std::size_t i = 0; i < len; ++i) {
    std::size_t lo = i >= half ? i - half : 0;
    std::size_t hi = std::min(len - 1, i + (window - 1 - half));
    double acc = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) acc += x.values[j];
    out.values[i] = acc / static_cast<double>(hi - lo + 1);
  }
  return out;
}

std::vector<ResiduePeriod> extract_turn_on_times(const CorrelationTrace& xbar,
                                                 std::size_t min_gap) {
  std::vector<ResiduePeriod> runs;
  const auto& v = xbar.values;
  std::size_t i = 0;
  while (i < v.size()) {
    if (!(v[i] > 0.0)) {
      ++i;
      continue;
    }
    ResiduePeriod p{i, i, i, v[i]};
    while (i < v.size() && v[i] > 0.0) {
      if (v[i] > p.max_value) {
        p.max_value = v[i];
        p.argmax = i;
      }
      p.end = i;
      ++i;
    }
    if (!runs.empty() && p.start - runs.back().end - 1 < min_gap) {
      auto& prev = runs.back();
      prev.end = p.end;
      if (p.max_value > prev.max_value) {
        prev.max_value = p.max_value;
        prev.argmax = p.argmax;
      }
    } else {
      runs.push_back(p);
    }
  }
  return runs;
}

DetectionResult detect(const PowerSeries& day, const ReferencePattern& ref,
                       const DetectOptions& options) {
  DetectionResult result;
  result.delta = options.delta;
  result.n = ref.n();
  result.tau = threshold_tau(ref, day, options.delta);

  auto x = xcorr(ref, day);
  if (options.smooth_window > 1) x = moving_average(x, options.smooth_window);
  result.periods = extract_turn_on_times(residue(x, result.tau), options.min_gap);
  for (const auto& p : result.periods) result.turn_on_times.push_back(p.argmax);
  return result;
}

} // namespace supwatt
