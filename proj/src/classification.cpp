#include "supwatt/classification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace supwatt {

Segment segment(const PowerSeries& day, SampleIndex t_on, std::size_t k) {
  if (t_on >= day.size()) {
    throw Error(ErrorKind::OutOfRange, "turn-on time " + std::to_string(t_on) +
                                           " outside day of length " +
                                           std::to_string(day.size()));
  }
  if (k == 0) {
    throw Error(ErrorKind::Validation, "segment length must be positive");
  }
  const std::size_t available = day.size() - t_on;
  const bool truncated = k > available;
  return Segment{slice(day, t_on, truncated ? available : k), truncated};
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_inputs(std::span<const Watts> x, std::span<const Watts> y) {
  if (x.empty() || y.empty()) {
    throw Error(ErrorKind::Validation, "DTW needs two nonempty sequences");
  }
}

std::size_t effective_band(std::size_t n, std::size_t m, const DtwOptions& options) {
  const std::size_t diff = n > m ? n - m : m - n;
  if (!options.band) return std::max(n, m);
  return std::max(*options.band, diff);
}

// Index of the chosen predecessor: 0 diagonal, 1 from (i-1, j), 2 from (i, j-1).
inline int pick(double diag, double up, double left) {
  if (diag <= up && diag <= left) return 0;
  if (up <= left) return 1;
  return 2;
}

// Unbanded DP. Rows are processed R at a time along a skewed front so the R
// min-plus chains are independent; every cell still picks among the same three
// neighbours with the same tie order, so results match the plain row loop bit
// for bit. With Track set, the step count of the chosen path rides along.
struct Cell {
  double cost;
  std::size_t len;
};

template <bool Track>
Cell dtw_unbanded(std::span<const Watts> x, std::span<const Watts> y) {
  constexpr std::size_t R = 4;
  const std::size_t n = x.size();
  const std::size_t m = y.size();
  std::vector<double> prev(m + 1, kInf), cur(m + 1, kInf);
  std::vector<std::size_t> prev_len(Track ? m + 1 : 0, 0), cur_len(Track ? m + 1 : 0, 0);
  prev[0] = 0.0;

  auto choose = [](double diag, double up, double left, std::size_t ld, std::size_t lu,
                   std::size_t ll, std::size_t& len) {
    if constexpr (Track) {
      // Same preference as pick(), as masks: data-dependent branches here
      // mispredict about once every three cells.
      const std::size_t md = std::size_t{0} - static_cast<std::size_t>((diag <= up) & (diag <= left));
      const std::size_t mu = std::size_t{0} - static_cast<std::size_t>(up <= left);
      len = ((ld & md) | (~md & ((lu & mu) | (ll & ~mu)))) + 1;
      return std::min(std::min(diag, up), left);
    } else {
      (void)ld, (void)lu, (void)ll, (void)len;
      return std::min(std::min(diag, up), left);
    }
  };

  std::size_t i = 0;
  for (; i + R <= n; i += R) {
    // val[r]: latest cell of row i+r; lag[r]: the cell before it.
    double val[R], lag[R], xr[R];
    std::size_t vlen[R] = {}, llen[R] = {};
    for (std::size_t r = 0; r < R; ++r) {
      val[r] = kInf;
      lag[r] = kInf;
      xr[r] = x[i + r];
    }
    double diag0 = prev[0];
    std::size_t diag0_len = Track ? prev_len[0] : 0;
    auto cell = [&](std::size_t rr, std::size_t j) {
      const double up = rr == 0 ? prev[j + 1] : val[rr - 1];
      const double diag = rr == 0 ? diag0 : lag[rr - 1];
      std::size_t len = 0;
      double best;
      if constexpr (Track) {
        const std::size_t lu = rr == 0 ? prev_len[j + 1] : vlen[rr - 1];
        const std::size_t ld = rr == 0 ? diag0_len : llen[rr - 1];
        best = choose(diag, up, val[rr], ld, lu, vlen[rr], len);
        llen[rr] = vlen[rr];
        vlen[rr] = len;
        if (rr == 0) diag0_len = prev_len[j + 1];
        if (rr == R - 1) cur_len[j + 1] = len;
      } else {
        best = choose(diag, up, val[rr], 0, 0, 0, len);
      }
      lag[rr] = val[rr];
      val[rr] = std::abs(xr[rr] - y[j]) + best;
      if (rr == 0) diag0 = prev[j + 1];
      if (rr == R - 1) cur[j + 1] = val[rr];
    };
    auto ragged = [&](std::size_t step) {
      for (std::size_t rr = R; rr-- > 0;) {
        if (step >= rr && step - rr < m) cell(rr, step - rr);
      }
    };
    const std::size_t steps = m + R - 1;
    std::size_t step = 0;
    for (; step < std::min(R - 1, steps); ++step) ragged(step);
    for (; step < m; ++step) {
      for (std::size_t rr = R; rr-- > 0;) cell(rr, step - rr);
    }
    for (; step < steps; ++step) ragged(step);
    cur[0] = kInf;
    std::swap(prev, cur);
    std::swap(prev_len, cur_len);
  }
  for (; i < n; ++i) {
    const double xi = x[i];
    cur[0] = kInf;
    for (std::size_t j = 0; j < m; ++j) {
      std::size_t len = 0;
      const double best = choose(prev[j], prev[j + 1], cur[j], Track ? prev_len[j] : 0,
                                 Track ? prev_len[j + 1] : 0, Track ? cur_len[j] : 0, len);
      cur[j + 1] = std::abs(xi - y[j]) + best;
      if constexpr (Track) cur_len[j + 1] = len;
    }
    std::swap(prev, cur);
    std::swap(prev_len, cur_len);
  }
  return {prev[m], Track ? prev_len[m] : 0};
}

} // namespace

double dtw_distance(std::span<const Watts> x, std::span<const Watts> y,
                    const DtwOptions& options) {
  check_inputs(x, y);
  if (!options.band) {
    if (!options.normalize) return dtw_unbanded<false>(x, y).cost;
    const auto c = dtw_unbanded<true>(x, y);
    return c.cost / static_cast<double>(c.len);
  }
  const std::size_t n = x.size();
  const std::size_t m = y.size();
  const std::size_t w = effective_band(n, m, options);

  // Column 0 is the virtual boundary; cell (i, j) lives at [j + 1].
  std::vector<double> prev(m + 1, kInf), cur(m + 1, kInf);
  prev[0] = 0.0;

  if (!options.normalize) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t lo = i > w ? i - w : 0;
      const std::size_t hi = std::min(m - 1, i + w);
      std::fill(cur.begin(), cur.end(), kInf);
      const double xi = x[i];
      for (std::size_t j = lo; j <= hi; ++j) {
        const double best = std::min({prev[j], prev[j + 1], cur[j]});
        cur[j + 1] = std::abs(xi - y[j]) + best;
      }
      std::swap(prev, cur);
    }
    return prev[m];
  }

  std::vector<std::size_t> prev_len(m + 1, 0), cur_len(m + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i > w ? i - w : 0;
    const std::size_t hi = std::min(m - 1, i + w);
    std::fill(cur.begin(), cur.end(), kInf);
    const double xi = x[i];
    for (std::size_t j = lo; j <= hi; ++j) {
      const double diag = prev[j], up = prev[j + 1], left = cur[j];
      const int from = pick(diag, up, left);
      const double best = from == 0 ? diag : from == 1 ? up : left;
      const std::size_t len = from == 0 ? prev_len[j] : from == 1 ? prev_len[j + 1] : cur_len[j];
      cur[j + 1] = std::abs(xi - y[j]) + best;
      cur_len[j + 1] = len + 1;
    }
    std::swap(prev, cur);
    std::swap(prev_len, cur_len);
  }
  return prev[m] / static_cast<double>(prev_len[m]);
}

DtwAlignment dtw_align(std::span<const Watts> x, std::span<const Watts> y,
                       const DtwOptions& options) {
  check_inputs(x, y);
  const std::size_t n = x.size();
  const std::size_t m = y.size();
  const std::size_t w = effective_band(n, m, options);
  const std::size_t cols = m + 1;

  // (n + 1) x (m + 1) with a virtual boundary row and column.
  std::vector<double> cost((n + 1) * cols, kInf);
  cost[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i > w ? i - w : 0;
    const std::size_t hi = std::min(m - 1, i + w);
    for (std::size_t j = lo; j <= hi; ++j) {
      const double best = std::min({cost[i * cols + j], cost[i * cols + j + 1],
                                    cost[(i + 1) * cols + j]});
      cost[(i + 1) * cols + j + 1] = std::abs(x[i] - y[j]) + best;
    }
  }

  DtwAlignment out;
  std::size_t i = n, j = m;
  while (true) {
    out.path.emplace_back(i - 1, j - 1);
    if (i == 1 && j == 1) break;
    const int from = pick(cost[(i - 1) * cols + j - 1], cost[(i - 1) * cols + j],
                          cost[i * cols + j - 1]);
    if (from == 0) {
      --i;
      --j;
    } else if (from == 1) {
      --i;
    } else {
      --j;
    }
  }
  std::reverse(out.path.begin(), out.path.end());
  out.distance = cost[n * cols + m];
  if (options.normalize) out.distance /= static_cast<double>(out.path.size());
  return out;
}

ClassifiedEvent classify(const PowerSeries& day, SampleIndex t_on,
                         const std::vector<ModePattern>& patterns,
                         const DtwOptions& options) {
  if (patterns.empty()) {
    throw Error(ErrorKind::Validation, "no mode patterns to classify against");
  }
  ClassifiedEvent event;
  event.t_on = t_on;
  for (const auto& p : patterns) {
    if (p.pattern.empty()) {
      throw Error(ErrorKind::Validation, "empty pattern for mode " + p.mode_id);
    }
    auto seg = segment(day, t_on, p.k());
    event.truncated = event.truncated || seg.truncated;
    event.distances[p.mode_id] = dtw_distance(p.pattern, seg.series.samples(), options);
  }
  // std::map iterates lexicographically, so strict < keeps the first mode on ties.
  bool first = true;
  for (const auto& [mode, d] : event.distances) {
    if (first || d < event.min_distance) {
      event.chosen_mode = mode;
      event.min_distance = d;
      first = false;
    }
  }
  return event;
}

std::vector<ClassifiedEvent> classify_day(const PowerSeries& day,
                                          const DetectionResult& detection,
                                          const std::vector<ModePattern>& patterns,
                                          const DtwOptions& options) {
  auto times = detection.turn_on_times;
  std::sort(times.begin(), times.end());
  std::vector<ClassifiedEvent> out;
  out.reserve(times.size());
  for (auto t : times) out.push_back(classify(day, t, patterns, options));
  return out;
}

} // namespace supwatt
