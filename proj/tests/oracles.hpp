#pragma once

// Independent reference implementations used only by the tests.

#include "supwatt/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

inline std::vector<double> naive_xcorr(const std::vector<double>& s,
                                       const std::vector<double>& d) {
  double max_s = 0.0, max_d = 0.0;
  for (double v : s) max_s = std::max(max_s, v);
  for (double v : d) max_d = std::max(max_d, v);
  const double norm = (max_s + max_d) / 2.0;
  std::vector<double> out;
  for (std::size_t t = 0; t + s.size() <= d.size(); ++t) {
    double sum = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) sum += std::abs(s[k] - d[t + k]);
    out.push_back(norm - sum / static_cast<double>(s.size()));
  }
  return out;
}

// Plain product cross-correlation sum_k S(k) D(t + k).
inline std::vector<double> product_xcorr(const std::vector<double>& s,
                                         const std::vector<double>& d) {
  std::vector<double> out;
  for (std::size_t t = 0; t + s.size() <= d.size(); ++t) {
    double sum = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) sum += s[k] * d[t + k];
    out.push_back(sum);
  }
  return out;
}

// Minimum over every monotone, boundary-to-boundary warping path, enumerated
// by depth-first search.
inline double brute_dtw(const std::vector<double>& x, const std::vector<double>& y) {
  double best = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, std::size_t, double)> walk =
      [&](std::size_t i, std::size_t j, double acc) {
        acc += std::abs(x[i] - y[j]);
        if (i + 1 == x.size() && j + 1 == y.size()) {
          best = std::min(best, acc);
          return;
        }
        if (i + 1 < x.size() && j + 1 < y.size()) walk(i + 1, j + 1, acc);
        if (i + 1 < x.size()) walk(i + 1, j, acc);
        if (j + 1 < y.size()) walk(i, j + 1, acc);
      };
  walk(0, 0, 0.0);
  return best;
}

// Number of monotone warping paths, for sanity-checking the enumeration.
inline std::size_t count_paths(std::size_t n, std::size_t m) {
  std::vector<std::vector<std::size_t>> c(n, std::vector<std::size_t>(m, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i == 0 && j == 0) {
        c[i][j] = 1;
        continue;
      }
      if (i > 0) c[i][j] += c[i - 1][j];
      if (j > 0) c[i][j] += c[i][j - 1];
      if (i > 0 && j > 0) c[i][j] += c[i - 1][j - 1];
    }
  }
  return c[n - 1][m - 1];
}

// Two-sided Kolmogorov-Smirnov statistic of `draws` against a step CDF. Both
// functions only jump on the CDF support (draws are support values), so it is
// enough to compare at each support point and just below it.
inline double ks_statistic(std::vector<double> draws, const supwatt::EmpiricalCdf& cdf) {
  std::sort(draws.begin(), draws.end());
  const double total = static_cast<double>(draws.size());
  const auto support = cdf.support();
  const auto cumulative = cdf.cumulative();
  double worst = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    const auto below = std::lower_bound(draws.begin(), draws.end(), support[i]) - draws.begin();
    const auto at = std::upper_bound(draws.begin(), draws.end(), support[i]) - draws.begin();
    const double f_below = i == 0 ? 0.0 : cumulative[i - 1];
    worst = std::max(worst, std::abs(static_cast<double>(below) / total - f_below));
    worst = std::max(worst, std::abs(static_cast<double>(at) / total - cumulative[i]));
  }
  return worst;
}

inline std::vector<double> random_watts(std::mt19937_64& g, std::size_t len, double hi,
                                        double zero_fraction = 0.0) {
  std::uniform_real_distribution<double> level(0.0, hi);
  std::bernoulli_distribution zero(zero_fraction);
  std::vector<double> v(len);
  for (auto& x : v) x = zero(g) ? 0.0 : level(g);
  return v;
}

} // namespace oracle
