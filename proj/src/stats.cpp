//
// Project latentbo - Copyright 2026 The latentbo Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "latentbo/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "latentbo/types.hpp"

namespace latentbo {

std::vector<double> midranks_of_magnitudes(const std::vector<double>& d) {
  std::vector<std::size_t> order(d.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return std::fabs(d[i]) < std::fabs(d[j]); });
  std::vector<double> ranks(d.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && std::fabs(d[order[j + 1]]) == std::fabs(d[order[i]])) ++j;
    const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mid;
    i = j + 1;
  }
  return ranks;
}

WilcoxonResult wilcoxon_one_sided(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw InvalidArgument("wilcoxon: samples must have equal length");
  std::vector<double> d;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    if (!std::isfinite(diff)) throw InvalidArgument("wilcoxon: non-finite sample");
    if (diff != 0.0) d.push_back(diff);
  }
  if (d.empty()) throw InvalidArgument("wilcoxon: all paired differences are zero");
  if (a.size() < 5)
    throw InvalidArgument("wilcoxon: need at least 5 pairs, got " + std::to_string(a.size()));

  const auto ranks = midranks_of_magnitudes(d);
  WilcoxonResult res;
  res.n_used = d.size();
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d[i] > 0) res.statistic += ranks[i];

  const std::size_t n = d.size();
  if (n <= kWilcoxonExactLimit) {
    // Mid-ranks are multiples of 1/2, so doubled ranks are integers and the
    // null distribution of 2*T+ is a subset-sum count.
    std::vector<int> r2(n);
    for (std::size_t i = 0; i < n; ++i) r2[i] = static_cast<int>(std::lround(2.0 * ranks[i]));
    const int total = std::accumulate(r2.begin(), r2.end(), 0);
    std::vector<double> count(static_cast<std::size_t>(total) + 1, 0.0);
    count[0] = 1.0;
    int reach = 0;
    for (int r : r2) {
      for (int s = reach; s >= 0; --s) count[static_cast<std::size_t>(s + r)] += count[static_cast<std::size_t>(s)];
      reach += r;
    }
    const int t2 = static_cast<int>(std::lround(2.0 * res.statistic));
    double below = 0.0;
    for (int s = 0; s <= t2; ++s) below += count[static_cast<std::size_t>(s)];
    res.p_value = below / std::ldexp(1.0, static_cast<int>(n));
    res.exact = true;
    return res;
  }

  const double nd = static_cast<double>(n);
  const double mean = nd * (nd + 1.0) / 4.0;
  double var = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0;
  std::vector<double> sorted = ranks;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    var -= (t * t * t - t) / 48.0;
    i = j;
  }
  const double z = (res.statistic - mean) / std::sqrt(var);
  res.p_value = 0.5 * std::erfc(-z / std::sqrt(2.0));
  res.exact = false;
  return res;
}

double median(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("median of empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  return values.size() % 2 == 1 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

}  // namespace latentbo
