//
// Project latentbo - Copyright 2026 The latentbo Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LATENTBO_STATS_HPP
#define LATENTBO_STATS_HPP

#include <cstddef>
#include <vector>

namespace latentbo {

struct WilcoxonResult {
  double p_value = 1.0;
  double statistic = 0.0;  // sum of ranks of positive differences a - b
  std::size_t n_used = 0;  // pairs left after dropping zero differences
  bool exact = true;
};

/// Largest number of non-zero differences handled by exact enumeration.
inline constexpr std::size_t kWilcoxonExactLimit = 20;

/// Paired signed-rank test of H1: a tends to be lower than b. Zero
/// differences are dropped and tied magnitudes share their mid-rank. Exact
/// null distribution for up to kWilcoxonExactLimit pairs, otherwise the
/// normal approximation with tie correction.
/// Throws InvalidArgument on length mismatch, fewer than 5 pairs, or when
/// every difference is zero.
WilcoxonResult wilcoxon_one_sided(const std::vector<double>& a, const std::vector<double>& b);

/// Mid-ranks of |d| (1-based), ties averaged.
std::vector<double> midranks_of_magnitudes(const std::vector<double>& d);

double median(std::vector<double> values);

}  // namespace latentbo

#endif  // LATENTBO_STATS_HPP
