//
// Project latentbo - Copyright 2026 The latentbo Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LATENTBO_SELFTEST_HPP
#define LATENTBO_SELFTEST_HPP

#include <string>
#include <vector>

#include "latentbo/codec.hpp"

namespace latentbo {

struct SelftestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Embedded invariant suite: aggregation identities, kappa values, GP
/// solve equivalence and the codec round-trip on `codec`.
std::vector<SelftestCheck> run_selftest(MockCodec codec);

inline bool all_passed(const std::vector<SelftestCheck>& checks) {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

}  // namespace latentbo

#endif  // LATENTBO_SELFTEST_HPP
