//
// Project latentbo - Copyright 2026 The latentbo Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "latentbo/similarity.hpp"

#include <algorithm>
#include <iterator>

namespace latentbo {

BigramSet bigrams(std::string_view text) {
  BigramSet out;
  for (std::size_t i = 0; i + 1 < text.size(); ++i) out.emplace(text.substr(i, 2));
  return out;
}

double jaccard(const BigramSet& a, const BigramSet& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t common = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  const std::size_t uni = a.size() + b.size() - common;
  return static_cast<double>(common) / static_cast<double>(uni);
}

}  // namespace latentbo
