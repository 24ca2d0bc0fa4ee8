//
// Project latentbo - Copyright 2026 The latentbo Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LATENTBO_SIMILARITY_HPP
#define LATENTBO_SIMILARITY_HPP

#include <set>
#include <string>
#include <string_view>

namespace latentbo {

using BigramSet = std::set<std::string>;

/// Set of adjacent character pairs; empty for strings shorter than 2.
BigramSet bigrams(std::string_view text);

/// |A & B| / |A | B|, with two empty sets counted as identical (1.0).
double jaccard(const BigramSet& a, const BigramSet& b);

inline double bigram_similarity(std::string_view a, std::string_view b) {
  return jaccard(bigrams(a), bigrams(b));
}

}  // namespace latentbo

#endif  // LATENTBO_SIMILARITY_HPP
