//
// Project latentbo - Copyright 2026 The latentbo Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LATENTBO_EXPLORER_HPP
#define LATENTBO_EXPLORER_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "latentbo/surrogate.hpp"
#include "latentbo/types.hpp"

namespace latentbo {

/// splitmix64 finalizer; used to derive independent RNG streams.
std::uint64_t mix_seed(std::uint64_t x);

/// Deterministic child seed for (parent, a, b). Distinct inputs give
/// distinct outputs with overwhelming probability.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t a, std::uint64_t b = 0);

/// Element-wise multiplicative noise z * eps, eps ~ N(1, lambda) where
/// lambda is the variance. The noise stream is fully determined by `seed`.
CandidateEmbedding perturb(const MatrixXd& z, double lambda_perturb, std::uint64_t seed,
                           std::size_t source_index = 0);

struct ExploreSet {
  std::vector<CandidateEmbedding> candidates;
  std::uint64_t seed = 0;
  int per_record = 0;
};

/// `per_record` perturbations of every record listed in `sources` (all
/// records when empty). Every record used must carry an embedding.
ExploreSet build_explore_set(const ObservedDataset& ds, int per_record, double lambda_perturb,
                             std::uint64_t seed, const std::vector<std::size_t>& sources = {});

/// Default perturbations per record: clamp(ceil(2000 / N), 5, 200).
int default_samples_per_record(std::size_t n_records);

/// Exploration weight sqrt(2 ln(t^2 pi^2 / (6 delta))).
double kappa(long long t, double delta);

inline double lcb(const PredictiveDistribution& pred, double kappa_value) {
  return pred.mean - kappa_value * pred.std;
}

/// Scores every candidate with the LCB and returns the n_cand lowest, in
/// ascending order; equal scores keep explore-set order.
std::vector<CandidateEmbedding> select_candidates(const ExploreSet& explore,
                                                  const SurrogateModel& model, std::size_t n_cand,
                                                  long long t, double delta);

/// Bottom-k by acquisition over precomputed predictions (exposed for tests).
std::vector<std::size_t> lowest_acquisitions(const std::vector<double>& acquisition, std::size_t k);

/// Uniform sample without replacement.
std::vector<CandidateEmbedding> select_random(const ExploreSet& explore, std::size_t n_cand,
                                              std::uint64_t seed);

}  // namespace latentbo

#endif  // LATENTBO_EXPLORER_HPP
