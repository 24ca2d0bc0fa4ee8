//
// Project latentbo - Copyright 2026 The latentbo Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "latentbo/explorer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace latentbo {

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t a, std::uint64_t b) {
  return mix_seed(mix_seed(mix_seed(parent) ^ a) ^ (b * 0xd6e8feb86659fd93ULL));
}

CandidateEmbedding perturb(const MatrixXd& z, double lambda_perturb, std::uint64_t seed,
                           std::size_t source_index) {
  if (!(lambda_perturb >= 0.0) || !std::isfinite(lambda_perturb))
    throw InvalidArgument("lambda_perturb must be finite and >= 0");
  CandidateEmbedding c;
  c.source_index = source_index;
  c.noise_seed = seed;
  c.vectors = z;
  if (lambda_perturb == 0.0) return c;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(1.0, std::sqrt(lambda_perturb));
  for (Eigen::Index j = 0; j < c.vectors.cols(); ++j)
    for (Eigen::Index i = 0; i < c.vectors.rows(); ++i) c.vectors(i, j) *= noise(rng);
  return c;
}

int default_samples_per_record(std::size_t n_records) {
  if (n_records == 0) return 5;
  const auto m = static_cast<long long>((2000 + n_records - 1) / n_records);
  return static_cast<int>(std::clamp(m, 5LL, 200LL));
}

ExploreSet build_explore_set(const ObservedDataset& ds, int per_record, double lambda_perturb,
                             std::uint64_t seed, const std::vector<std::size_t>& sources) {
  if (ds.empty()) throw InvalidArgument("cannot explore around an empty dataset");
  if (per_record < 1) throw InvalidArgument("samples per record must be >= 1");
  std::vector<std::size_t> src = sources;
  if (src.empty()) {
    src.resize(ds.size());
    std::iota(src.begin(), src.end(), std::size_t{0});
  }
  ExploreSet out;
  out.seed = seed;
  out.per_record = per_record;
  out.candidates.reserve(src.size() * static_cast<std::size_t>(per_record));
  for (auto i : src) {
    if (i >= ds.size()) throw InvalidArgument("explore source index out of range");
    const auto& emb = ds[i].embedding;
    if (!emb) throw InvalidArgument("record without embedding: " + ds[i].text);
    for (int j = 0; j < per_record; ++j)
      out.candidates.push_back(
          perturb(emb->vectors, lambda_perturb, derive_seed(seed, i, static_cast<std::uint64_t>(j)), i));
  }
  return out;
}

double kappa(long long t, double delta) {
  if (t < 1) throw InvalidArgument("kappa requires t >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("kappa requires 0 < delta < 1");
  const double td = static_cast<double>(t);
  const double pi = std::numbers::pi;
  return std::sqrt(2.0 * std::log(td * td * pi * pi / (6.0 * delta)));
}

std::vector<std::size_t> lowest_acquisitions(const std::vector<double>& acquisition, std::size_t k) {
  std::vector<std::size_t> order(acquisition.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return acquisition[a] < acquisition[b]; });
  if (order.size() > k) order.resize(k);
  return order;
}

std::vector<CandidateEmbedding> select_candidates(const ExploreSet& explore,
                                                  const SurrogateModel& model, std::size_t n_cand,
                                                  long long t, double delta) {
  if (n_cand < 1) throw InvalidArgument("n_cand must be >= 1");
  if (!model.trained()) throw InvalidArgument("surrogate model has not been trained");
  const double k = kappa(t, delta);

  std::vector<const MatrixXd*> seqs;
  seqs.reserve(explore.candidates.size());
  for (const auto& c : explore.candidates) seqs.push_back(&c.vectors);

  // bounded chunks keep the cross-covariance matrix small
  constexpr std::size_t kChunk = 512;
  std::vector<PredictiveDistribution> preds;
  preds.reserve(seqs.size());
  for (std::size_t start = 0; start < seqs.size(); start += kChunk) {
    const std::vector<const MatrixXd*> chunk(
        seqs.begin() + static_cast<std::ptrdiff_t>(start),
        seqs.begin() + static_cast<std::ptrdiff_t>(std::min(seqs.size(), start + kChunk)));
    auto part = gp_predict_batch(model, chunk);
    preds.insert(preds.end(), part.begin(), part.end());
  }

  std::vector<double> acq(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) acq[i] = lcb(preds[i], k);

  std::vector<CandidateEmbedding> out;
  for (auto i : lowest_acquisitions(acq, n_cand)) {
    CandidateEmbedding c = explore.candidates[i];
    c.acquisition = acq[i];
    c.mean = preds[i].mean;
    c.std = preds[i].std;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<CandidateEmbedding> select_random(const ExploreSet& explore, std::size_t n_cand,
                                              std::uint64_t seed) {
  std::vector<std::size_t> idx(explore.candidates.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  // partial Fisher-Yates
  const std::size_t k = std::min(n_cand, idx.size());
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  std::vector<CandidateEmbedding> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(explore.candidates[idx[i]]);
  return out;
}

}  // namespace latentbo
