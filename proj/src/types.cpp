//
// Project latentbo - Copyright 2026 The latentbo Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "latentbo/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace latentbo {

void check_embedding(const TokenEmbeddingSeq& seq) {
  if (seq.vectors.rows() < 1) throw InvalidArgument("embedding sequence is empty");
  if (seq.vectors.cols() < 1) throw InvalidArgument("embedding dimension must be >= 1");
  if (static_cast<Eigen::Index>(seq.token_ids.size()) != seq.vectors.rows())
    throw InvalidArgument("token id count does not match embedding rows");
  for (auto id : seq.token_ids)
    if (id < 0) throw InvalidArgument("negative token id");
  if (!seq.vectors.allFinite()) throw InvalidArgument("embedding contains non-finite entries");
}

bool ObservedDataset::insert(ObservedRecord rec) {
  if (rec.text.empty()) throw InvalidArgument("record text is empty");
  if (!std::isfinite(rec.score)) throw InvalidArgument("record score is not finite: " + rec.text);
  if (index_.count(rec.text) != 0) return false;
  index_.emplace(rec.text, records_.size());
  records_.push_back(std::move(rec));
  return true;
}

void ObservedDataset::set_embedding(std::size_t i, TokenEmbeddingSeq emb) {
  records_.at(i).embedding = std::move(emb);
}

std::optional<double> ObservedDataset::best_score() const {
  if (records_.empty()) return std::nullopt;
  double best = records_.front().score;
  for (const auto& r : records_) best = std::min(best, r.score);
  return best;
}

std::vector<ObservedRecord> top_k(const ObservedDataset& ds, std::size_t k,
                                  const std::unordered_set<std::string>& exclude) {
  if (k == 0) return {};
  std::vector<std::size_t> order;
  order.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i)
    if (exclude.count(ds[i].text) == 0) order.push_back(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ds[a].score < ds[b].score; });
  if (order.size() > k) order.resize(k);
  std::vector<ObservedRecord> out;
  out.reserve(order.size());
  for (auto i : order) out.push_back(ds[i]);
  return out;
}

}  // namespace latentbo
