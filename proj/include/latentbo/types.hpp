//
// Project latentbo - Copyright 2026 The latentbo Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LATENTBO_TYPES_HPP
#define LATENTBO_TYPES_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <Eigen/Dense>

namespace latentbo {

/// Base class for every error raised by the library. Subclasses tag the
/// failure category so callers (the CLI in particular) can map outcomes
/// onto exit codes without string matching.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
  using Error::Error;
};

class NumericalError : public Error {
public:
  using Error::Error;
};

class ProtocolError : public Error {
public:
  using Error::Error;
};

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;

/// A tokenized string in latent space: one row per token, one column per
/// embedding dimension. Rows are in sequence order; the position of row t
/// is t + 1.
template <typename Scalar>
struct BasicTokenEmbeddingSeq {
  std::vector<std::int64_t> token_ids;
  Matrix<Scalar> vectors;

  [[nodiscard]] Eigen::Index size() const { return vectors.rows(); }
  [[nodiscard]] Eigen::Index dim() const { return vectors.cols(); }
};

using TokenEmbeddingSeq = BasicTokenEmbeddingSeq<double>;

/// Throws InvalidArgument unless the sequence is non-empty, ids match rows,
/// ids are non-negative and every entry is finite.
void check_embedding(const TokenEmbeddingSeq& seq);

struct ObservedRecord {
  std::string text;
  double score = 0.0;
  /// Filled lazily by the campaign; records restored from a checkpoint
  /// carry no embedding until re-encoded.
  std::optional<TokenEmbeddingSeq> embedding;
};

/// Insertion-ordered set of scored strings keyed by exact text.
class ObservedDataset {
public:
  ObservedDataset() = default;

  /// Appends `rec` unless its text is already present. Returns true when
  /// the record was inserted.
  bool insert(ObservedRecord rec);

  [[nodiscard]] bool contains(const std::string& text) const {
    return index_.count(text) != 0;
  }
  [[nodiscard]] std::size_t size() const { return records_.size(); }
  [[nodiscard]] bool empty() const { return records_.empty(); }

  [[nodiscard]] const std::vector<ObservedRecord>& records() const { return records_; }
  [[nodiscard]] const ObservedRecord& operator[](std::size_t i) const { return records_[i]; }

  /// Mutable access limited to the embedding cache; text and score of a
  /// stored record never change.
  void set_embedding(std::size_t i, TokenEmbeddingSeq emb);

  [[nodiscard]] std::optional<double> best_score() const;

private:
  std::vector<ObservedRecord> records_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Up to k records with the lowest score whose text is not excluded,
/// sorted ascending by score with ties broken by insertion order.
std::vector<ObservedRecord> top_k(const ObservedDataset& ds, std::size_t k,
                                  const std::unordered_set<std::string>& exclude = {});

/// A perturbed latent point together with where it came from.
struct CandidateEmbedding {
  MatrixXd vectors;
  std::size_t source_index = 0;
  std::uint64_t noise_seed = 0;
  std::optional<double> acquisition;
  std::optional<double> mean;
  std::optional<double> std;
};

struct PredictiveDistribution {
  double mean = 0.0;
  double std = 0.0;
};

}  // namespace latentbo

#endif  // LATENTBO_TYPES_HPP
