//
// Project latentbo - Copyright 2026 The latentbo Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LATENTBO_ORACLE_HPP
#define LATENTBO_ORACLE_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "latentbo/protocol.hpp"
#include "latentbo/similarity.hpp"

namespace latentbo {

/// Black-box objective; lower is better.
class Objective {
public:
  virtual ~Objective() = default;
  [[nodiscard]] virtual std::string name() const = 0;

  double score(const std::string& text) {
    ++calls_;
    return evaluate(text);
  }
  [[nodiscard]] std::uint64_t calls() const { return calls_; }

protected:
  virtual double evaluate(const std::string& text) = 0;

private:
  std::uint64_t calls_ = 0;
};

/// -w_match * J(bigrams(text), bigrams(target)) + w_len * | |text| - |target| |
class SyntheticObjective final : public Objective {
public:
  explicit SyntheticObjective(std::string target, double w_match = 10.0, double w_len = 0.01);
  [[nodiscard]] std::string name() const override { return "synthetic"; }
  [[nodiscard]] const std::string& target() const { return target_; }

protected:
  double evaluate(const std::string& text) override;

private:
  std::string target_;
  BigramSet target_bigrams_;
  double w_match_;
  double w_len_;
};

/// Scores via the `score` op of the line protocol; one retry on failure.
class ExternalObjective final : public Objective {
public:
  explicit ExternalObjective(std::shared_ptr<ProtocolClient> client);
  [[nodiscard]] std::string name() const override { return "external"; }

protected:
  double evaluate(const std::string& text) override;

private:
  std::shared_ptr<ProtocolClient> client_;
};

/// text -> score memo, optionally mirrored to an append-only file with one
/// `escaped-text TAB score` record per line.
class ScoreCache {
public:
  ScoreCache() = default;
  /// Loads existing entries from `path` (if present) and appends new ones.
  explicit ScoreCache(std::filesystem::path path);

  [[nodiscard]] std::optional<double> find(const std::string& text) const;
  void put(const std::string& text, double score);
  [[nodiscard]] std::size_t size() const { return entries_.size(); }
  [[nodiscard]] const std::map<std::string, double>& entries() const { return entries_; }

  static std::string escape(const std::string& text);
  static std::string unescape(const std::string& field);
  static std::string format_score(double score);

private:
  std::map<std::string, double> entries_;
  std::optional<std::filesystem::path> path_;
};

/// Cache-first scoring. Uncached texts are scored once each, in input
/// order; the output is aligned with `texts`.
std::vector<double> batch_score(Objective& oracle, ScoreCache& cache,
                                const std::vector<std::string>& texts);

inline double cached_score(Objective& oracle, ScoreCache& cache, const std::string& text) {
  return batch_score(oracle, cache, {text}).front();
}

}  // namespace latentbo

#endif  // LATENTBO_ORACLE_HPP
