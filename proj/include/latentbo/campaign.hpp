//
// Project latentbo - Copyright 2026 The latentbo Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LATENTBO_CAMPAIGN_HPP
#define LATENTBO_CAMPAIGN_HPP

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "latentbo/codec.hpp"
#include "latentbo/config.hpp"
#include "latentbo/oracle.hpp"
#include "latentbo/types.hpp"

namespace latentbo {

struct GeneratedEntry {
  std::string text;
  double score = 0.0;
};

enum class DecodeOutcome { New, Duplicate, Invalid };
std::string to_string(DecodeOutcome o);

struct CandidateLog {
  std::string text;
  DecodeOutcome outcome = DecodeOutcome::New;
  std::optional<double> score;
  std::optional<double> acquisition;
  std::optional<double> mean;
  std::optional<double> std;
  std::size_t source_index = 0;
  std::uint64_t noise_seed = 0;
};

struct IterationLog {
  int iteration = 0;
  std::size_t explore_size = 0;
  long long t = 0;
  std::optional<double> kappa;
  std::vector<CandidateLog> candidates;
  std::size_t new_molecules = 0;
  double best_so_far = 0.0;
  std::uint64_t oracle_calls = 0;
  std::optional<double> feature_loss;
  std::optional<double> gp_nll;
  double wall_time_s = 0.0;

  /// One-line record; timing excluded when `with_timing` is false so two
  /// runs can be compared byte for byte.
  [[nodiscard]] nlohmann::json to_json(bool with_timing = true) const;
};

/// Everything the loop owns between iterations.
struct CampaignState {
  ObservedDataset dataset;
  std::vector<std::string> initial_texts;
  std::vector<GeneratedEntry> generated;  // S_out, in discovery order
  int iteration = 0;
  std::uint64_t oracle_calls = 0;
  std::vector<IterationLog> logs;

  [[nodiscard]] bool is_generated(const std::string& text) const;
  [[nodiscard]] std::optional<double> best_generated() const;

  /// Checkpoint form: texts and scores only (embeddings are recomputed).
  [[nodiscard]] nlohmann::json to_json() const;
  static CampaignState from_json(const nlohmann::json& j);
};

enum class CampaignStatus { Complete, Partial };

/// Wires codec and oracle to the loop state.
class Campaign {
public:
  /// Builds endpoints from the config and scores the initial dataset.
  explicit Campaign(CampaignConfig cfg, std::optional<std::filesystem::path> cache_path = std::nullopt);
  /// Explicit endpoints (tests, embedding in other programs).
  Campaign(CampaignConfig cfg, std::shared_ptr<Codec> codec, std::shared_ptr<Objective> oracle,
           ScoreCache cache = {});

  /// Restores loop state from a checkpoint written by this config.
  void restore(CampaignState state);

  [[nodiscard]] const CampaignConfig& config() const { return cfg_; }
  [[nodiscard]] const CampaignState& state() const { return state_; }
  [[nodiscard]] Codec& codec() { return *codec_; }
  [[nodiscard]] Objective& oracle() { return *oracle_; }
  void set_budget(int k) { cfg_.budget = k; }

  /// One pass of encode / fit / explore / select / decode / filter /
  /// score / augment. On any failure the state is left untouched and the
  /// exception propagates.
  const IterationLog& run_iteration();

  /// Iterates until |S_out| >= budget, the iteration cap is reached, or
  /// `stop` becomes true. `on_iteration` runs after every committed
  /// iteration.
  CampaignStatus run(const std::atomic<bool>* stop = nullptr,
                     const std::function<void(const IterationLog&)>& on_iteration = {});

private:
  void initialize();
  void ensure_embeddings(ObservedDataset& ds);

  CampaignConfig cfg_;
  std::shared_ptr<Codec> codec_;
  std::shared_ptr<Objective> oracle_;
  ScoreCache cache_;
  CampaignState state_;
};

/// Random strings over `alphabet` with lengths in [min_len, max_len].
std::vector<std::string> random_strings(const std::string& alphabet, int count, int min_len, int max_len,
                                        std::uint64_t seed);

/// Mean of the best K generated scores for K in {1, 5, 10, 20}; a K is
/// present only when at least K molecules exist.
std::vector<std::pair<int, double>> top_k_means(const std::vector<GeneratedEntry>& generated);

struct SimilarityWindow {
  double mean_sim = 0.0;
  double max_sim = 0.0;
};

/// Bigram-Jaccard similarity of each consecutive window of generated
/// texts to the initial dataset: the mean over all pairs, and the mean of
/// per-molecule maxima. A trailing partial window is reported as well.
std::vector<SimilarityWindow> similarity_report(const std::vector<std::string>& generated,
                                                const std::vector<std::string>& initial, int window = 10);

/// `rank,text,score` table of S_out sorted by score (ties by discovery).
std::string summary_csv(const std::vector<GeneratedEntry>& generated);
std::vector<GeneratedEntry> parse_summary_csv(const std::string& text);

}  // namespace latentbo

#endif  // LATENTBO_CAMPAIGN_HPP
