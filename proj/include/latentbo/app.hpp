//
// Project latentbo - Copyright 2026 The latentbo Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LATENTBO_APP_HPP
#define LATENTBO_APP_HPP

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "latentbo/campaign.hpp"

namespace latentbo {

/// Exit codes of every subcommand.
enum ExitCode : int { kExitComplete = 0, kExitError = 1, kExitPartial = 2 };

/// Environment variable naming the output directory when --out is absent.
inline constexpr const char* kOutputEnv = "LATENTBO_OUT";

struct RunOptions {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  std::optional<std::string> ablation;
  std::optional<int> budget;
  /// When > 1, runs seeds seed .. seed+seeds-1 into `seed-<n>/` subdirs.
  int seeds = 1;
  bool quiet = false;
};

struct ResumeOptions {
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> config;  // must hash-match when given
  std::optional<int> budget;
  bool quiet = false;
};

/// Names of the files a campaign directory holds.
namespace files {
inline constexpr const char* kConfig = "config.json";
inline constexpr const char* kCheckpoint = "checkpoint.json";
inline constexpr const char* kLog = "log.jsonl";
inline constexpr const char* kSummary = "summary.csv";
inline constexpr const char* kTrajectory = "trajectory.csv";
inline constexpr const char* kCache = "scores.cache";
}  // namespace files

/// --out, else $LATENTBO_OUT, else ./campaign.
std::filesystem::path resolve_out_dir(const std::optional<std::filesystem::path>& out);

/// Checkpoint document: config hash, config, seed and loop state.
nlohmann::json checkpoint_json(const CampaignConfig& cfg, const CampaignState& state);
/// Written to a temporary file and renamed into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err,
            const std::atomic<bool>* stop = nullptr);
int cmd_resume(const ResumeOptions& opt, std::ostream& out, std::ostream& err,
               const std::atomic<bool>* stop = nullptr);
/// One directory: Top-K means and the similarity table. Two directories:
/// additionally the one-sided Wilcoxon p-value of per-seed best scores
/// (first lower than second).
int cmd_report(const std::vector<std::filesystem::path>& dirs, std::ostream& out, std::ostream& err);
/// `table` optionally names a JSON file {"alphabet","l_max","table"} that
/// replaces the default mock table.
int cmd_selftest(const std::optional<std::filesystem::path>& table, std::ostream& out, std::ostream& err);

/// Per-seed best score of a campaign directory: one entry per `seed-<n>`
/// subdirectory (sorted by n), or a single entry labelled "campaign" for a
/// plain directory.
std::vector<std::pair<std::string, double>> per_seed_best(const std::filesystem::path& dir);

}  // namespace latentbo

#endif  // LATENTBO_APP_HPP
