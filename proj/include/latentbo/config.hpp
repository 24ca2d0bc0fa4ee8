//
// Project latentbo - Copyright 2026 The latentbo Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LATENTBO_CONFIG_HPP
#define LATENTBO_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "latentbo/types.hpp"

namespace latentbo {

/// Configuration problem; `field` names the offending key and `line` is
/// the 1-based source line when known (0 otherwise).
class ConfigError : public InvalidArgument {
public:
  ConfigError(std::string field, const std::string& message, int line = 0);
  [[nodiscard]] const std::string& field() const { return field_; }
  [[nodiscard]] int line() const { return line_; }
  [[nodiscard]] const std::string& detail() const { return detail_; }

private:
  std::string field_;
  std::string detail_;
  int line_;
};

enum class Ablation { None, NoGuide, NoPosition };

Ablation parse_ablation(const std::string& s);
std::string to_string(Ablation a);

struct CodecConfig {
  std::string kind = "mock";  // mock | external
  std::string alphabet = "CNOScnos()=#123";
  std::uint64_t table_seed = 7;
  std::vector<std::string> command;
  int timeout_ms = 30000;
};

struct OracleConfig {
  std::string kind = "synthetic";  // synthetic | external
  std::string target = "CC(=O)Nc1ccc(O)cc1";
  double w_match = 10.0;
  double w_len = 0.01;
  /// external only; empty means "reuse the codec endpoint process"
  std::vector<std::string> command;
};

struct InitialConfig {
  std::vector<std::string> texts;
  /// When > 0, additionally draws this many random strings over the mock
  /// alphabet with lengths in [random_min_len, random_max_len].
  int random_count = 0;
  int random_min_len = 4;
  int random_max_len = 12;
  std::uint64_t random_seed = 0;
};

struct CampaignConfig {
  std::uint64_t seed = 1;
  int d = 16;
  int l_max = 80;
  double lambda_perturb = 0.4;
  int samples_per_record = 0;  // 0: clamp(ceil(2000/N), 5, 200)
  int n_cand = 5;
  double delta = 0.1;
  int budget = 20;
  int max_iterations = 0;  // 0: ceil(10 * budget / n_cand)
  std::vector<int> mlp_dims;  // empty: 2d-256-256-256-20
  double mlp_lr = 1e-3;
  double gp_lr = 0.1;
  int mlp_epochs = 100;
  int gp_epochs = 100;
  int mlp_batch_size = 16;
  double gp_jitter = 1e-6;
  /// Extension: fraction of best records used as perturbation sources.
  double elite_fraction = 1.0;
  std::string prompt_id = "repair";
  Ablation ablation = Ablation::None;
  CodecConfig codec;
  OracleConfig oracle;
  InitialConfig initial;

  [[nodiscard]] std::vector<int> resolved_mlp_dims() const;
  [[nodiscard]] int resolved_max_iterations() const;
  /// Throws ConfigError naming the first invalid field.
  void validate() const;
};

/// Parses a YAML (or JSON) document mirroring CampaignConfig. Unknown keys
/// are errors.
CampaignConfig parse_config(const std::string& text);
CampaignConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const CampaignConfig& cfg);
CampaignConfig config_from_json(const nlohmann::json& j);

/// FNV-1a over the canonical JSON form, ignoring `budget` so a resumed
/// campaign may raise its target.
std::uint64_t config_hash(const CampaignConfig& cfg);

}  // namespace latentbo

#endif  // LATENTBO_CONFIG_HPP
