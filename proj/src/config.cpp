//
// Project latentbo - Copyright 2026 The latentbo Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "latentbo/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "latentbo/codec.hpp"

namespace latentbo {

ConfigError::ConfigError(std::string field, const std::string& message, int line)
    : InvalidArgument("config field '" + field + "'" + (line > 0 ? " (line " + std::to_string(line) + ")" : "") +
                      ": " + message),
      field_(std::move(field)),
      detail_(message),
      line_(line) {}

Ablation parse_ablation(const std::string& s) {
  if (s == "none" || s.empty()) return Ablation::None;
  if (s == "no-guide") return Ablation::NoGuide;
  if (s == "no-position") return Ablation::NoPosition;
  throw InvalidArgument("unknown ablation '" + s + "' (expected none, no-guide or no-position)");
}

std::string to_string(Ablation a) {
  switch (a) {
    case Ablation::NoGuide: return "no-guide";
    case Ablation::NoPosition: return "no-position";
    default: return "none";
  }
}

std::vector<int> CampaignConfig::resolved_mlp_dims() const {
  if (!mlp_dims.empty()) return mlp_dims;
  return {2 * d, 256, 256, 256, 20};
}

int CampaignConfig::resolved_max_iterations() const {
  if (max_iterations > 0) return max_iterations;
  return static_cast<int>((10LL * budget + n_cand - 1) / n_cand);
}

void CampaignConfig::validate() const {
  if (d < 1) throw ConfigError("d", "must be >= 1");
  if (l_max < 1) throw ConfigError("l_max", "must be >= 1");
  if (!(lambda_perturb >= 0.0) || !std::isfinite(lambda_perturb))
    throw ConfigError("lambda_perturb", "must be finite and >= 0");
  if (samples_per_record < 0) throw ConfigError("samples_per_record", "must be >= 0 (0 = automatic)");
  if (n_cand < 1) throw ConfigError("n_cand", "must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta", "must lie in (0, 1)");
  if (budget < 1) throw ConfigError("budget", "must be >= 1");
  if (max_iterations < 0) throw ConfigError("max_iterations", "must be >= 0 (0 = automatic)");
  const auto dims = resolved_mlp_dims();
  if (dims.size() < 2) throw ConfigError("mlp_dims", "needs at least an input and an output width");
  if (dims.front() != 2 * d) throw ConfigError("mlp_dims", "first entry must equal 2*d = " + std::to_string(2 * d));
  for (int w : dims)
    if (w < 1) throw ConfigError("mlp_dims", "widths must be >= 1");
  if (!(mlp_lr > 0.0)) throw ConfigError("mlp_lr", "must be > 0");
  if (!(gp_lr > 0.0)) throw ConfigError("gp_lr", "must be > 0");
  if (mlp_epochs < 0) throw ConfigError("mlp_epochs", "must be >= 0");
  if (gp_epochs < 0) throw ConfigError("gp_epochs", "must be >= 0");
  if (mlp_batch_size < 1) throw ConfigError("mlp_batch_size", "must be >= 1");
  if (!(gp_jitter > 0.0) || gp_jitter > 1e-2) throw ConfigError("gp_jitter", "must lie in (0, 1e-2]");
  if (!(elite_fraction > 0.0 && elite_fraction <= 1.0)) throw ConfigError("elite_fraction", "must lie in (0, 1]");
  if (!is_known_prompt(prompt_id)) throw ConfigError("prompt_id", "must be repair, no_knowledge or no_role");
  if (codec.kind == "mock") {
    if (codec.alphabet.empty()) throw ConfigError("codec.alphabet", "must be non-empty");
  } else if (codec.kind == "external") {
    if (codec.command.empty()) throw ConfigError("codec.command", "required for an external codec");
  } else {
    throw ConfigError("codec.kind", "must be mock or external");
  }
  if (codec.timeout_ms < 1) throw ConfigError("codec.timeout_ms", "must be >= 1");
  if (oracle.kind == "synthetic") {
    if (oracle.target.empty()) throw ConfigError("oracle.target", "must be non-empty");
    if (!std::isfinite(oracle.w_match) || !std::isfinite(oracle.w_len))
      throw ConfigError("oracle.w_match", "weights must be finite");
  } else if (oracle.kind == "external") {
    if (oracle.command.empty() && codec.kind != "external")
      throw ConfigError("oracle.command", "required unless the codec is external");
  } else {
    throw ConfigError("oracle.kind", "must be synthetic or external");
  }
  if (initial.random_count < 0) throw ConfigError("initial.random_count", "must be >= 0");
  if (initial.random_count > 0) {
    if (codec.kind != "mock") throw ConfigError("initial.random_count", "random strings need the mock alphabet");
    if (initial.random_min_len < 1 || initial.random_max_len < initial.random_min_len ||
        initial.random_max_len > l_max)
      throw ConfigError("initial.random_min_len", "need 1 <= random_min_len <= random_max_len <= l_max");
  }
  if (initial.texts.empty() && initial.random_count == 0)
    throw ConfigError("initial", "needs texts or random_count > 0");
}

namespace {

using Setter = std::function<void(const YAML::Node&)>;

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

template <typename T>
T scalar_as(const YAML::Node& n, const std::string& field) {
  if (!n.IsScalar()) throw ConfigError(field, "expected a scalar value", line_of(n));
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(field, "cannot parse value '" + n.Scalar() + "'", line_of(n));
  }
}

template <typename T>
std::vector<T> sequence_as(const YAML::Node& n, const std::string& field) {
  if (!n.IsSequence()) throw ConfigError(field, "expected a list", line_of(n));
  std::vector<T> out;
  for (const auto& item : n) out.push_back(scalar_as<T>(item, field));
  return out;
}

void apply_map(const YAML::Node& node, const std::string& prefix, const std::map<std::string, Setter>& setters) {
  if (!node.IsMap()) throw ConfigError(prefix.empty() ? "<root>" : prefix, "expected a mapping", line_of(node));
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    const std::string field = prefix.empty() ? key : prefix + "." + key;
    auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError(field, "unknown key", line_of(kv.first));
    try {
      it->second(kv.second);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(field, e.what(), line_of(kv.second));
    }
  }
}

}  // namespace

CampaignConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("<document>", e.msg, e.mark.line + 1);
  }
  CampaignConfig c;
  auto num = [](auto& target, const std::string& field) {
    return [&target, field](const YAML::Node& n) {
      target = scalar_as<std::remove_reference_t<decltype(target)>>(n, field);
    };
  };

  const std::map<std::string, Setter> codec_setters{
      {"kind", num(c.codec.kind, "codec.kind")},
      {"alphabet", num(c.codec.alphabet, "codec.alphabet")},
      {"table_seed", num(c.codec.table_seed, "codec.table_seed")},
      {"command", [&](const YAML::Node& n) { c.codec.command = sequence_as<std::string>(n, "codec.command"); }},
      {"timeout_ms", num(c.codec.timeout_ms, "codec.timeout_ms")},
  };
  const std::map<std::string, Setter> oracle_setters{
      {"kind", num(c.oracle.kind, "oracle.kind")},
      {"target", num(c.oracle.target, "oracle.target")},
      {"w_match", num(c.oracle.w_match, "oracle.w_match")},
      {"w_len", num(c.oracle.w_len, "oracle.w_len")},
      {"command", [&](const YAML::Node& n) { c.oracle.command = sequence_as<std::string>(n, "oracle.command"); }},
  };
  const std::map<std::string, Setter> initial_setters{
      {"texts", [&](const YAML::Node& n) { c.initial.texts = sequence_as<std::string>(n, "initial.texts"); }},
      {"random_count", num(c.initial.random_count, "initial.random_count")},
      {"random_min_len", num(c.initial.random_min_len, "initial.random_min_len")},
      {"random_max_len", num(c.initial.random_max_len, "initial.random_max_len")},
      {"random_seed", num(c.initial.random_seed, "initial.random_seed")},
  };
  const std::map<std::string, Setter> setters{
      {"seed", num(c.seed, "seed")},
      {"d", num(c.d, "d")},
      {"l_max", num(c.l_max, "l_max")},
      {"lambda_perturb", num(c.lambda_perturb, "lambda_perturb")},
      {"samples_per_record", num(c.samples_per_record, "samples_per_record")},
      {"n_cand", num(c.n_cand, "n_cand")},
      {"delta", num(c.delta, "delta")},
      {"budget", num(c.budget, "budget")},
      {"max_iterations", num(c.max_iterations, "max_iterations")},
      {"mlp_dims", [&](const YAML::Node& n) { c.mlp_dims = sequence_as<int>(n, "mlp_dims"); }},
      {"mlp_lr", num(c.mlp_lr, "mlp_lr")},
      {"gp_lr", num(c.gp_lr, "gp_lr")},
      {"mlp_epochs", num(c.mlp_epochs, "mlp_epochs")},
      {"gp_epochs", num(c.gp_epochs, "gp_epochs")},
      {"mlp_batch_size", num(c.mlp_batch_size, "mlp_batch_size")},
      {"gp_jitter", num(c.gp_jitter, "gp_jitter")},
      {"elite_fraction", num(c.elite_fraction, "elite_fraction")},
      {"prompt_id", num(c.prompt_id, "prompt_id")},
      {"ablation", [&](const YAML::Node& n) { c.ablation = parse_ablation(scalar_as<std::string>(n, "ablation")); }},
      {"codec", [&](const YAML::Node& n) { apply_map(n, "codec", codec_setters); }},
      {"oracle", [&](const YAML::Node& n) { apply_map(n, "oracle", oracle_setters); }},
      {"initial", [&](const YAML::Node& n) { apply_map(n, "initial", initial_setters); }},
  };
  if (root.IsNull()) throw ConfigError("<document>", "empty configuration");
  apply_map(root, "", setters);

  // re-raise validation failures with the line of the offending key
  try {
    c.validate();
  } catch (const ConfigError& e) {
    YAML::Node n;
    n.reset(root);
    std::string field = e.field();
    int line = 0;
    std::stringstream path(field);
    std::string part;
    while (std::getline(path, part, '.')) {
      if (!n.IsMap() || !n[part]) {
        line = 0;
        break;
      }
      n.reset(n[part]);
      line = line_of(n);
    }
    if (line > 0) throw ConfigError(e.field(), e.detail(), line);
    throw;
  }
  return c;
}

CampaignConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

nlohmann::json to_json(const CampaignConfig& c) {
  nlohmann::json j;
  j["seed"] = c.seed;
  j["d"] = c.d;
  j["l_max"] = c.l_max;
  j["lambda_perturb"] = c.lambda_perturb;
  j["samples_per_record"] = c.samples_per_record;
  j["n_cand"] = c.n_cand;
  j["delta"] = c.delta;
  j["budget"] = c.budget;
  j["max_iterations"] = c.max_iterations;
  j["mlp_dims"] = c.resolved_mlp_dims();
  j["mlp_lr"] = c.mlp_lr;
  j["gp_lr"] = c.gp_lr;
  j["mlp_epochs"] = c.mlp_epochs;
  j["gp_epochs"] = c.gp_epochs;
  j["mlp_batch_size"] = c.mlp_batch_size;
  j["gp_jitter"] = c.gp_jitter;
  j["elite_fraction"] = c.elite_fraction;
  j["prompt_id"] = c.prompt_id;
  j["ablation"] = to_string(c.ablation);
  j["codec"] = {{"kind", c.codec.kind},
                {"alphabet", c.codec.alphabet},
                {"table_seed", c.codec.table_seed},
                {"command", c.codec.command},
                {"timeout_ms", c.codec.timeout_ms}};
  j["oracle"] = {{"kind", c.oracle.kind},
                 {"target", c.oracle.target},
                 {"w_match", c.oracle.w_match},
                 {"w_len", c.oracle.w_len},
                 {"command", c.oracle.command}};
  j["initial"] = {{"texts", c.initial.texts},
                  {"random_count", c.initial.random_count},
                  {"random_min_len", c.initial.random_min_len},
                  {"random_max_len", c.initial.random_max_len},
                  {"random_seed", c.initial.random_seed}};
  return j;
}

CampaignConfig config_from_json(const nlohmann::json& j) {
  // JSON is a YAML subset; reuse the strict parser.
  return parse_config(j.dump());
}

std::uint64_t config_hash(const CampaignConfig& cfg) {
  auto j = to_json(cfg);
  j.erase("budget");
  const std::string s = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace latentbo
