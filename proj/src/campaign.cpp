//
// Project latentbo - Copyright 2026 The latentbo Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "latentbo/campaign.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_set>

#include "latentbo/explorer.hpp"
#include "latentbo/protocol.hpp"
#include "latentbo/similarity.hpp"
#include "latentbo/surrogate.hpp"

namespace latentbo {

std::string to_string(DecodeOutcome o) {
  switch (o) {
    case DecodeOutcome::New: return "new";
    case DecodeOutcome::Duplicate: return "duplicate";
    case DecodeOutcome::Invalid: return "invalid";
  }
  return "unknown";
}

namespace {

DecodeOutcome parse_outcome(const std::string& s) {
  if (s == "new") return DecodeOutcome::New;
  if (s == "duplicate") return DecodeOutcome::Duplicate;
  if (s == "invalid") return DecodeOutcome::Invalid;
  throw InvalidArgument("unknown decode outcome '" + s + "'");
}

template <typename T>
void put_optional(nlohmann::json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <typename T>
std::optional<T> get_optional(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<T>();
}

}  // namespace

nlohmann::json IterationLog::to_json(bool with_timing) const {
  nlohmann::json j;
  j["iter"] = iteration;
  j["phase"] = "iteration";
  j["explore_size"] = explore_size;
  j["t"] = t;
  put_optional(j, "kappa", kappa);
  auto cands = nlohmann::json::array();
  for (const auto& c : candidates) {
    nlohmann::json cj;
    cj["text"] = c.text;
    cj["outcome"] = to_string(c.outcome);
    put_optional(cj, "score", c.score);
    put_optional(cj, "acquisition", c.acquisition);
    put_optional(cj, "mean", c.mean);
    put_optional(cj, "std", c.std);
    cj["source"] = c.source_index;
    cj["noise_seed"] = c.noise_seed;
    cands.push_back(std::move(cj));
  }
  j["candidates"] = std::move(cands);
  j["new"] = new_molecules;
  j["best_so_far"] = best_so_far;
  j["oracle_calls"] = oracle_calls;
  put_optional(j, "feature_loss", feature_loss);
  put_optional(j, "gp_nll", gp_nll);
  if (with_timing) j["wall_time_s"] = wall_time_s;
  return j;
}

namespace {

IterationLog log_from_json(const nlohmann::json& j) {
  IterationLog log;
  log.iteration = j.at("iter").get<int>();
  log.explore_size = j.at("explore_size").get<std::size_t>();
  log.t = j.at("t").get<long long>();
  log.kappa = get_optional<double>(j, "kappa");
  for (const auto& cj : j.at("candidates")) {
    CandidateLog c;
    c.text = cj.at("text").get<std::string>();
    c.outcome = parse_outcome(cj.at("outcome").get<std::string>());
    c.score = get_optional<double>(cj, "score");
    c.acquisition = get_optional<double>(cj, "acquisition");
    c.mean = get_optional<double>(cj, "mean");
    c.std = get_optional<double>(cj, "std");
    c.source_index = cj.at("source").get<std::size_t>();
    c.noise_seed = cj.at("noise_seed").get<std::uint64_t>();
    log.candidates.push_back(std::move(c));
  }
  log.new_molecules = j.at("new").get<std::size_t>();
  log.best_so_far = j.at("best_so_far").get<double>();
  log.oracle_calls = j.at("oracle_calls").get<std::uint64_t>();
  log.feature_loss = get_optional<double>(j, "feature_loss");
  log.gp_nll = get_optional<double>(j, "gp_nll");
  log.wall_time_s = j.value("wall_time_s", 0.0);
  return log;
}

}  // namespace

bool CampaignState::is_generated(const std::string& text) const {
  return std::any_of(generated.begin(), generated.end(),
                     [&](const GeneratedEntry& e) { return e.text == text; });
}

std::optional<double> CampaignState::best_generated() const {
  if (generated.empty()) return std::nullopt;
  double best = generated.front().score;
  for (const auto& e : generated) best = std::min(best, e.score);
  return best;
}

nlohmann::json CampaignState::to_json() const {
  nlohmann::json j;
  auto ds = nlohmann::json::array();
  for (const auto& r : dataset.records()) ds.push_back({{"text", r.text}, {"score", r.score}});
  j["dataset"] = std::move(ds);
  j["initial"] = initial_texts;
  auto gen = nlohmann::json::array();
  for (const auto& e : generated) gen.push_back({{"text", e.text}, {"score", e.score}});
  j["generated"] = std::move(gen);
  j["iteration"] = iteration;
  j["oracle_calls"] = oracle_calls;
  auto lj = nlohmann::json::array();
  for (const auto& l : logs) lj.push_back(l.to_json());
  j["logs"] = std::move(lj);
  return j;
}

CampaignState CampaignState::from_json(const nlohmann::json& j) {
  CampaignState s;
  for (const auto& r : j.at("dataset")) {
    ObservedRecord rec;
    rec.text = r.at("text").get<std::string>();
    rec.score = r.at("score").get<double>();
    if (!s.dataset.insert(std::move(rec))) throw InvalidArgument("checkpoint: duplicate dataset text");
  }
  s.initial_texts = j.at("initial").get<std::vector<std::string>>();
  for (const auto& e : j.at("generated"))
    s.generated.push_back({e.at("text").get<std::string>(), e.at("score").get<double>()});
  s.iteration = j.at("iteration").get<int>();
  s.oracle_calls = j.at("oracle_calls").get<std::uint64_t>();
  for (const auto& l : j.at("logs")) s.logs.push_back(log_from_json(l));
  return s;
}

namespace {

std::shared_ptr<Codec> make_codec(const CampaignConfig& cfg, std::shared_ptr<ProtocolClient>& client) {
  if (cfg.codec.kind == "mock")
    return std::make_shared<MockCodec>(cfg.codec.alphabet, cfg.d, cfg.l_max, cfg.codec.table_seed);
  client = std::make_shared<ProtocolClient>(cfg.codec.command,
                                            std::chrono::milliseconds(cfg.codec.timeout_ms));
  return std::make_shared<ExternalCodec>(client, cfg.d, cfg.l_max);
}

std::shared_ptr<Objective> make_oracle(const CampaignConfig& cfg,
                                       const std::shared_ptr<ProtocolClient>& codec_client) {
  if (cfg.oracle.kind == "synthetic")
    return std::make_shared<SyntheticObjective>(cfg.oracle.target, cfg.oracle.w_match, cfg.oracle.w_len);
  if (!cfg.oracle.command.empty())
    return std::make_shared<ExternalObjective>(std::make_shared<ProtocolClient>(
        cfg.oracle.command, std::chrono::milliseconds(cfg.codec.timeout_ms)));
  if (!codec_client) throw ConfigError("oracle.command", "external oracle needs a command or an external codec");
  return std::make_shared<ExternalObjective>(codec_client);
}

}  // namespace

Campaign::Campaign(CampaignConfig cfg, std::optional<std::filesystem::path> cache_path)
    : cfg_(std::move(cfg)) {
  cfg_.validate();
  std::shared_ptr<ProtocolClient> client;
  codec_ = make_codec(cfg_, client);
  oracle_ = make_oracle(cfg_, client);
  if (cache_path) cache_ = ScoreCache(*cache_path);
  initialize();
}

Campaign::Campaign(CampaignConfig cfg, std::shared_ptr<Codec> codec, std::shared_ptr<Objective> oracle,
                   ScoreCache cache)
    : cfg_(std::move(cfg)), codec_(std::move(codec)), oracle_(std::move(oracle)), cache_(std::move(cache)) {
  cfg_.validate();
  if (!codec_ || !oracle_) throw InvalidArgument("campaign needs a codec and an oracle");
  initialize();
}

void Campaign::initialize() {
  std::vector<std::string> texts = cfg_.initial.texts;
  if (cfg_.initial.random_count > 0) {
    auto extra = random_strings(cfg_.codec.alphabet, cfg_.initial.random_count, cfg_.initial.random_min_len,
                                cfg_.initial.random_max_len, cfg_.initial.random_seed);
    texts.insert(texts.end(), extra.begin(), extra.end());
  }
  std::vector<std::string> unique;
  std::unordered_set<std::string> seen;
  for (auto& t : texts) {
    if (!codec_->validate(t)) throw InvalidArgument("initial text '" + t + "' is not valid for the codec");
    if (seen.insert(t).second) unique.push_back(t);
  }
  if (unique.size() < 2) throw InvalidArgument("initial dataset needs at least 2 distinct texts");

  const auto before = oracle_->calls();
  const auto scores = batch_score(*oracle_, cache_, unique);
  CampaignState s;
  for (std::size_t i = 0; i < unique.size(); ++i) s.dataset.insert({unique[i], scores[i], std::nullopt});
  s.initial_texts = unique;
  s.oracle_calls = oracle_->calls() - before;
  state_ = std::move(s);
}

void Campaign::restore(CampaignState state) {
  if (state.dataset.size() < 2) throw InvalidArgument("checkpoint dataset has fewer than 2 records");
  state_ = std::move(state);
}

void Campaign::ensure_embeddings(ObservedDataset& ds) {
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds[i].embedding) continue;
    auto emb = codec_->encode(ds[i].text);
    check_embedding(emb);
    if (emb.dim() != codec_->dim())
      throw ProtocolError("encode returned width " + std::to_string(emb.dim()) + ", expected " +
                          std::to_string(codec_->dim()));
    ds.set_embedding(i, std::move(emb));
  }
}

const IterationLog& Campaign::run_iteration() {
  const auto start = std::chrono::steady_clock::now();
  if (state_.dataset.size() < 2) throw InvalidArgument("run_iteration needs at least 2 observed records");

  ObservedDataset ds = state_.dataset;
  ensure_embeddings(ds);

  const int iter = state_.iteration + 1;
  const std::uint64_t iter_seed = derive_seed(cfg_.seed, static_cast<std::uint64_t>(iter));

  IterationLog log;
  log.iteration = iter;
  log.t = static_cast<long long>(ds.size()) + 1;

  std::optional<SurrogateModel> model;
  if (cfg_.ablation != Ablation::NoGuide) {
    SurrogateOptions opt;
    opt.feature.dims = cfg_.resolved_mlp_dims();
    opt.feature.lr = cfg_.mlp_lr;
    opt.feature.epochs = cfg_.mlp_epochs;
    opt.feature.batch_size = cfg_.mlp_batch_size;
    opt.feature.seed = derive_seed(iter_seed, 1);
    opt.gp.epochs = cfg_.gp_epochs;
    opt.gp.lr = cfg_.gp_lr;
    opt.gp.jitter = cfg_.gp_jitter;
    opt.l_max = cfg_.l_max;
    opt.pooling = cfg_.ablation == Ablation::NoPosition ? Pooling::Mean : Pooling::PositionAware;
    model = train_surrogate(ds, opt);
    if (!model->feature_loss_curve.empty()) log.feature_loss = model->feature_loss_curve.back();
    if (!model->gp_nll_curve.empty())
      log.gp_nll = *std::min_element(model->gp_nll_curve.begin(), model->gp_nll_curve.end());
  }

  std::vector<std::size_t> sources;
  if (cfg_.elite_fraction < 1.0) {
    std::vector<std::size_t> order(ds.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return ds[a].score < ds[b].score; });
    const auto keep = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(cfg_.elite_fraction * static_cast<double>(ds.size()))));
    order.resize(std::min(keep, order.size()));
    std::sort(order.begin(), order.end());
    sources = std::move(order);
  }
  const std::size_t n_sources = sources.empty() ? ds.size() : sources.size();
  const int per_record =
      cfg_.samples_per_record > 0 ? cfg_.samples_per_record : default_samples_per_record(n_sources);
  const auto explore = build_explore_set(ds, per_record, cfg_.lambda_perturb, derive_seed(iter_seed, 2), sources);
  log.explore_size = explore.candidates.size();

  const auto n_cand = static_cast<std::size_t>(cfg_.n_cand);
  std::vector<CandidateEmbedding> selected;
  if (model) {
    log.kappa = kappa(log.t, cfg_.delta);
    selected = select_candidates(explore, *model, n_cand, log.t, cfg_.delta);
  } else {
    selected = select_random(explore, n_cand, derive_seed(iter_seed, 3));
  }

  std::vector<std::string> survivors;
  std::unordered_set<std::string> batch;
  for (const auto& cand : selected) {
    CandidateLog c;
    c.text = codec_->decode_repair(cand.vectors, cfg_.prompt_id);
    c.acquisition = cand.acquisition;
    c.mean = cand.mean;
    c.std = cand.std;
    c.source_index = cand.source_index;
    c.noise_seed = cand.noise_seed;
    if (!codec_->validate(c.text)) {
      c.outcome = DecodeOutcome::Invalid;
    } else if (ds.contains(c.text) || !batch.insert(c.text).second) {
      c.outcome = DecodeOutcome::Duplicate;
    } else {
      c.outcome = DecodeOutcome::New;
      survivors.push_back(c.text);
    }
    log.candidates.push_back(std::move(c));
  }

  const auto calls_before = oracle_->calls();
  const auto scores = batch_score(*oracle_, cache_, survivors);
  const auto calls = oracle_->calls() - calls_before;

  // Everything below is bookkeeping that cannot fail halfway.
  CampaignState next;
  next.initial_texts = state_.initial_texts;
  next.generated = state_.generated;
  std::size_t k = 0;
  for (auto& c : log.candidates) {
    if (c.outcome != DecodeOutcome::New) continue;
    c.score = scores[k];
    ds.insert({c.text, scores[k], std::nullopt});
    next.generated.push_back({c.text, scores[k]});
    ++k;
  }
  next.dataset = std::move(ds);
  next.iteration = iter;
  next.oracle_calls = state_.oracle_calls + calls;
  log.new_molecules = survivors.size();
  log.best_so_far = *next.dataset.best_score();
  log.oracle_calls = calls;
  log.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  next.logs = state_.logs;
  next.logs.push_back(std::move(log));
  state_ = std::move(next);
  return state_.logs.back();
}

CampaignStatus Campaign::run(const std::atomic<bool>* stop,
                             const std::function<void(const IterationLog&)>& on_iteration) {
  const int cap = cfg_.resolved_max_iterations();
  while (static_cast<int>(state_.generated.size()) < cfg_.budget) {
    if (state_.iteration >= cap) return CampaignStatus::Partial;
    if (stop && stop->load()) return CampaignStatus::Partial;
    const auto& log = run_iteration();
    if (on_iteration) on_iteration(log);
  }
  return CampaignStatus::Complete;
}

std::vector<std::string> random_strings(const std::string& alphabet, int count, int min_len, int max_len,
                                        std::uint64_t seed) {
  if (alphabet.empty()) throw InvalidArgument("random_strings: empty alphabet");
  if (min_len < 1 || max_len < min_len) throw InvalidArgument("random_strings: bad length range");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> len(min_len, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) {
    std::string s(static_cast<std::size_t>(len(rng)), ' ');
    for (auto& ch : s) ch = alphabet[pick(rng)];
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::pair<int, double>> top_k_means(const std::vector<GeneratedEntry>& generated) {
  std::vector<double> scores;
  for (const auto& e : generated) scores.push_back(e.score);
  std::sort(scores.begin(), scores.end());
  std::vector<std::pair<int, double>> out;
  for (int k : {1, 5, 10, 20}) {
    if (scores.size() < static_cast<std::size_t>(k)) break;
    const double sum = std::accumulate(scores.begin(), scores.begin() + k, 0.0);
    out.emplace_back(k, sum / k);
  }
  return out;
}

std::vector<SimilarityWindow> similarity_report(const std::vector<std::string>& generated,
                                                const std::vector<std::string>& initial, int window) {
  if (window < 1) throw InvalidArgument("similarity_report: window must be >= 1");
  std::vector<BigramSet> init;
  init.reserve(initial.size());
  for (const auto& s : initial) init.push_back(bigrams(s));
  std::vector<SimilarityWindow> out;
  if (init.empty()) return out;
  const auto w = static_cast<std::size_t>(window);
  for (std::size_t lo = 0; lo < generated.size(); lo += w) {
    const std::size_t hi = std::min(generated.size(), lo + w);
    double sum = 0.0;
    double max_sum = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const auto g = bigrams(generated[i]);
      double best = 0.0;
      for (const auto& b : init) {
        const double s = jaccard(g, b);
        sum += s;
        best = std::max(best, s);
      }
      max_sum += best;
    }
    const auto count = static_cast<double>(hi - lo);
    out.push_back({sum / (count * static_cast<double>(init.size())), max_sum / count});
  }
  return out;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string summary_csv(const std::vector<GeneratedEntry>& generated) {
  std::vector<std::size_t> order(generated.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return generated[a].score < generated[b].score; });
  std::string out = "rank,text,score\n";
  for (std::size_t r = 0; r < order.size(); ++r) {
    const auto& e = generated[order[r]];
    out += std::to_string(r + 1) + "," + csv_field(e.text) + "," + ScoreCache::format_score(e.score) + "\n";
  }
  return out;
}

std::vector<GeneratedEntry> parse_summary_csv(const std::string& text) {
  std::vector<GeneratedEntry> out;
  std::size_t pos = 0;
  bool header = true;
  int line_no = 0;
  while (pos < text.size()) {
    ++line_no;
    // Split one record, honoring quoted fields that may span newlines.
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (; pos < text.size(); ++pos) {
      const char c = text[pos];
      if (quoted) {
        if (c == '"') {
          if (pos + 1 < text.size() && text[pos + 1] == '"') {
            fields.back() += '"';
            ++pos;
          } else {
            quoted = false;
          }
        } else {
          fields.back() += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        fields.emplace_back();
      } else if (c == '\n') {
        ++pos;
        break;
      } else if (c != '\r') {
        fields.back() += c;
      }
    }
    if (quoted) throw InvalidArgument("summary: unterminated quote");
    if (header) {
      if (fields != std::vector<std::string>{"rank", "text", "score"})
        throw InvalidArgument("summary: bad header");
      header = false;
      continue;
    }
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != 3) throw InvalidArgument("summary: line " + std::to_string(line_no) + " needs 3 fields");
    try {
      std::size_t used = 0;
      const double score = std::stod(fields[2], &used);
      if (used != fields[2].size()) throw std::invalid_argument("trailing");
      out.push_back({fields[1], score});
    } catch (const std::logic_error&) {
      throw InvalidArgument("summary: line " + std::to_string(line_no) + " has a bad score");
    }
  }
  if (header) throw InvalidArgument("summary: empty file");
  return out;
}

}  // namespace latentbo
