//
// Project latentbo - Copyright 2026 The latentbo Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "latentbo/app.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "latentbo/selftest.hpp"
#include "latentbo/stats.hpp"

namespace fs = std::filesystem;

namespace latentbo {

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string g17(double v) { return ScoreCache::format_score(v); }

nlohmann::json init_record(const CampaignConfig& cfg, const CampaignState& s) {
  nlohmann::json scores = nlohmann::json::array();
  for (const auto& t : s.initial_texts) {
    for (const auto& r : s.dataset.records())
      if (r.text == t) {
        scores.push_back(r.score);
        break;
      }
  }
  return {{"iter", 0},
          {"phase", "init"},
          {"seed", cfg.seed},
          {"config_hash", hex64(config_hash(cfg))},
          {"initial", s.initial_texts},
          {"scores", std::move(scores)}};
}

nlohmann::json done_record(const CampaignState& s, CampaignStatus status) {
  nlohmann::json top = nlohmann::json::object();
  for (const auto& [k, v] : top_k_means(s.generated)) top[std::to_string(k)] = v;
  return {{"iter", s.iteration},
          {"phase", "done"},
          {"status", status == CampaignStatus::Complete ? "complete" : "partial"},
          {"generated", s.generated.size()},
          {"oracle_calls", s.oracle_calls},
          {"top_k", std::move(top)}};
}

std::string trajectory_csv(const CampaignState& s) {
  std::string out = "iter,best_so_far,new,generated,oracle_calls,explore_size\n";
  std::size_t generated = 0;
  for (const auto& l : s.logs) {
    generated += l.new_molecules;
    out += std::to_string(l.iteration) + "," + g17(l.best_so_far) + "," + std::to_string(l.new_molecules) + "," +
           std::to_string(generated) + "," + std::to_string(l.oracle_calls) + "," +
           std::to_string(l.explore_size) + "\n";
  }
  return out;
}

void write_outputs(const fs::path& dir, const CampaignConfig& cfg, const CampaignState& s,
                   std::optional<CampaignStatus> status) {
  std::string log = init_record(cfg, s).dump() + "\n";
  for (const auto& l : s.logs) log += l.to_json().dump() + "\n";
  if (status) log += done_record(s, *status).dump() + "\n";
  // Checkpoint last: a resume never sees logs newer than its state.
  write_file_atomic(dir / files::kLog, log);
  write_file_atomic(dir / files::kTrajectory, trajectory_csv(s));
  write_file_atomic(dir / files::kSummary, summary_csv(s.generated));
  write_file_atomic(dir / files::kCheckpoint, checkpoint_json(cfg, s).dump() + "\n");
}

void print_iteration(std::ostream& out, const IterationLog& l, std::size_t generated, int budget) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "iter %d: +%zu new, best %.6g, generated %zu/%d\n", l.iteration,
                l.new_molecules, l.best_so_far, generated, budget);
  out << buf;
}

int finish(Campaign& c, const fs::path& dir, CampaignStatus status, std::ostream& out, bool quiet) {
  write_outputs(dir, c.config(), c.state(), status);
  if (!quiet) {
    out << (status == CampaignStatus::Complete ? "complete" : "partial") << ": " << c.state().generated.size()
        << " generated in " << c.state().iteration << " iterations, " << c.state().oracle_calls
        << " oracle calls\n";
    for (const auto& [k, v] : top_k_means(c.state().generated)) out << "top-" << k << " mean " << g17(v) << "\n";
  }
  return status == CampaignStatus::Complete ? kExitComplete : kExitPartial;
}

int drive(Campaign& c, const fs::path& dir, std::ostream& out, bool quiet, const std::atomic<bool>* stop) {
  write_outputs(dir, c.config(), c.state(), std::nullopt);
  const auto status = c.run(stop, [&](const IterationLog& l) {
    write_outputs(dir, c.config(), c.state(), std::nullopt);
    if (!quiet) print_iteration(out, l, c.state().generated.size(), c.config().budget);
  });
  return finish(c, dir, status, out, quiet);
}

int run_one(const CampaignConfig& cfg, const fs::path& dir, std::ostream& out, bool quiet,
            const std::atomic<bool>* stop) {
  fs::create_directories(dir);
  for (const char* name : {files::kConfig, files::kCheckpoint, files::kLog, files::kSummary, files::kTrajectory,
                           files::kCache})
    fs::remove(dir / name);
  write_file_atomic(dir / files::kConfig, to_json(cfg).dump(2) + "\n");
  Campaign c(cfg, dir / files::kCache);
  return drive(c, dir, out, quiet, stop);
}

struct LogSummary {
  std::vector<std::string> initial;
  std::vector<GeneratedEntry> generated;
};

LogSummary read_log(const fs::path& dir) {
  const auto path = dir / files::kLog;
  if (!fs::exists(path)) throw InvalidArgument("missing " + path.string());
  std::istringstream in(read_file(path));
  LogSummary s;
  bool have_init = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line, nullptr, false);
    const auto where = path.string() + ":" + std::to_string(line_no);
    if (j.is_discarded() || !j.is_object() || !j.contains("iter") || !j.contains("phase"))
      throw InvalidArgument("corrupt log record at " + where);
    try {
      const auto phase = j.at("phase").get<std::string>();
      if (phase == "init") {
        s.initial = j.at("initial").get<std::vector<std::string>>();
        have_init = true;
      } else if (phase == "iteration") {
        for (const auto& c : j.at("candidates"))
          if (c.at("outcome").get<std::string>() == "new")
            s.generated.push_back({c.at("text").get<std::string>(), c.at("score").get<double>()});
      }
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgument("corrupt log record at " + where + ": " + e.what());
    }
  }
  if (!have_init) throw InvalidArgument("log " + path.string() + " has no init record");
  return s;
}

void report_one(const fs::path& dir, std::ostream& out) {
  const auto s = read_log(dir);
  out << "campaign " << dir.string() << ": " << s.generated.size() << " generated\n";
  if (s.generated.empty()) return;
  for (const auto& [k, v] : top_k_means(s.generated)) out << "top-" << k << " mean " << g17(v) << "\n";
  std::vector<std::string> texts;
  for (const auto& e : s.generated) texts.push_back(e.text);
  out << "window,mean_sim,max_sim\n";
  const auto sims = similarity_report(texts, s.initial, 10);
  for (std::size_t i = 0; i < sims.size(); ++i)
    out << i + 1 << "," << g17(sims[i].mean_sim) << "," << g17(sims[i].max_sim) << "\n";
}

bool is_sweep(const fs::path& dir) { return !fs::exists(dir / files::kLog) && fs::is_directory(dir); }

}  // namespace

fs::path resolve_out_dir(const std::optional<fs::path>& out) {
  if (out) return *out;
  if (const char* env = std::getenv(kOutputEnv); env != nullptr && *env != '\0') return env;
  return "campaign";
}

nlohmann::json checkpoint_json(const CampaignConfig& cfg, const CampaignState& state) {
  return {{"config_hash", hex64(config_hash(cfg))},
          {"config", to_json(cfg)},
          {"seed", cfg.seed},
          {"state", state.to_json()}};
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write " + tmp.string());
    f << content;
    f.flush();
    if (!f) throw Error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err, const std::atomic<bool>* stop) {
  try {
    auto cfg = load_config(opt.config);
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.ablation) cfg.ablation = parse_ablation(*opt.ablation);
    if (opt.budget) cfg.budget = *opt.budget;
    cfg.validate();
    if (opt.seeds < 1) throw InvalidArgument("--seeds must be >= 1");
    const auto dir = resolve_out_dir(opt.out);
    if (opt.seeds == 1) return run_one(cfg, dir, out, opt.quiet, stop);

    int code = kExitComplete;
    for (int i = 0; i < opt.seeds; ++i) {
      auto c = cfg;
      c.seed = cfg.seed + static_cast<std::uint64_t>(i);
      if (!opt.quiet) out << "seed " << c.seed << "\n";
      const int rc = run_one(c, dir / ("seed-" + std::to_string(c.seed)), out, opt.quiet, stop);
      if (rc == kExitPartial) code = kExitPartial;
      if (stop && stop->load()) return kExitPartial;
    }
    return code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

int cmd_resume(const ResumeOptions& opt, std::ostream& out, std::ostream& err, const std::atomic<bool>* stop) {
  try {
    const auto dir = resolve_out_dir(opt.out);
    const auto ckpt_path = dir / files::kCheckpoint;
    if (!fs::exists(ckpt_path)) throw InvalidArgument("no checkpoint in " + dir.string());
    const auto ckpt = nlohmann::json::parse(read_file(ckpt_path), nullptr, false);
    if (ckpt.is_discarded() || !ckpt.is_object()) throw InvalidArgument("corrupt checkpoint " + ckpt_path.string());
    auto cfg = config_from_json(ckpt.at("config"));
    const auto stored = ckpt.at("config_hash").get<std::string>();
    if (stored != hex64(config_hash(cfg))) throw InvalidArgument("checkpoint config hash does not match its config");
    if (opt.config) {
      auto given = load_config(*opt.config);
      given.seed = cfg.seed;
      given.ablation = cfg.ablation;
      if (hex64(config_hash(given)) != stored)
        throw InvalidArgument("config " + opt.config->string() + " does not match the checkpoint");
    }
    if (opt.budget) cfg.budget = *opt.budget;
    cfg.validate();
    Campaign c(cfg, dir / files::kCache);
    c.restore(CampaignState::from_json(ckpt.at("state")));
    return drive(c, dir, out, opt.quiet, stop);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

std::vector<std::pair<std::string, double>> per_seed_best(const fs::path& dir) {
  std::vector<std::pair<std::string, double>> out;
  auto best_of = [](const fs::path& d) {
    const auto s = read_log(d);
    if (s.generated.empty()) throw InvalidArgument("campaign " + d.string() + " generated nothing");
    double b = s.generated.front().score;
    for (const auto& e : s.generated) b = std::min(b, e.score);
    return b;
  };
  if (!is_sweep(dir)) {
    out.emplace_back("campaign", best_of(dir));
    return out;
  }
  std::vector<std::pair<std::uint64_t, fs::path>> subdirs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (!entry.is_directory() || name.rfind("seed-", 0) != 0) continue;
    subdirs.emplace_back(std::stoull(name.substr(5)), entry.path());
  }
  if (subdirs.empty()) throw InvalidArgument("no campaign found in " + dir.string());
  std::sort(subdirs.begin(), subdirs.end());
  for (const auto& [seed, path] : subdirs) out.emplace_back(path.filename().string(), best_of(path));
  return out;
}

int cmd_report(const std::vector<fs::path>& dirs, std::ostream& out, std::ostream& err) {
  try {
    if (dirs.empty() || dirs.size() > 2) throw InvalidArgument("report takes one or two campaign directories");
    for (const auto& d : dirs) {
      if (!fs::is_directory(d)) throw InvalidArgument("not a directory: " + d.string());
      if (!is_sweep(d)) {
        report_one(d, out);
        continue;
      }
      const auto best = per_seed_best(d);
      std::vector<double> v;
      out << "sweep " << d.string() << ": " << best.size() << " seeds\n";
      for (const auto& [name, b] : best) {
        out << name << " best " << g17(b) << "\n";
        v.push_back(b);
      }
      out << "median best " << g17(median(v)) << "\n";
    }
    if (dirs.size() == 2) {
      const auto a = per_seed_best(dirs[0]);
      const auto b = per_seed_best(dirs[1]);
      std::map<std::string, double> bm(b.begin(), b.end());
      std::vector<double> va, vb;
      for (const auto& [name, v] : a) {
        const auto it = bm.find(name);
        if (it == bm.end()) throw InvalidArgument("seed " + name + " missing from " + dirs[1].string());
        va.push_back(v);
        vb.push_back(it->second);
      }
      if (va.size() != b.size()) throw InvalidArgument("campaign directories cover different seeds");
      const auto w = wilcoxon_one_sided(va, vb);
      out << "wilcoxon one-sided (first < second): n=" << w.n_used << " T+=" << g17(w.statistic)
          << " p=" << g17(w.p_value) << (w.exact ? " (exact)" : " (normal approximation)") << "\n";
    }
    return kExitComplete;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

int cmd_selftest(const std::optional<fs::path>& table, std::ostream& out, std::ostream& err) {
  try {
    std::optional<MockCodec> codec;
    if (table) {
      const auto j = nlohmann::json::parse(read_file(*table));
      const auto rows = j.at("table");
      const int d = static_cast<int>(rows.at(0).size());
      codec = MockCodec::from_table(j.at("alphabet").get<std::string>(), embedding_from_json(rows, d),
                                    j.at("l_max").get<int>());
    } else {
      const CodecConfig def;
      const CampaignConfig cfg;
      codec.emplace(def.alphabet, cfg.d, cfg.l_max, def.table_seed);
    }
    const auto checks = run_selftest(*codec);
    for (const auto& c : checks) out << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << c.detail << ")\n";
    return all_passed(checks) ? kExitComplete : kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace latentbo
