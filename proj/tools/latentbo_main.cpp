//
// Project latentbo - Copyright 2026 The latentbo Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <atomic>
#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "latentbo/app.hpp"

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop.store(true); }

}  // namespace

int main(int argc, char** argv) {
  using namespace latentbo;
  CLI::App app{"Latent-space Bayesian optimization over string embeddings"};
  app.require_subcommand(1);

  RunOptions run;
  std::string seed_str, out_str, ablation_str;
  int budget = 0;
  auto* run_cmd = app.add_subcommand("run", "Run a campaign from a config file");
  run_cmd->add_option("--config", run.config, "Campaign config (YAML)")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--seed", seed_str, "Seed override");
  run_cmd->add_option("--out", out_str, "Output directory");
  run_cmd->add_option("--ablation", ablation_str, "Ablation")->check(CLI::IsMember({"none", "no-guide", "no-position"}));
  run_cmd->add_option("--budget", budget, "Number of molecules to generate (overrides the config)");
  run_cmd->add_option("--seeds", run.seeds, "Run this many consecutive seeds into seed-<n>/ subdirectories");
  run_cmd->add_flag("--quiet", run.quiet, "Only report errors");

  ResumeOptions resume;
  std::string resume_out, resume_config;
  int resume_budget = 0;
  auto* resume_cmd = app.add_subcommand("resume", "Continue a campaign from its checkpoint");
  resume_cmd->add_option("--out", resume_out, "Campaign directory");
  resume_cmd->add_option("--config", resume_config, "Config that must match the checkpoint");
  resume_cmd->add_option("--budget", resume_budget, "New generation target");
  resume_cmd->add_flag("--quiet", resume.quiet, "Only report errors");

  std::vector<std::string> report_dirs;
  auto* report_cmd = app.add_subcommand("report", "Summarize one campaign or compare two");
  report_cmd->add_option("dirs", report_dirs, "Campaign directories")->required()->expected(1, 2);

  std::string table;
  auto* selftest_cmd = app.add_subcommand("selftest", "Run the embedded invariant checks");
  selftest_cmd->add_option("--table", table, "Mock table JSON to test instead of the default");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitComplete : kExitError;
  }

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);

  if (run_cmd->parsed()) {
    try {
      if (!seed_str.empty()) run.seed = std::stoull(seed_str);
    } catch (const std::exception&) {
      std::cerr << "error: --seed must be a non-negative integer\n";
      return kExitError;
    }
    if (!out_str.empty()) run.out = out_str;
    if (!ablation_str.empty()) run.ablation = ablation_str;
    if (run_cmd->count("--budget") > 0) run.budget = budget;
    return cmd_run(run, std::cout, std::cerr, &g_stop);
  }
  if (resume_cmd->parsed()) {
    if (!resume_out.empty()) resume.out = resume_out;
    if (!resume_config.empty()) resume.config = resume_config;
    if (resume_cmd->count("--budget") > 0) resume.budget = resume_budget;
    return cmd_resume(resume, std::cout, std::cerr, &g_stop);
  }
  if (report_cmd->parsed()) {
    std::vector<std::filesystem::path> dirs(report_dirs.begin(), report_dirs.end());
    return cmd_report(dirs, std::cout, std::cerr);
  }
  std::optional<std::filesystem::path> t;
  if (!table.empty()) t = table;
  return cmd_selftest(t, std::cout, std::cerr);
}
