//
// Project latentbo - Copyright 2026 The latentbo Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>

#include <set>

#include "latentbo/campaign.hpp"

using namespace latentbo;

namespace {

CampaignConfig small_config() {
  CampaignConfig c;
  c.seed = 5;
  c.d = 4;
  c.l_max = 16;
  c.mlp_dims = {8, 16, 4};
  c.mlp_epochs = 15;
  c.gp_epochs = 15;
  c.samples_per_record = 8;
  c.n_cand = 3;
  c.budget = 6;
  c.codec.alphabet = "CNO()=1";
  c.oracle.target = "CC(=O)N";
  c.initial.random_count = 8;
  c.initial.random_min_len = 3;
  c.initial.random_max_len = 8;
  c.initial.random_seed = 2;
  return c;
}

class FlakyOracle final : public Objective {
public:
  bool fail = false;
  std::string name() const override { return "flaky"; }

protected:
  double evaluate(const std::string& text) override {
    if (fail) throw Error("oracle down");
    return inner_.score(text);
  }

private:
  SyntheticObjective inner_{"CC(=O)N"};
};

std::vector<std::string> log_lines(const CampaignState& s) {
  std::vector<std::string> out;
  for (const auto& l : s.logs) out.push_back(l.to_json(false).dump());
  return out;
}

}  // namespace

TEST_CASE("zero noise and one sample per record reproduces the dataset") {
  auto c = small_config();
  c.lambda_perturb = 0.0;
  c.samples_per_record = 1;
  Campaign camp(c);
  const auto before = camp.state().to_json();
  const auto& log = camp.run_iteration();
  CHECK(log.candidates.size() == 3);
  for (const auto& cand : log.candidates) CHECK(cand.outcome == DecodeOutcome::Duplicate);
  CHECK(log.new_molecules == 0);
  CHECK(log.oracle_calls == 0);
  CHECK(camp.state().dataset.size() == camp.state().initial_texts.size());
  CHECK(camp.state().to_json()["dataset"] == before["dataset"]);
  CHECK(camp.state().iteration == 1);
}

TEST_CASE("bookkeeping grows by the unique valid candidates") {
  Campaign camp(small_config());
  for (int i = 0; i < 3; ++i) {
    const auto ds_before = camp.state().dataset.size();
    const auto gen_before = camp.state().generated.size();
    const auto calls_before = camp.state().oracle_calls;
    const auto& log = camp.run_iteration();
    std::size_t fresh = 0;
    for (const auto& cand : log.candidates) fresh += cand.outcome == DecodeOutcome::New ? 1 : 0;
    CHECK(fresh == log.new_molecules);
    CHECK(camp.state().dataset.size() == ds_before + fresh);
    CHECK(camp.state().generated.size() == gen_before + fresh);
    CHECK(camp.state().oracle_calls == calls_before + log.oracle_calls);
    CHECK(log.oracle_calls <= 3);
    CHECK(log.kappa.has_value());
    CHECK(log.t == static_cast<long long>(ds_before) + 1);
  }
}

TEST_CASE("same seed gives identical logs") {
  Campaign a(small_config());
  Campaign b(small_config());
  (void)a.run();
  (void)b.run();
  CHECK(log_lines(a.state()) == log_lines(b.state()));
  CHECK(summary_csv(a.state().generated) == summary_csv(b.state().generated));

  auto other = small_config();
  other.seed = 6;
  Campaign c(other);
  (void)c.run();
  CHECK(log_lines(a.state()) != log_lines(c.state()));
}

TEST_CASE("loop invariants") {
  auto cfg = small_config();
  cfg.budget = 10;
  Campaign camp(cfg);
  (void)camp.run();
  const auto& s = camp.state();
  const std::set<std::string> initial(s.initial_texts.begin(), s.initial_texts.end());
  std::set<std::string> seen;
  for (const auto& e : s.generated) {
    CHECK(initial.count(e.text) == 0);
    CHECK(seen.insert(e.text).second);
    CHECK(camp.codec().validate(e.text));
  }
  for (std::size_t i = 1; i < s.logs.size(); ++i) CHECK(s.logs[i].best_so_far <= s.logs[i - 1].best_so_far);
  for (const auto& l : s.logs) CHECK(l.oracle_calls <= static_cast<std::uint64_t>(cfg.n_cand));
}

TEST_CASE("budget one completes") {
  auto cfg = small_config();
  cfg.budget = 1;
  Campaign camp(cfg);
  CHECK(camp.run() == CampaignStatus::Complete);
  CHECK(camp.state().generated.size() >= 1);
  CHECK(camp.state().best_generated().has_value());
}

TEST_CASE("unreachable budget is partial") {
  auto cfg = small_config();
  cfg.budget = 1000;
  cfg.max_iterations = 2;
  Campaign camp(cfg);
  CHECK(camp.run() == CampaignStatus::Partial);
  CHECK(camp.state().iteration == 2);

  std::atomic<bool> stop{true};
  Campaign stopped(small_config());
  CHECK(stopped.run(&stop) == CampaignStatus::Partial);
  CHECK(stopped.state().iteration == 0);
}

TEST_CASE("failed iteration leaves the state untouched") {
  auto cfg = small_config();
  auto codec = std::make_shared<MockCodec>(cfg.codec.alphabet, cfg.d, cfg.l_max, cfg.codec.table_seed);
  auto oracle = std::make_shared<FlakyOracle>();
  Campaign camp(cfg, codec, oracle);
  (void)camp.run_iteration();
  const auto before = camp.state().to_json().dump();
  oracle->fail = true;
  int attempts = 0;
  for (; attempts < 5; ++attempts) {
    try {
      (void)camp.run_iteration();
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("oracle down") != std::string::npos);
      break;
    }
  }
  REQUIRE(attempts < 5);
  CHECK(camp.state().to_json().dump() == before);
  oracle->fail = false;
  CHECK_NOTHROW((void)camp.run_iteration());
}

TEST_CASE("no-guide ablation selects at random") {
  auto cfg = small_config();
  cfg.ablation = Ablation::NoGuide;
  Campaign camp(cfg);
  const auto& log = camp.run_iteration();
  CHECK_FALSE(log.kappa.has_value());
  CHECK_FALSE(log.gp_nll.has_value());
  CHECK(log.candidates.size() == 3);
  for (const auto& c : log.candidates) CHECK_FALSE(c.acquisition.has_value());
}

TEST_CASE("no-position ablation still trains the surrogate") {
  auto cfg = small_config();
  cfg.ablation = Ablation::NoPosition;
  Campaign camp(cfg);
  const auto& log = camp.run_iteration();
  CHECK(log.kappa.has_value());
  CHECK(log.gp_nll.has_value());
}

TEST_CASE("initial set validation") {
  auto cfg = small_config();
  cfg.initial.random_count = 0;
  cfg.initial.texts = {"CC", "CC"};
  CHECK_THROWS_AS(Campaign{cfg}, InvalidArgument);
  cfg.initial.texts = {"CC", "XX"};
  CHECK_THROWS_AS(Campaign{cfg}, InvalidArgument);
  cfg.initial.texts = {"CC", "CO", "CC"};
  Campaign ok(cfg);
  CHECK(ok.state().initial_texts == std::vector<std::string>{"CC", "CO"});
  CHECK(ok.state().oracle_calls == 2);
}

TEST_CASE("checkpoint round trip and resume") {
  const auto cfg = small_config();
  Campaign straight(cfg);
  for (int i = 0; i < 3; ++i) (void)straight.run_iteration();

  Campaign first(cfg);
  (void)first.run_iteration();
  const auto saved = nlohmann::json::parse(first.state().to_json().dump());
  const auto restored = CampaignState::from_json(saved);
  CHECK(restored.to_json() == saved);

  Campaign resumed(cfg);
  resumed.restore(restored);
  (void)resumed.run_iteration();
  (void)resumed.run_iteration();
  CHECK(log_lines(resumed.state()) == log_lines(straight.state()));
  CHECK(resumed.state().to_json()["dataset"] == straight.state().to_json()["dataset"]);
}

TEST_CASE("similarity against hand-computed bigram sets") {
  const std::vector<std::string> initial{"ABC", "BCD"};
  const std::vector<std::string> generated{"ABC", "XY", "BCDE"};
  const auto all = similarity_report(generated, initial);
  REQUIRE(all.size() == 1);
  CHECK(all[0].mean_sim == doctest::Approx(0.375).epsilon(1e-15));
  CHECK(all[0].max_sim == doctest::Approx(5.0 / 9.0).epsilon(1e-15));

  const auto pairs = similarity_report(generated, initial, 2);
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].mean_sim == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(pairs[0].max_sim == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(pairs[1].mean_sim == doctest::Approx(11.0 / 24.0).epsilon(1e-15));
  CHECK(pairs[1].max_sim == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

  const auto disjoint = similarity_report({"XY", "YZ"}, initial);
  CHECK(disjoint[0].mean_sim == 0.0);
  CHECK(disjoint[0].max_sim == 0.0);
  CHECK(similarity_report({}, initial).empty());
  CHECK_THROWS_AS(similarity_report(generated, initial, 0), InvalidArgument);
}

TEST_CASE("top-k means") {
  std::vector<GeneratedEntry> gen;
  for (int i = 0; i < 20; ++i) gen.push_back({"s" + std::to_string(i), static_cast<double>((i * 7) % 20) - 10.0});
  const auto tk = top_k_means(gen);
  REQUIRE(tk.size() == 4);
  CHECK(tk[0] == std::pair<int, double>{1, -10.0});
  CHECK(tk[1].second == doctest::Approx(-8.0));
  CHECK(tk[2].second == doctest::Approx(-5.5));
  CHECK(tk[3].second == doctest::Approx(-0.5));
  for (std::size_t i = 1; i < tk.size(); ++i) CHECK(tk[i - 1].second <= tk[i].second);
  gen.resize(7);
  CHECK(top_k_means(gen).size() == 2);
  CHECK(top_k_means({}).empty());
}

TEST_CASE("summary csv round trip") {
  const std::vector<GeneratedEntry> gen{{"CC", -1.5}, {"C,O", -3.25}, {"say \"hi\"", 0.1 + 0.2}, {"CN", -1.5}};
  const auto csv = summary_csv(gen);
  CHECK(csv.rfind("rank,text,score\n1,\"C,O\",-3.25\n2,CC,-1.5\n3,CN,-1.5\n", 0) == 0);
  const auto back = parse_summary_csv(csv);
  REQUIRE(back.size() == 4);
  CHECK(back[0].text == "C,O");
  CHECK(back[3].text == "say \"hi\"");
  CHECK(back[3].score == 0.1 + 0.2);
  CHECK_THROWS_AS(parse_summary_csv(""), InvalidArgument);
  CHECK_THROWS_AS(parse_summary_csv("rank,text\n"), InvalidArgument);
  CHECK_THROWS_AS(parse_summary_csv("rank,text,score\n1,CC,abc\n"), InvalidArgument);
  CHECK_THROWS_AS(parse_summary_csv("rank,text,score\n1,\"CC,1\n"), InvalidArgument);
}

TEST_CASE("random strings") {
  const auto a = random_strings("AB", 50, 2, 4, 9);
  CHECK(a == random_strings("AB", 50, 2, 4, 9));
  for (const auto& s : a) {
    CHECK(s.size() >= 2);
    CHECK(s.size() <= 4);
    CHECK(s.find_first_not_of("AB") == std::string::npos);
  }
  CHECK_THROWS_AS(random_strings("", 1, 1, 1, 0), InvalidArgument);
  CHECK_THROWS_AS(random_strings("A", 1, 3, 2, 0), InvalidArgument);
}
