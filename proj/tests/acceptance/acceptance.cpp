//
// Project latentbo - Copyright 2026 The latentbo Authors.
// SPDX-License-Identifier: Apache-2.0
//

// Acceptance suite: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "latentbo/aggregation.hpp"
#include "latentbo/app.hpp"
#include "latentbo/campaign.hpp"
#include "latentbo/explorer.hpp"
#include "latentbo/gp.hpp"
#include "latentbo/kernel.hpp"
#include "latentbo/mlp.hpp"
#include "latentbo/stats.hpp"

using namespace latentbo;
namespace fs = std::filesystem;
using P = KernelParams<double>;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* pattern, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c, double sd = 1.0) {
  std::normal_distribution<double> g(0.0, sd);
  MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  return m;
}

double rel_err(double a, double b) { return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-8}); }

P random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.3, 2.0), w(0.1, 1.0), noise(0.01, 0.3);
  return P::from_constrained(u(rng), u(rng), u(rng), u(rng), w(rng), w(rng), noise(rng));
}

Outcome halves_sum() {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> dim(1, 64);
  double worst = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const Eigen::Index n = dim(rng), d = dim(rng);
    const Eigen::Index l_max = n + std::uniform_int_distribution<int>(0, 16)(rng);
    const MatrixXd z = random_matrix(rng, n, d);
    const VectorXd a = aggregate(z, l_max);
    const VectorXd mu = z.colwise().mean().transpose();
    worst = std::max(worst, (a.head(d) + a.tail(d) - mu).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-12, fmt("max error %.3g over 1000 sequences", worst)};
}

Outcome permutation_closed_form() {
  std::mt19937_64 rng(102);
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const Eigen::Index n = 1 + rep % 6;
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng() % 8);
    const Eigen::Index l_max = n + static_cast<Eigen::Index>(rng() % 10);
    const MatrixXd z = random_matrix(rng, n, d);
    const VectorXd mu = z.colwise().mean().transpose();
    const double nn = static_cast<double>(n), L = static_cast<double>(l_max);
    VectorXd expect(2 * d);
    expect << mu * ((nn + 1) / (2 * L)), mu * ((L - (nn + 1) / 2) / L);
    worst = std::max(worst, (permutation_expectation(z, l_max) - expect).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-12, fmt("max error %.3g over 50 instances", worst)};
}

Outcome kappa_schedule() {
  const double k1 = kappa(1, 0.1), k101 = kappa(101, 0.1);
  bool monotone = true;
  double prev = k1;
  for (long long t = 2; t <= 10000; ++t) {
    const double k = kappa(t, 0.1);
    monotone = monotone && k > prev;
    prev = k;
  }
  const bool ok = std::fabs(k1 - 2.3672) <= 1e-3 && std::fabs(k101 - 4.9052) <= 1e-3 && monotone;
  return {ok, fmt("kappa(1)=%.6f", k1) + fmt(" kappa(101)=%.6f", k101) + (monotone ? " monotone" : " NOT monotone")};
}

Outcome matern_and_psd() {
  const double m = matern15(1.0, 1.0, 1.0);
  std::mt19937_64 rng(104);
  int psd = 0;
  double min_eig = 1e300;
  for (int rep = 0; rep < 100; ++rep) {
    const auto p = random_params(rng);
    const MatrixXd x = random_matrix(rng, 20, 1 + rep % 6, 0.5 + 0.05 * rep);
    MatrixXd k = gram(p, x, x);
    k.diagonal().array() += 1e-6;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(k);
    Eigen::LLT<MatrixXd> llt(k);
    min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
    if (llt.info() == Eigen::Success && es.eigenvalues().minCoeff() > 0.0) ++psd;
  }
  return {std::fabs(m - 0.48336) <= 1e-4 && psd == 100,
          fmt("matern15(r=l)=%.8f", m) + ", " + std::to_string(psd) + "/100 PSD" + fmt(", min eigenvalue %.3g", min_eig)};
}

double mlp_gradient_error(FeatureNet<double> net, const MatrixXd& x, const MatrixXd& c) {
  std::vector<DenseLayer<double>> grads;
  net.backward(net.forward_cached(x), c, grads);
  const double h = 1e-5;
  double worst = 0.0;
  auto loss = [&] { return net.forward(x).cwiseProduct(c).sum(); };
  auto probe = [&](double& v, double analytic) {
    const double saved = v;
    v = saved + h;
    const double up = loss();
    v = saved - h;
    const double down = loss();
    v = saved;
    worst = std::max(worst, rel_err(analytic, (up - down) / (2 * h)));
  };
  for (std::size_t k = 0; k < net.layers().size(); ++k) {
    auto& layer = net.layers()[k];
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i) probe(layer.weight.data()[i], grads[k].weight.data()[i]);
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) probe(layer.bias(i), grads[k].bias(i));
  }
  return worst;
}

Outcome gradient_checks() {
  std::mt19937_64 rng(105);
  double mlp_worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const int in = 2 + rep % 7;
    auto net = FeatureNet<double>::init({in, 8 + rep % 5, 6, 3}, rng);
    mlp_worst = std::max(mlp_worst, mlp_gradient_error(net, random_matrix(rng, in, 5), random_matrix(rng, 3, 5)));
  }
  double gp_worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const auto p = random_params(rng);
    const MatrixXd x = random_matrix(rng, 12, 3);
    const VectorXd y = random_matrix(rng, 12, 1);
    const auto r = negative_log_marginal_likelihood(p, x, y, 1e-6);
    for (int i = 0; i < P::kCount; ++i) {
      auto up = p, down = p;
      up.raw(i) += 1e-5;
      down.raw(i) -= 1e-5;
      const double fd = (negative_log_marginal_likelihood(up, x, y, 1e-6).value -
                         negative_log_marginal_likelihood(down, x, y, 1e-6).value) /
                        2e-5;
      gp_worst = std::max(gp_worst, rel_err(r.gradient(i), fd));
    }
  }
  return {mlp_worst <= 1e-5 && gp_worst <= 1e-4,
          fmt("MLP max rel %.3g", mlp_worst) + fmt(", GP NLL max rel %.3g", gp_worst)};
}

Outcome gp_equivalence() {
  std::mt19937_64 rng(106);
  double worst = 0.0;
  bool nonneg = true;
  for (int rep = 0; rep < 20; ++rep) {
    const auto p = random_params(rng);
    const MatrixXd x = random_matrix(rng, 10, 3);
    const VectorXd y = random_matrix(rng, 10, 1, 3.0);
    const auto s = condition_gp(p, x, y, 1e-6);
    const MatrixXd xs = random_matrix(rng, 15, 3, 2.0);
    VectorXd mean, var;
    gp_posterior(s, xs, mean, var);

    MatrixXd k = gram(p, x, x);
    k.diagonal().array() += p.noise() + s.jitter;
    const MatrixXd kxs = gram(p, x, xs);
    const auto lu = k.fullPivLu();
    const VectorXd dense_mean = s.transform.inverse(kxs.transpose() * lu.solve(s.y_std));
    const MatrixXd sol = lu.solve(kxs);
    for (Eigen::Index j = 0; j < xs.rows(); ++j) {
      const double v = std::max(0.0, p.prior_variance() + p.noise() - kxs.col(j).dot(sol.col(j))) *
                       s.transform.scale * s.transform.scale;
      worst = std::max({worst, std::fabs(mean(j) - dense_mean(j)), std::fabs(var(j) - v)});
    }
    nonneg = nonneg && (var.array() >= 0).all();
  }

  auto floor = P::from_constrained(1.0, 1.0, 1.0, 1.0, 0.5, 0.5, 1e-6);
  floor.raw(P::kNoise) = -40.0;
  double interp = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    const MatrixXd x = random_matrix(rng, 10, 3);
    const VectorXd y = random_matrix(rng, 10, 1, 2.0);
    const auto s = condition_gp(floor, x, y, 1e-12);
    VectorXd mean, var;
    gp_posterior(s, x, mean, var);
    interp = std::max(interp, (mean - y).cwiseAbs().maxCoeff());
    nonneg = nonneg && (var.array() >= 0).all();
  }
  return {worst <= 1e-8 && nonneg && interp <= 1e-6,
          fmt("dense-solve max diff %.3g", worst) + fmt(", interpolation max error %.3g", interp) +
              (nonneg ? ", variances >= 0" : ", NEGATIVE variance")};
}

Outcome mock_codec() {
  const CodecConfig def;
  MockCodec codec(def.alphabet, 16, 80, def.table_seed);
  int exact = 0;
  for (const auto& s : random_strings(def.alphabet, 500, 1, 80, 107))
    exact += codec.decode_repair(codec.encode(s).vectors, "repair") == s ? 1 : 0;

  MockCodec wide(def.alphabet, 32, 80, 108);
  const auto texts = random_strings(def.alphabet, 500, 1, 20, 109);
  int recovered = 0;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const auto z = perturb(wide.encode(texts[i]).vectors, 0.01, derive_seed(110, i));
    recovered += wide.decode_repair(z.vectors, "repair") == texts[i] ? 1 : 0;
  }
  return {exact == 500 && recovered >= 495,
          std::to_string(exact) + "/500 round trip, " + std::to_string(recovered) + "/500 recovered at lambda=0.01"};
}

double enumerate_p(const std::vector<double>& d) {
  const std::size_t n = d.size();
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n; ++i) {
    double less = 0, equal = 0;
    for (std::size_t j = 0; j < n; ++j) {
      less += std::fabs(d[j]) < std::fabs(d[i]) ? 1 : 0;
      equal += std::fabs(d[j]) == std::fabs(d[i]) ? 1 : 0;
    }
    rank[i] = less + (equal + 1) / 2;
  }
  double observed = 0;
  for (std::size_t i = 0; i < n; ++i) observed += d[i] > 0 ? rank[i] : 0;
  std::size_t hits = 0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    double t = 0;
    for (std::size_t i = 0; i < n; ++i) t += (mask >> i & 1U) ? rank[i] : 0;
    hits += t <= observed + 1e-9 ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(std::size_t{1} << n);
}

Outcome wilcoxon_exactness() {
  const double p5 = wilcoxon_one_sided({1, 2, 3, 4, 5}, {1.5, 3, 4.75, 6, 7.25}).p_value;
  std::mt19937_64 rng(111);
  double worst = 0.0;
  for (int inst = 0; inst < 100; ++inst) {
    const int n = 5 + inst % 6;
    std::vector<double> a(n), b(n, 0.0);
    for (int i = 0; i < n; ++i) {
      do {
        a[i] = inst % 2 == 0 ? static_cast<double>(static_cast<int>(rng() % 9) - 4)
                             : std::normal_distribution<double>(0.3, 1.0)(rng);
      } while (a[i] == 0.0);
    }
    worst = std::max(worst, std::fabs(wilcoxon_one_sided(a, b).p_value - enumerate_p(a)));
  }
  return {p5 == 0.03125 && worst <= 1e-12,
          fmt("n=5 all-negative p=%.17g", p5) + fmt(", max diff vs enumeration %.3g", worst)};
}

CampaignConfig e2e_config(std::uint64_t seed, Ablation ablation) {
  CampaignConfig c;
  c.seed = seed;
  c.ablation = ablation;
  c.n_cand = 5;
  c.budget = 1000;  // never reached: the iteration cap ends every run
  c.max_iterations = 20;
  c.initial.random_count = 20;
  c.initial.random_min_len = 4;
  c.initial.random_max_len = 12;
  c.initial.random_seed = seed;
  return c;
}

Outcome end_to_end() {
  std::vector<double> guided, random;
  int wins = 0;
  std::string per_seed;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Campaign a(e2e_config(seed, Ablation::None));
    Campaign b(e2e_config(seed, Ablation::NoGuide));
    (void)a.run();
    (void)b.run();
    if (a.state().initial_texts.size() != 20 || a.state().iteration != 20 || b.state().iteration != 20)
      return {false, "setup mismatch for seed " + std::to_string(seed)};
    // Equal oracle-call budget: both arms are judged on their first B
    // generated molecules, B the smaller of the two counts.
    const auto& ga = a.state().generated;
    const auto& gb = b.state().generated;
    const std::size_t budget = std::min(ga.size(), gb.size());
    if (budget == 0) return {false, "seed " + std::to_string(seed) + " generated nothing"};
    auto best = [budget](const std::vector<GeneratedEntry>& g) {
      double m = g.front().score;
      for (std::size_t i = 0; i < budget; ++i) m = std::min(m, g[i].score);
      return m;
    };
    guided.push_back(best(ga));
    random.push_back(best(gb));
    wins += guided.back() < random.back() ? 1 : 0;
    per_seed += " " + std::to_string(budget);
  }
  const double mg = median(guided), mr = median(random);
  const auto w = wilcoxon_one_sided(guided, random);
  return {mg < mr && w.p_value < 0.05,
          fmt("median guided %.4f", mg) + fmt(" vs random %.4f", mr) + fmt(", p=%.5f", w.p_value) + ", " +
              std::to_string(wins) + "/10 seeds better, budgets" + per_seed};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const auto root = fs::temp_directory_path() / "latentbo_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const auto cfg = root / "config.yaml";
  std::ofstream(cfg) << "seed: 3\nbudget: 10\ninitial:\n  random_count: 20\n  random_seed: 3\n";
  std::ostringstream out, err;
  RunOptions opt;
  opt.config = cfg;
  opt.quiet = true;
  opt.out = root / "a";
  const int ra = cmd_run(opt, out, err);
  opt.out = root / "b";
  const int rb = cmd_run(opt, out, err);
  if (ra == kExitError || rb == kExitError) return {false, "run failed: " + err.str()};
  const auto sa = slurp(root / "a" / files::kSummary);
  const auto sb = slurp(root / "b" / files::kSummary);
  const bool same = !sa.empty() && sa == sb;
  const auto rows = std::count(sa.begin(), sa.end(), '\n') - 1;
  return {same, std::to_string(rows) + " summary rows, " + (same ? "byte-identical" : "DIFFERENT")};
}

struct Criterion {
  std::string name;
  std::function<Outcome()> run;
  double time_limit_s;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"aggregation-halves-sum", halves_sum, 5.0},
      {"permutation-closed-form", permutation_closed_form, 10.0},
      {"kappa-schedule", kappa_schedule, 0.0},
      {"matern-and-psd", matern_and_psd, 0.0},
      {"gradient-checks", gradient_checks, 0.0},
      {"gp-oracle-equivalence", gp_equivalence, 0.0},
      {"mock-codec", mock_codec, 0.0},
      {"wilcoxon-exactness", wilcoxon_exactness, 0.0},
      {"end-to-end-improvement", end_to_end, 600.0},
      {"determinism", determinism, 0.0},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit_s > 0 && secs >= c.time_limit_s) {
      o.passed = false;
      o.detail += fmt(", over the %.0f s limit", c.time_limit_s);
    }
    failed += o.passed ? 0 : 1;
    std::cout << (o.passed ? "PASS " : "FAIL ") << c.name << " (" << o.detail << fmt(", %.2f s)", secs) << "\n"
              << std::flush;
  }
  return failed == 0 ? 0 : 1;
}
