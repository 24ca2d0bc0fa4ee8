//
// Project latentbo - Copyright 2026 The latentbo Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "latentbo/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "latentbo/aggregation.hpp"
#include "latentbo/campaign.hpp"
#include "latentbo/explorer.hpp"
#include "latentbo/gp.hpp"

namespace latentbo {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

SelftestCheck check_halves_sum(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const Eigen::Index n = 1 + rep % 32, d = 1 + rep % 16, l_max = n + rep % 7;
    MatrixXd z(n, d);
    for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = g(rng);
    const VectorXd a = aggregate(z, l_max);
    const VectorXd mu = z.colwise().mean().transpose();
    worst = std::max(worst, (a.head(d) + a.tail(d) - mu).cwiseAbs().maxCoeff());
  }
  return {"aggregation halves sum to the token mean", worst <= 1e-12, "max error " + fmt_double(worst)};
}

SelftestCheck check_permutation(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::Index n = 1 + rep % 5, d = 3, l_max = n + 2;
    MatrixXd z(n, d);
    for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = g(rng);
    const VectorXd mu = z.colwise().mean().transpose();
    const double nn = static_cast<double>(n), L = static_cast<double>(l_max);
    VectorXd expect(2 * d);
    expect << mu * ((nn + 1) / (2 * L)), mu * ((L - (nn + 1) / 2) / L);
    worst = std::max(worst, (permutation_expectation(z, l_max) - expect).cwiseAbs().maxCoeff());
  }
  return {"permutation average matches closed form", worst <= 1e-12, "max error " + fmt_double(worst)};
}

SelftestCheck check_kappa() {
  const double k1 = kappa(1, 0.1), k101 = kappa(101, 0.1);
  const bool ok = std::fabs(k1 - 2.3672) <= 1e-3 && std::fabs(k101 - 4.9052) <= 1e-3;
  return {"kappa schedule values", ok, "kappa(1)=" + fmt_double(k1) + " kappa(101)=" + fmt_double(k101)};
}

SelftestCheck check_gp(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  double worst = 0.0;
  bool var_ok = true;
  for (int rep = 0; rep < 5; ++rep) {
    MatrixXd x(10, 3), xs(7, 3);
    VectorXd y(10);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
    for (Eigen::Index i = 0; i < xs.size(); ++i) xs.data()[i] = g(rng);
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = g(rng);
    const auto params = KernelParams<double>::from_constrained(1.2, 0.8, 0.7, 1.5, 0.6, 0.4, 0.05);
    const auto state = condition_gp(params, x, y, 1e-6);
    VectorXd mean, var;
    gp_posterior(state, xs, mean, var);

    MatrixXd k = gram(params, x, x);
    k.diagonal().array() += params.noise() + state.jitter;
    const MatrixXd kxs = gram(params, x, xs);
    const VectorXd ys = state.transform.forward(y);
    const VectorXd m2 = state.transform.inverse(kxs.transpose() * k.fullPivLu().solve(ys));
    const MatrixXd sol = k.fullPivLu().solve(kxs);
    const double s2 = state.transform.scale * state.transform.scale;
    for (Eigen::Index j = 0; j < xs.rows(); ++j) {
      const double v2 = (params.prior_variance() + params.noise() - kxs.col(j).dot(sol.col(j))) * s2;
      worst = std::max({worst, std::fabs(mean(j) - m2(j)), std::fabs(var(j) - std::max(v2, 0.0))});
    }
    var_ok = var_ok && (var.array() >= 0).all();
  }
  return {"GP Cholesky posterior matches dense solve", worst <= 1e-8 && var_ok, "max error " + fmt_double(worst)};
}

SelftestCheck check_round_trip(MockCodec& codec) {
  const int max_len = std::min(20, codec.l_max());
  const auto texts = random_strings(codec.alphabet(), 500, 1, max_len, 2024);
  int failures = 0;
  std::string first;
  for (const auto& t : texts) {
    const auto back = codec.decode_repair(codec.encode(t).vectors, "repair");
    if (back != t) {
      if (failures++ == 0) first = t + " -> " + back;
    }
  }
  std::string detail = std::to_string(texts.size() - static_cast<std::size_t>(failures)) + "/" +
                       std::to_string(texts.size()) + " recovered";
  if (failures > 0) detail += ", e.g. " + first;
  return {"mock codec encode/decode round trip", failures == 0, detail};
}

}  // namespace

std::vector<SelftestCheck> run_selftest(MockCodec codec) {
  std::mt19937_64 rng(20240917);
  std::vector<SelftestCheck> out;
  auto guarded = [&](const std::string& name, auto&& fn) {
    try {
      out.push_back(fn());
    } catch (const std::exception& e) {
      out.push_back({name, false, e.what()});
    }
  };
  guarded("aggregation halves sum to the token mean", [&] { return check_halves_sum(rng); });
  guarded("permutation average matches closed form", [&] { return check_permutation(rng); });
  guarded("kappa schedule values", [&] { return check_kappa(); });
  guarded("GP Cholesky posterior matches dense solve", [&] { return check_gp(rng); });
  guarded("mock codec encode/decode round trip", [&] { return check_round_trip(codec); });
  return out;
}

}  // namespace latentbo
