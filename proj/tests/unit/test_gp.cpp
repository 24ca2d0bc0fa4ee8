//
// Project latentbo - Copyright 2026 The latentbo Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "latentbo/aggregation.hpp"
#include "latentbo/gp.hpp"
#include "latentbo/kernel.hpp"
#include "latentbo/surrogate.hpp"

using namespace latentbo;
using P = KernelParams<double>;

namespace {

MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c, double sd = 1.0) {
  std::normal_distribution<double> g(0.0, sd);
  MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  return m;
}

P random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.3, 2.0), w(0.1, 1.0), noise(0.01, 0.3);
  return P::from_constrained(u(rng), u(rng), u(rng), u(rng), w(rng), w(rng), noise(rng));
}

// Posterior by a dense LU solve of (K + s I) alpha = y_std.
void dense_posterior(const GPState<double>& s, const MatrixXd& xs, VectorXd& mean, VectorXd& var) {
  MatrixXd k = gram(s.params, s.x, s.x);
  k.diagonal().array() += s.params.noise() + s.jitter;
  const MatrixXd kxs = gram(s.params, s.x, xs);
  const auto lu = k.fullPivLu();
  mean = s.transform.inverse(kxs.transpose() * lu.solve(s.y_std));
  const MatrixXd sol = lu.solve(kxs);
  var.resize(xs.rows());
  for (Eigen::Index j = 0; j < xs.rows(); ++j)
    var(j) = std::max(0.0, s.params.prior_variance() + s.params.noise() - kxs.col(j).dot(sol.col(j))) *
             s.transform.scale * s.transform.scale;
}

}  // namespace

TEST_CASE("Matern values") {
  const double expect = (1 + std::sqrt(3.0)) * std::exp(-std::sqrt(3.0));
  CHECK(matern15(1.7, 1.0, 1.7) == doctest::Approx(expect).epsilon(1e-14));
  CHECK(std::fabs(matern15(1.0, 1.0, 1.0) - 0.48336) <= 1e-4);
  const double b = std::sqrt(5.0);
  CHECK(matern25(2.0, 1.5, 2.0) == doctest::Approx(1.5 * (1 + b + b * b / 3) * std::exp(-b)).epsilon(1e-14));
  CHECK(matern15(0.0, 2.5, 0.3) == 2.5);
  CHECK(matern25(0.0, 2.5, 0.3) == 2.5);
}

TEST_CASE("composite kernel at zero distance and with one component") {
  const auto p = P::from_constrained(0.7, 1.3, 1.1, 0.4, 0.6, 0.9, 0.1);
  CHECK(p.eval_distance(0.0) == doctest::Approx(0.6 * 1.3 + 0.9 * 0.4).epsilon(1e-12));
  auto q = P::from_constrained(2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.1);
  q.raw(P::kWeight2) = -800.0;  // softplus underflows to 0
  CHECK(q.weight2() == 0.0);
  CHECK(q.eval_distance(2.0) == doctest::Approx(0.48336).epsilon(1e-4));
}

TEST_CASE("softplus round trip and positivity") {
  for (double v : {1e-6, 0.01, 0.5, 1.0, 7.0, 40.0}) CHECK(softplus(softplus_inverse(v)) == doctest::Approx(v).epsilon(1e-10));
  CHECK(softplus(-50.0) > 0.0);
  CHECK(std::isfinite(softplus(800.0)));
}

TEST_CASE("kernel symmetric and non-increasing in distance") {
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 20; ++rep) {
    const auto p = random_params(rng);
    const VectorXd a = random_matrix(rng, 5, 1), b = random_matrix(rng, 5, 1);
    CHECK(kernel_eval(p, a, b) == kernel_eval(p, b, a));
    double prev = p.eval_distance(0.0);
    for (int i = 1; i <= 200; ++i) {
      const double v = p.eval_distance(0.05 * i);
      CHECK(v <= prev);
      prev = v;
    }
  }
}

TEST_CASE("Gram matrices are symmetric PSD") {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 30; ++rep) {
    const auto p = random_params(rng);
    const MatrixXd x = random_matrix(rng, 20, 4);
    const MatrixXd k = gram(p, x, x);
    CHECK((k - k.transpose()).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(k);
    CHECK(es.eigenvalues().minCoeff() >= -1e-8);
  }
}

TEST_CASE("distance gradient matches finite differences") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 10; ++rep) {
    auto p = random_params(rng);
    const double r = 0.1 + rep * 0.3;
    const auto g = p.gradient_distance(r);
    for (int i = 0; i < P::kCount; ++i) {
      auto up = p, down = p;
      up.raw(i) += 1e-6;
      down.raw(i) -= 1e-6;
      const double fd = (up.eval_distance(r) - down.eval_distance(r)) / 2e-6;
      CHECK(g(i) == doctest::Approx(fd).epsilon(1e-6).scale(1e-8));
    }
  }
}

TEST_CASE("NLL gradient matches central differences") {
  std::mt19937_64 rng(4);
  double worst = 0.0;
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
                         negative_log_marginal_likelihood(down, x, y, 1e-6).value) / 2e-5;
      worst = std::max(worst, std::fabs(r.gradient(i) - fd) / std::max({std::fabs(fd), std::fabs(r.gradient(i)), 1e-8}));
    }
  }
  CHECK(worst <= 1e-4);
}

TEST_CASE("single point NLL has the closed form") {
  const auto p = P::from_constrained(1.0, 0.8, 1.0, 1.2, 0.5, 0.5, 0.1);
  MatrixXd x(1, 2);
  x << 0.3, -0.4;
  VectorXd y(1);
  y << 1.7;
  for (double yv : {0.0, 1.7}) {
    y(0) = yv;
    const auto r = negative_log_marginal_likelihood(p, x, y, 1e-6);
    const double s = p.prior_variance() + p.noise() + r.jitter;
    CHECK(r.value == doctest::Approx(0.5 * yv * yv / s + 0.5 * std::log(2 * std::numbers::pi * s)).epsilon(1e-13));
  }
  // The trainer standardizes, so one target becomes 0.
  GpTrainOptions<double> opt;
  opt.epochs = 5;
  const auto fit = train_gp<double>(x, y, opt, std::optional<P>(p));
  const double s0 = p.prior_variance() + p.noise() + 1e-6;
  CHECK(fit.nll_curve.front() == doctest::Approx(0.5 * std::log(2 * std::numbers::pi * s0)).epsilon(1e-13));
}

TEST_CASE("training never ends above its start and is reproducible") {
  std::mt19937_64 rng(5);
  const MatrixXd x = random_matrix(rng, 25, 4);
  VectorXd y = x.col(0).array().sin() + 0.1 * random_matrix(rng, 25, 1).array();
  GpTrainOptions<double> opt;
  const auto a = train_gp(x, y, opt);
  const auto b = train_gp(x, y, opt);
  CHECK(a.nll_curve == b.nll_curve);
  CHECK(a.state.params.raw == b.state.params.raw);
  const double final_nll = negative_log_marginal_likelihood(a.state.params, x, a.state.y_std, opt.jitter).value;
  CHECK(final_nll <= a.nll_curve.front());
  CHECK(final_nll == *std::min_element(a.nll_curve.begin(), a.nll_curve.end()));
}

TEST_CASE("Cholesky posterior equals dense solve") {
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 20; ++rep) {
    const auto p = random_params(rng);
    const MatrixXd x = random_matrix(rng, 10, 3);
    const VectorXd y = random_matrix(rng, 10, 1, 3.0);
    const auto s = condition_gp(p, x, y, 1e-6);
    const MatrixXd xs = random_matrix(rng, 15, 3);
    VectorXd m1, v1, m2, v2;
    gp_posterior(s, xs, m1, v1);
    dense_posterior(s, xs, m2, v2);
    CHECK((m1 - m2).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((v1 - v2).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((v1.array() >= 0).all());
  }
}

TEST_CASE("interpolation at the noise floor") {
  std::mt19937_64 rng(7);
  auto p = P::from_constrained(1.0, 1.0, 1.0, 1.0, 0.5, 0.5, 1e-6);
  p.raw(P::kNoise) = -40.0;  // softplus ~ 4e-18
  const MatrixXd x = random_matrix(rng, 10, 3);
  const VectorXd y = random_matrix(rng, 10, 1, 2.0);
  const auto s = condition_gp(p, x, y, 1e-12);
  VectorXd mean, var;
  gp_posterior(s, x, mean, var);
  CHECK((mean - y).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK(var.array().sqrt().maxCoeff() <= 1e-3);
  const double prior = (p.prior_variance() + p.noise()) * s.transform.scale * s.transform.scale;
  CHECK((var.array() <= prior).all());
}

TEST_CASE("far from data the prior is recovered") {
  std::mt19937_64 rng(8);
  const auto p = P::from_constrained(0.5, 1.0, 0.4, 2.0, 0.3, 0.7, 0.05);
  const MatrixXd x = random_matrix(rng, 8, 2);
  const VectorXd y = random_matrix(rng, 8, 1, 4.0);
  const auto s = condition_gp(p, x, y, 1e-6);
  MatrixXd far(1, 2);
  far << 1e4, -1e4;
  VectorXd mean, var;
  gp_posterior(s, far, mean, var);
  CHECK(mean(0) == doctest::Approx(y.mean()).epsilon(1e-12));
  const double sc = s.transform.scale;
  CHECK(var(0) == doctest::Approx((p.prior_variance() + p.noise()) * sc * sc).epsilon(1e-12));
}

TEST_CASE("duplicated training data leaves predictions at inputs unchanged") {
  std::mt19937_64 rng(9);
  auto p = P::from_constrained(1.0, 1.0, 0.8, 1.0, 0.5, 0.5, 1e-8);
  const MatrixXd x = random_matrix(rng, 10, 3);
  const VectorXd y = random_matrix(rng, 10, 1);
  MatrixXd x2(20, 3);
  x2 << x, x;
  VectorXd y2(20);
  y2 << y, y;
  const auto s1 = condition_gp(p, x, y, 1e-12);
  const auto s2 = condition_gp(p, x2, y2, 1e-12);
  VectorXd m1, v1, m2, v2;
  gp_posterior(s1, x, m1, v1);
  gp_posterior(s2, x, m2, v2);
  CHECK((m1 - m2).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("target standardization round trip") {
  std::mt19937_64 rng(10);
  const VectorXd y = random_matrix(rng, 30, 1, 5.0).array() + 3.0;
  const auto t = TargetTransform<double>::fit(y);
  CHECK((t.inverse(t.forward(y)) - y).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(t.forward(y).mean() == doctest::Approx(0.0).scale(1.0));
  const auto c = TargetTransform<double>::fit(VectorXd::Constant(4, 2.0));
  CHECK(c.scale == 1.0);
}

TEST_CASE("Cholesky failure names the jitter range") {
  const MatrixXd bad = -MatrixXd::Identity(3, 3);
  try {
    (void)noisy_cholesky(bad, 1e-9, 1e-6);
    FAIL("expected a numerical error");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("1.0e-06") != std::string::npos);
  }
}

TEST_CASE("prediction requires a trained model") {
  GPState<double> s;
  VectorXd m, v;
  CHECK_THROWS_AS(gp_posterior(s, MatrixXd(MatrixXd::Zero(1, 2)), m, v), InvalidArgument);
  SurrogateModel model;
  CHECK_THROWS_AS(gp_predict(model, MatrixXd::Zero(2, 2)), InvalidArgument);
}

TEST_CASE("surrogate keeps the feature net frozen through the GP stage") {
  std::mt19937_64 rng(11);
  ObservedDataset ds;
  for (int i = 0; i < 12; ++i) {
    const MatrixXd z = random_matrix(rng, 3 + i % 4, 3);
    ds.insert({"s" + std::to_string(i), z.sum(), TokenEmbeddingSeq{std::vector<std::int64_t>(static_cast<std::size_t>(z.rows()), 0), z}});
  }
  SurrogateOptions opt;
  opt.feature.dims = {6, 16, 16, 4};
  opt.feature.epochs = 20;
  opt.feature.seed = 3;
  opt.gp.epochs = 20;
  opt.l_max = 10;
  const auto model = train_surrogate(ds, opt);

  MatrixXd inputs(6, 12);
  VectorXd y(12);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    inputs.col(static_cast<Eigen::Index>(i)) = aggregate(ds[i].embedding->vectors, 10);
    y(static_cast<Eigen::Index>(i)) = ds[i].score;
  }
  const auto stage1 = train_feature_stage(inputs, y, opt.feature);
  for (std::size_t k = 0; k < stage1.net.layers().size(); ++k) {
    CHECK(model.net.layers()[k].weight == stage1.net.layers()[k].weight);
    CHECK(model.net.layers()[k].bias == stage1.net.layers()[k].bias);
  }
  const auto again = train_surrogate(ds, opt);
  CHECK(again.gp.params.raw == model.gp.params.raw);
  CHECK(again.gp_nll_curve == model.gp_nll_curve);

  std::vector<const MatrixXd*> seqs;
  for (const auto& r : ds.records()) seqs.push_back(&r.embedding->vectors);
  const auto preds = gp_predict_batch(model, seqs);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const auto single = gp_predict(model, ds[i].embedding->vectors);
    CHECK(single.mean == doctest::Approx(preds[i].mean).epsilon(1e-12));
    CHECK(preds[i].std >= 0.0);
  }
}
