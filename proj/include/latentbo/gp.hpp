//
// Project latentbo - Copyright 2026 The latentbo Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LATENTBO_GP_HPP
#define LATENTBO_GP_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "latentbo/kernel.hpp"

namespace latentbo {

/// Affine map to zero-mean, unit-variance targets. A single target or a
/// constant target vector keeps scale 1.
template <typename Scalar>
struct TargetTransform {
  Scalar mean = Scalar(0);
  Scalar scale = Scalar(1);

  static TargetTransform fit(const Vector<Scalar>& y) {
    if (y.size() == 0) throw InvalidArgument("cannot standardize an empty target vector");
    TargetTransform t;
    t.mean = y.mean();
    if (y.size() > 1) {
      const Scalar var = (y.array() - t.mean).square().mean();
      const Scalar sd = std::sqrt(var);
      if (sd > Scalar(0) && std::isfinite(sd)) t.scale = sd;
    }
    return t;
  }

  [[nodiscard]] Vector<Scalar> forward(const Vector<Scalar>& y) const {
    return (y.array() - mean) / scale;
  }
  [[nodiscard]] Vector<Scalar> inverse(const Vector<Scalar>& z) const {
    return (z.array() * scale + mean).matrix();
  }
};

/// Lower Cholesky factor of K + (noise + jitter) I together with the
/// jitter that made the factorization succeed.
template <typename Scalar>
struct NoisyCholesky {
  Matrix<Scalar> lower;
  Scalar jitter = Scalar(0);
};

/// Factorizes K + (noise + jitter) I, escalating jitter x10 from
/// `jitter_start` up to `jitter_max`.
template <typename Scalar>
NoisyCholesky<Scalar> noisy_cholesky(const Matrix<Scalar>& k, Scalar noise, Scalar jitter_start,
                                     Scalar jitter_max = Scalar(1e-2)) {
  const Eigen::Index n = k.rows();
  for (Scalar jitter = jitter_start; jitter <= jitter_max * Scalar(1.0001); jitter *= Scalar(10)) {
    Matrix<Scalar> a = k;
    a.diagonal().array() += noise + jitter;
    Eigen::LLT<Matrix<Scalar>> llt(a);
    if (llt.info() == Eigen::Success) {
      Matrix<Scalar> lower = llt.matrixL();
      if ((lower.diagonal().array() > Scalar(0)).all() && lower.allFinite())
        return {std::move(lower), jitter};
    }
    if (jitter_start <= Scalar(0)) break;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "Cholesky factorization failed for %lld points with jitter %.1e through %.1e",
                static_cast<long long>(n), static_cast<double>(jitter_start),
                static_cast<double>(jitter_max));
  throw NumericalError(buf);
}

template <typename Scalar>
struct NllResult {
  Scalar value = Scalar(0);
  Eigen::Matrix<Scalar, KernelParams<Scalar>::kCount, 1> gradient;
  Scalar jitter = Scalar(0);
};

/// Negative log marginal likelihood of y under GP(0, k) with Gaussian
/// noise, and its gradient with respect to every unconstrained parameter.
///   NLL = 1/2 y^T a + sum log L_ii + N/2 log(2 pi),  a = (K + s I)^{-1} y
///   dNLL/dq = 1/2 tr((K^{-1} - a a^T) dK/dq)
template <typename Scalar>
NllResult<Scalar> negative_log_marginal_likelihood(const KernelParams<Scalar>& params,
                                                   const Matrix<Scalar>& x, const Vector<Scalar>& y,
                                                   Scalar jitter_start) {
  using P = KernelParams<Scalar>;
  const Eigen::Index n = x.rows();
  if (y.size() != n) throw InvalidArgument("target count does not match feature rows");
  const Matrix<Scalar> dist = pairwise_distances(x, x);
  const Matrix<Scalar> k = dist.unaryExpr([&](Scalar r) { return params.eval_distance(r); });
  const auto chol = noisy_cholesky(k, params.noise(), jitter_start);
  const auto lower = chol.lower.template triangularView<Eigen::Lower>();

  Vector<Scalar> alpha = lower.solve(y);
  chol.lower.transpose().template triangularView<Eigen::Upper>().solveInPlace(alpha);

  NllResult<Scalar> out;
  out.jitter = chol.jitter;
  out.value = Scalar(0.5) * y.dot(alpha) + chol.lower.diagonal().array().log().sum() +
              Scalar(0.5) * static_cast<Scalar>(n) * std::log(Scalar(2) * std::numbers::pi_v<Scalar>);

  Matrix<Scalar> kinv = Matrix<Scalar>::Identity(n, n);
  lower.solveInPlace(kinv);
  chol.lower.transpose().template triangularView<Eigen::Upper>().solveInPlace(kinv);
  const Matrix<Scalar> w = kinv - alpha * alpha.transpose();

  out.gradient.setZero();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto g = params.gradient_distance(dist(i, j));
      out.gradient += Scalar(0.5) * w(i, j) * g;
    }
  }
  out.gradient(P::kNoise) = Scalar(0.5) * w.trace() * sigmoid(params.raw(P::kNoise));
  return out;
}

/// A fitted GP over feature rows with its cached solve.
template <typename Scalar>
struct GPState {
  KernelParams<Scalar> params;
  Matrix<Scalar> x;              // N x d'
  Vector<Scalar> y_std;          // standardized targets
  TargetTransform<Scalar> transform;
  Matrix<Scalar> lower;          // chol(K + (noise + jitter) I)
  Vector<Scalar> alpha;          // (K + (noise + jitter) I)^{-1} y_std
  Scalar jitter = Scalar(0);

  [[nodiscard]] bool trained() const { return x.rows() > 0 && lower.rows() == x.rows(); }
};

/// Builds the cached solve for fixed hyperparameters.
template <typename Scalar>
GPState<Scalar> condition_gp(const KernelParams<Scalar>& params, Matrix<Scalar> x,
                             const Vector<Scalar>& y, Scalar jitter_start) {
  if (x.rows() < 1) throw InvalidArgument("GP needs at least one training point");
  if (y.size() != x.rows()) throw InvalidArgument("target count does not match feature rows");
  GPState<Scalar> s;
  s.params = params;
  s.transform = TargetTransform<Scalar>::fit(y);
  s.y_std = s.transform.forward(y);
  const auto chol = noisy_cholesky(gram(params, x, x), params.noise(), jitter_start);
  s.lower = chol.lower;
  s.jitter = chol.jitter;
  const auto lower = s.lower.template triangularView<Eigen::Lower>();
  s.alpha = lower.solve(s.y_std);
  s.lower.transpose().template triangularView<Eigen::Upper>().solveInPlace(s.alpha);
  s.x = std::move(x);
  return s;
}

template <typename Scalar>
struct GpTrainOptions {
  int epochs = 100;
  Scalar lr = Scalar(0.1);
  Scalar jitter = Scalar(1e-6);
};

template <typename Scalar>
struct GpFit {
  GPState<Scalar> state;
  std::vector<Scalar> nll_curve;  // entry 0 is the initial NLL
};

/// Starting point: unit variances, equal weights, length scales at the
/// median pairwise feature distance, noise 0.1 (standardized units).
template <typename Scalar>
KernelParams<Scalar> initial_kernel_params(const Matrix<Scalar>& x) {
  std::vector<Scalar> d;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = i + 1; j < x.rows(); ++j) d.push_back((x.row(i) - x.row(j)).norm());
  Scalar ell = Scalar(1);
  if (!d.empty()) {
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2), d.end());
    const Scalar med = d[d.size() / 2];
    if (med > Scalar(1e-8) && std::isfinite(med)) ell = med;
  }
  return KernelParams<Scalar>::from_constrained(ell, Scalar(1), ell, Scalar(1), Scalar(0.5),
                                                Scalar(0.5), Scalar(0.1));
}

/// Marginal-likelihood training with Adam on the unconstrained parameters.
/// Targets are standardized first. The returned state carries the
/// parameters of the lowest NLL seen, so the curve's minimum is never
/// above its first entry.
template <typename Scalar>
GpFit<Scalar> train_gp(const Matrix<Scalar>& x, const Vector<Scalar>& y,
                       const GpTrainOptions<Scalar>& opt,
                       std::optional<KernelParams<Scalar>> init = std::nullopt) {
  using Raw = Eigen::Matrix<Scalar, KernelParams<Scalar>::kCount, 1>;
  if (x.rows() < 1) throw InvalidArgument("GP needs at least one training point");
  if (!x.allFinite() || !y.allFinite()) throw InvalidArgument("non-finite GP training data");
  const auto transform = TargetTransform<Scalar>::fit(y);
  const Vector<Scalar> ys = transform.forward(y);

  KernelParams<Scalar> params = init ? *init : initial_kernel_params(x);
  KernelParams<Scalar> best = params;
  Scalar best_nll = std::numeric_limits<Scalar>::infinity();

  GpFit<Scalar> fit;
  Raw m = Raw::Zero(), v = Raw::Zero();
  const Scalar b1 = Scalar(0.9), b2 = Scalar(0.999), eps = Scalar(1e-8);
  for (int epoch = 0; epoch <= opt.epochs; ++epoch) {
    const auto r = negative_log_marginal_likelihood(params, x, ys, opt.jitter);
    fit.nll_curve.push_back(r.value);
    if (r.value < best_nll) {
      best_nll = r.value;
      best = params;
    }
    if (epoch == opt.epochs) break;
    m = b1 * m + (Scalar(1) - b1) * r.gradient;
    v = b2 * v + (Scalar(1) - b2) * r.gradient.cwiseProduct(r.gradient);
    const Scalar c1 = Scalar(1) - std::pow(b1, Scalar(epoch + 1));
    const Scalar c2 = Scalar(1) - std::pow(b2, Scalar(epoch + 1));
    params.raw.array() -= opt.lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  }
  fit.state = condition_gp(best, x, y, opt.jitter);
  return fit;
}

/// Posterior mean and variance (score units) at the rows of `xs`. The
/// variance includes observation noise and is clamped at zero.
template <typename Scalar>
void gp_posterior(const GPState<Scalar>& s, const Matrix<Scalar>& xs, Vector<Scalar>& mean,
                  Vector<Scalar>& var) {
  if (!s.trained()) throw InvalidArgument("GP has not been trained");
  if (xs.cols() != s.x.cols()) throw InvalidArgument("prediction features have wrong dimension");
  const Matrix<Scalar> kxs = gram(s.params, s.x, xs);  // N x M
  mean = s.transform.inverse(kxs.transpose() * s.alpha);
  const Matrix<Scalar> v = s.lower.template triangularView<Eigen::Lower>().solve(kxs);
  const Scalar prior = s.params.prior_variance() + s.params.noise();
  var = (prior - v.colwise().squaredNorm().array()).cwiseMax(Scalar(0)).matrix().transpose();
  var *= s.transform.scale * s.transform.scale;
}

}  // namespace latentbo

#endif  // LATENTBO_GP_HPP
