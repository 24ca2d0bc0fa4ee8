//
// Project latentbo - Copyright 2026 The latentbo Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LATENTBO_KERNEL_HPP
#define LATENTBO_KERNEL_HPP

#include <array>
#include <cmath>

#include "latentbo/types.hpp"

namespace latentbo {

template <typename Scalar>
Scalar softplus(Scalar x) {
  // log(1 + e^x) without overflow for large x
  return x > Scalar(0) ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

template <typename Scalar>
Scalar softplus_inverse(Scalar y) {
  if (!(y > Scalar(0))) throw InvalidArgument("softplus_inverse requires a positive value");
  return y > Scalar(30) ? y + std::log(-std::expm1(-y)) : std::log(std::expm1(y));
}

template <typename Scalar>
Scalar sigmoid(Scalar x) {
  return x >= Scalar(0) ? Scalar(1) / (Scalar(1) + std::exp(-x))
                        : std::exp(x) / (Scalar(1) + std::exp(x));
}

/// Matern nu=3/2 with variance `var` and length scale `ell`.
template <typename Scalar>
Scalar matern15(Scalar r, Scalar var, Scalar ell) {
  const Scalar a = std::sqrt(Scalar(3)) * r / ell;
  return var * (Scalar(1) + a) * std::exp(-a);
}

/// Matern nu=5/2 with variance `var` and length scale `ell`.
template <typename Scalar>
Scalar matern25(Scalar r, Scalar var, Scalar ell) {
  const Scalar b = std::sqrt(Scalar(5)) * r / ell;
  return var * (Scalar(1) + b + b * b / Scalar(3)) * std::exp(-b);
}

/// Hyperparameters of the composite kernel
///   k(r) = w1 * Matern15(r; var1, ell1) + w2 * Matern25(r; var2, ell2)
/// plus the observation noise. Everything is stored unconstrained and
/// mapped through softplus.
template <typename Scalar>
struct KernelParams {
  enum Index : int { kEll1 = 0, kVar1, kEll2, kVar2, kWeight1, kWeight2, kNoise, kCount };

  Eigen::Matrix<Scalar, kCount, 1> raw = Eigen::Matrix<Scalar, kCount, 1>::Zero();

  static KernelParams from_constrained(Scalar ell1, Scalar var1, Scalar ell2, Scalar var2,
                                       Scalar w1, Scalar w2, Scalar noise) {
    KernelParams p;
    p.raw << softplus_inverse(ell1), softplus_inverse(var1), softplus_inverse(ell2),
        softplus_inverse(var2), softplus_inverse(w1), softplus_inverse(w2), softplus_inverse(noise);
    return p;
  }

  [[nodiscard]] Scalar value(Index i) const { return softplus(raw(i)); }
  [[nodiscard]] Scalar ell1() const { return value(kEll1); }
  [[nodiscard]] Scalar var1() const { return value(kVar1); }
  [[nodiscard]] Scalar ell2() const { return value(kEll2); }
  [[nodiscard]] Scalar var2() const { return value(kVar2); }
  [[nodiscard]] Scalar weight1() const { return value(kWeight1); }
  [[nodiscard]] Scalar weight2() const { return value(kWeight2); }
  [[nodiscard]] Scalar noise() const { return value(kNoise); }

  /// k(x, x): the prior variance of the latent function.
  [[nodiscard]] Scalar prior_variance() const { return weight1() * var1() + weight2() * var2(); }

  [[nodiscard]] Scalar eval_distance(Scalar r) const {
    return weight1() * matern15(r, var1(), ell1()) + weight2() * matern25(r, var2(), ell2());
  }

  /// d k(r) / d raw_i for the six kernel parameters (the noise entry is 0).
  [[nodiscard]] Eigen::Matrix<Scalar, kCount, 1> gradient_distance(Scalar r) const {
    Eigen::Matrix<Scalar, kCount, 1> g = Eigen::Matrix<Scalar, kCount, 1>::Zero();
    const Scalar l1 = ell1(), v1 = var1(), l2 = ell2(), v2 = var2(), w1 = weight1(), w2 = weight2();
    const Scalar a = std::sqrt(Scalar(3)) * r / l1;
    const Scalar b = std::sqrt(Scalar(5)) * r / l2;
    const Scalar ea = std::exp(-a), eb = std::exp(-b);
    const Scalar shape15 = (Scalar(1) + a) * ea;
    const Scalar shape25 = (Scalar(1) + b + b * b / Scalar(3)) * eb;
    g(kEll1) = w1 * v1 * a * a * ea / l1 * sigmoid(raw(kEll1));
    g(kVar1) = w1 * shape15 * sigmoid(raw(kVar1));
    g(kEll2) = w2 * v2 * b * b * (Scalar(1) + b) / (Scalar(3) * l2) * eb * sigmoid(raw(kEll2));
    g(kVar2) = w2 * shape25 * sigmoid(raw(kVar2));
    g(kWeight1) = v1 * shape15 * sigmoid(raw(kWeight1));
    g(kWeight2) = v2 * shape25 * sigmoid(raw(kWeight2));
    return g;
  }
};

template <typename Scalar, typename DA, typename DB>
Scalar kernel_eval(const KernelParams<Scalar>& params, const Eigen::MatrixBase<DA>& a,
                   const Eigen::MatrixBase<DB>& b) {
  if (a.size() != b.size()) throw InvalidArgument("kernel_eval: dimension mismatch");
  return params.eval_distance((a - b).norm());
}

/// Euclidean distances between the rows of A and the rows of B.
template <typename DA, typename DB>
Matrix<typename DA::Scalar> pairwise_distances(const Eigen::MatrixBase<DA>& a,
                                               const Eigen::MatrixBase<DB>& b) {
  using Scalar = typename DA::Scalar;
  if (a.cols() != b.cols()) throw InvalidArgument("pairwise_distances: dimension mismatch");
  Matrix<Scalar> d(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) d(i, j) = (a.row(i) - b.row(j)).norm();
  return d;
}

/// Cross-covariance between the rows of A and B (no noise term).
template <typename Scalar, typename DA, typename DB>
Matrix<Scalar> gram(const KernelParams<Scalar>& params, const Eigen::MatrixBase<DA>& a,
                    const Eigen::MatrixBase<DB>& b) {
  return pairwise_distances(a, b).unaryExpr([&](Scalar r) { return params.eval_distance(r); });
}

}  // namespace latentbo

#endif  // LATENTBO_KERNEL_HPP
