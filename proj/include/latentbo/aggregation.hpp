//
// Project latentbo - Copyright 2026 The latentbo Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LATENTBO_AGGREGATION_HPP
#define LATENTBO_AGGREGATION_HPP

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "latentbo/types.hpp"

namespace latentbo {

/// Maximum sequence length accepted by permutation_expectation (n! orderings).
inline constexpr Eigen::Index kMaxEnumerationLength = 8;

namespace detail {

template <typename Derived>
void check_aggregate_input(const Eigen::MatrixBase<Derived>& tokens, Eigen::Index l_max) {
  if (l_max < 1) throw InvalidArgument("l_max must be >= 1");
  if (tokens.rows() == 0) throw InvalidArgument("cannot aggregate an empty sequence");
  if (tokens.rows() > l_max)
    throw InvalidArgument("sequence length " + std::to_string(tokens.rows()) +
                          " exceeds l_max " + std::to_string(l_max));
}

}  // namespace detail

/// Position-aware pooling of a (n x d) token matrix into a 2d vector.
///
/// Token t (1-indexed position p) contributes p*z_t to the first half and
/// (l_max - p)*z_t to the second half; both halves are averaged over n and
/// divided by l_max. The halves therefore sum to the token mean, which the
/// tests use as a numerical health check. Accumulation runs in long double.
template <typename Derived>
Vector<typename Derived::Scalar> aggregate(const Eigen::MatrixBase<Derived>& tokens,
                                           Eigen::Index l_max) {
  using Scalar = typename Derived::Scalar;
  detail::check_aggregate_input(tokens, l_max);
  const Eigen::Index n = tokens.rows();
  const Eigen::Index d = tokens.cols();

  Vector<long double> head = Vector<long double>::Zero(d);
  Vector<long double> tail = Vector<long double>::Zero(d);
  for (Eigen::Index t = 0; t < n; ++t) {
    const long double p = static_cast<long double>(t + 1);
    const long double q = static_cast<long double>(l_max) - p;
    const auto row = tokens.row(t).transpose().template cast<long double>();
    head += p * row;
    tail += q * row;
  }
  const long double scale = 1.0L / (static_cast<long double>(n) * static_cast<long double>(l_max));

  Vector<Scalar> out(2 * d);
  out.head(d) = (head * scale).template cast<Scalar>();
  out.tail(d) = (tail * scale).template cast<Scalar>();
  return out;
}

/// Position-free baseline: concat(mean, mean). Invariant under any
/// reordering of the tokens.
template <typename Derived>
Vector<typename Derived::Scalar> aggregate_mean_baseline(const Eigen::MatrixBase<Derived>& tokens,
                                                         Eigen::Index l_max) {
  using Scalar = typename Derived::Scalar;
  detail::check_aggregate_input(tokens, l_max);
  const Eigen::Index d = tokens.cols();
  Vector<long double> sum = Vector<long double>::Zero(d);
  for (Eigen::Index t = 0; t < tokens.rows(); ++t)
    sum += tokens.row(t).transpose().template cast<long double>();
  const Vector<Scalar> mean =
      (sum / static_cast<long double>(tokens.rows())).template cast<Scalar>();
  Vector<Scalar> out(2 * d);
  out << mean, mean;
  return out;
}

/// Exact average of aggregate() over all n! orderings of the token rows.
/// Intended for small n only; larger inputs are rejected.
template <typename Derived>
Vector<typename Derived::Scalar> permutation_expectation(const Eigen::MatrixBase<Derived>& tokens,
                                                         Eigen::Index l_max) {
  using Scalar = typename Derived::Scalar;
  detail::check_aggregate_input(tokens, l_max);
  const Eigen::Index n = tokens.rows();
  if (n > kMaxEnumerationLength)
    throw InvalidArgument("permutation_expectation supports n <= " +
                          std::to_string(kMaxEnumerationLength) + ", got " + std::to_string(n));

  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  Matrix<Scalar> permuted(n, tokens.cols());
  Vector<long double> acc = Vector<long double>::Zero(2 * tokens.cols());
  long double count = 0.0L;
  do {
    for (Eigen::Index t = 0; t < n; ++t) permuted.row(t) = tokens.row(perm[static_cast<std::size_t>(t)]);
    acc += aggregate(permuted, l_max).template cast<long double>();
    count += 1.0L;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return (acc / count).template cast<Scalar>();
}

/// Dispatch used by the surrogate so the ablation can swap pooling rules.
enum class Pooling { PositionAware, Mean };

template <typename Derived>
Vector<typename Derived::Scalar> pool(const Eigen::MatrixBase<Derived>& tokens, Eigen::Index l_max,
                                      Pooling mode) {
  return mode == Pooling::PositionAware ? aggregate(tokens, l_max)
                                        : aggregate_mean_baseline(tokens, l_max);
}

}  // namespace latentbo

#endif  // LATENTBO_AGGREGATION_HPP
