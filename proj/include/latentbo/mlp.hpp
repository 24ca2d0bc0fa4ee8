//
// Project latentbo - Copyright 2026 The latentbo Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LATENTBO_MLP_HPP
#define LATENTBO_MLP_HPP

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "latentbo/types.hpp"

namespace latentbo {

template <typename Scalar>
struct DenseLayer {
  Matrix<Scalar> weight;  // out x in
  Vector<Scalar> bias;    // out

  [[nodiscard]] Eigen::Index in_dim() const { return weight.cols(); }
  [[nodiscard]] Eigen::Index out_dim() const { return weight.rows(); }

  static DenseLayer zeros_like(const DenseLayer& other) {
    return {Matrix<Scalar>::Zero(other.weight.rows(), other.weight.cols()),
            Vector<Scalar>::Zero(other.bias.size())};
  }
};

enum class Activation { ReLU, Identity };

/// Activations of every layer for one batch, kept for the backward pass.
/// inputs[i] is the input to layer i; pre[i] is W_i * inputs[i] + b_i.
template <typename Scalar>
struct ForwardCache {
  std::vector<Matrix<Scalar>> inputs;
  std::vector<Matrix<Scalar>> pre;
  Matrix<Scalar> output;
};

/// Fully connected network acting on column batches (features x batch).
/// Hidden layers use `hidden_activation`; the output layer is linear.
template <typename Scalar>
class FeatureNet {
public:
  FeatureNet() = default;
  explicit FeatureNet(std::vector<DenseLayer<Scalar>> layers,
                      Activation hidden_activation = Activation::ReLU)
      : layers_(std::move(layers)), hidden_activation_(hidden_activation) {
    check_shapes();
  }

  /// PyTorch-style initialization: U(-1/sqrt(fan_in), 1/sqrt(fan_in)) for
  /// weights and biases.
  template <typename Rng>
  static FeatureNet init(const std::vector<int>& dims, Rng& rng,
                         Activation hidden_activation = Activation::ReLU) {
    if (dims.size() < 2) throw InvalidArgument("mlp_dims needs at least input and output widths");
    std::vector<DenseLayer<Scalar>> layers;
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
      if (dims[i] < 1 || dims[i + 1] < 1) throw InvalidArgument("mlp_dims entries must be >= 1");
      const Scalar bound = Scalar(1) / std::sqrt(static_cast<Scalar>(dims[i]));
      std::uniform_real_distribution<double> u(-static_cast<double>(bound), static_cast<double>(bound));
      DenseLayer<Scalar> layer{Matrix<Scalar>(dims[i + 1], dims[i]), Vector<Scalar>(dims[i + 1])};
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c)
        for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) layer.weight(r, c) = Scalar(u(rng));
      for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = Scalar(u(rng));
      layers.push_back(std::move(layer));
    }
    return FeatureNet(std::move(layers), hidden_activation);
  }

  [[nodiscard]] Eigen::Index input_dim() const { return layers_.front().in_dim(); }
  [[nodiscard]] Eigen::Index output_dim() const { return layers_.back().out_dim(); }
  [[nodiscard]] bool empty() const { return layers_.empty(); }
  [[nodiscard]] Activation hidden_activation() const { return hidden_activation_; }

  [[nodiscard]] const std::vector<DenseLayer<Scalar>>& layers() const { return layers_; }
  std::vector<DenseLayer<Scalar>>& layers() { return layers_; }

  template <typename Derived>
  Matrix<Scalar> forward(const Eigen::MatrixBase<Derived>& x) const {
    check_input(x.rows());
    Matrix<Scalar> h = x;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      Matrix<Scalar> z = (layers_[i].weight * h).colwise() + layers_[i].bias;
      h = is_hidden(i) ? activate(z) : std::move(z);
    }
    return h;
  }

  template <typename Derived>
  ForwardCache<Scalar> forward_cached(const Eigen::MatrixBase<Derived>& x) const {
    check_input(x.rows());
    ForwardCache<Scalar> cache;
    Matrix<Scalar> h = x;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      cache.inputs.push_back(h);
      Matrix<Scalar> z = (layers_[i].weight * h).colwise() + layers_[i].bias;
      h = is_hidden(i) ? activate(z) : z;
      cache.pre.push_back(std::move(z));
    }
    cache.output = std::move(h);
    return cache;
  }

  /// Backpropagates dL/d(output) through the cached pass. Writes parameter
  /// gradients into `grads` (resized as needed) and returns dL/d(input).
  Matrix<Scalar> backward(const ForwardCache<Scalar>& cache, const Matrix<Scalar>& grad_out,
                          std::vector<DenseLayer<Scalar>>& grads) const {
    if (grads.size() != layers_.size()) {
      grads.clear();
      for (const auto& l : layers_) grads.push_back(DenseLayer<Scalar>::zeros_like(l));
    }
    Matrix<Scalar> delta = grad_out;
    for (std::size_t k = layers_.size(); k-- > 0;) {
      if (is_hidden(k)) delta = delta.cwiseProduct(activation_derivative(cache.pre[k]));
      grads[k].weight.noalias() = delta * cache.inputs[k].transpose();
      grads[k].bias = delta.rowwise().sum();
      delta = layers_[k].weight.transpose() * delta;
    }
    return delta;
  }

private:
  [[nodiscard]] bool is_hidden(std::size_t i) const { return i + 1 < layers_.size(); }

  Matrix<Scalar> activate(const Matrix<Scalar>& z) const {
    if (hidden_activation_ == Activation::Identity) return z;
    return z.cwiseMax(Scalar(0));
  }

  Matrix<Scalar> activation_derivative(const Matrix<Scalar>& z) const {
    if (hidden_activation_ == Activation::Identity) return Matrix<Scalar>::Ones(z.rows(), z.cols());
    return (z.array() > Scalar(0)).template cast<Scalar>().matrix();
  }

  void check_input(Eigen::Index rows) const {
    if (layers_.empty()) throw InvalidArgument("feature net has no layers");
    if (rows != input_dim())
      throw InvalidArgument("feature net expects input dim " + std::to_string(input_dim()) +
                            ", got " + std::to_string(rows));
  }

  void check_shapes() const {
    if (layers_.empty()) throw InvalidArgument("feature net has no layers");
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      const auto& l = layers_[i];
      if (l.bias.size() != l.weight.rows()) throw InvalidArgument("layer bias/weight mismatch");
      if (i > 0 && l.in_dim() != layers_[i - 1].out_dim())
        throw InvalidArgument("layer shapes do not chain at layer " + std::to_string(i));
      if (!l.weight.allFinite() || !l.bias.allFinite())
        throw InvalidArgument("non-finite layer parameters");
    }
  }

  std::vector<DenseLayer<Scalar>> layers_;
  Activation hidden_activation_ = Activation::ReLU;
};

/// Adam over a list of dense layers.
template <typename Scalar>
class Adam {
public:
  explicit Adam(Scalar lr, Scalar beta1 = Scalar(0.9), Scalar beta2 = Scalar(0.999),
                Scalar eps = Scalar(1e-8))
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(std::vector<DenseLayer<Scalar>>& params, const std::vector<DenseLayer<Scalar>>& grads) {
    if (m_.empty()) {
      for (const auto& p : params) {
        m_.push_back(DenseLayer<Scalar>::zeros_like(p));
        v_.push_back(DenseLayer<Scalar>::zeros_like(p));
      }
    }
    ++t_;
    const Scalar c1 = Scalar(1) - std::pow(beta1_, static_cast<Scalar>(t_));
    const Scalar c2 = Scalar(1) - std::pow(beta2_, static_cast<Scalar>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
      update(params[i].weight, grads[i].weight, m_[i].weight, v_[i].weight, c1, c2);
      update(params[i].bias, grads[i].bias, m_[i].bias, v_[i].bias, c1, c2);
    }
  }

private:
  template <typename M>
  void update(M& p, const M& g, M& m, M& v, Scalar c1, Scalar c2) {
    m = beta1_ * m + (Scalar(1) - beta1_) * g;
    v = beta2_ * v + (Scalar(1) - beta2_) * g.cwiseProduct(g);
    p.array() -= lr_ * (m.array() / c1) / ((v.array() / c2).sqrt() + eps_);
  }

  Scalar lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<DenseLayer<Scalar>> m_, v_;
};

}  // namespace latentbo

#endif  // LATENTBO_MLP_HPP
