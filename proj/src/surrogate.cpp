//
// Project latentbo - Copyright 2026 The latentbo Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "latentbo/surrogate.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace latentbo {

namespace {

MatrixXd gather_columns(const MatrixXd& m, const std::vector<Eigen::Index>& idx, std::size_t begin,
                        std::size_t end) {
  MatrixXd out(m.rows(), static_cast<Eigen::Index>(end - begin));
  for (std::size_t i = begin; i < end; ++i) out.col(static_cast<Eigen::Index>(i - begin)) = m.col(idx[i]);
  return out;
}

}  // namespace

double feature_stage_loss(const FeatureNet<double>& net, const DenseLayer<double>& head,
                          const MatrixXd& inputs, const VectorXd& targets_std) {
  const MatrixXd feats = net.forward(inputs);
  const MatrixXd pred = (head.weight * feats).colwise() + head.bias;
  return (pred.row(0).transpose() - targets_std).squaredNorm() / static_cast<double>(targets_std.size());
}

FeatureStageResult train_feature_stage(const MatrixXd& inputs, const VectorXd& targets,
                                       const FeatureStageOptions& opt) {
  const Eigen::Index n = inputs.cols();
  if (n < 2) throw InvalidArgument("feature stage needs at least 2 observations, got " + std::to_string(n));
  if (targets.size() != n) throw InvalidArgument("target count does not match inputs");
  if (opt.dims.size() < 2 || opt.dims.front() != inputs.rows())
    throw InvalidArgument("mlp_dims input width does not match pooled embedding width");
  if (opt.batch_size < 1) throw InvalidArgument("batch size must be >= 1");

  std::mt19937_64 rng(opt.seed);
  FeatureStageResult res;
  FeatureNet<double> net = FeatureNet<double>::init(opt.dims, rng);
  FeatureNet<double> head = FeatureNet<double>::init({opt.dims.back(), 1}, rng);
  const VectorXd ys = TargetTransform<double>::fit(targets).forward(targets);

  // Adam is per-coordinate, so separate optimizers for net and head are
  // equivalent to one over the joint parameters.
  Adam<double> net_adam(opt.lr);
  Adam<double> head_adam(opt.lr);

  FeatureNet<double> best_net = net;
  FeatureNet<double> best_head = head;
  double best_loss = feature_stage_loss(net, head.layers().front(), inputs, ys);
  res.loss_curve.push_back(best_loss);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::vector<DenseLayer<double>> net_grads, head_grads;
  const auto batch = static_cast<std::size_t>(opt.batch_size);
  for (int epoch = 0; epoch < opt.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t stop = std::min(order.size(), start + batch);
      const MatrixXd xb = gather_columns(inputs, order, start, stop);
      VectorXd yb(static_cast<Eigen::Index>(stop - start));
      for (std::size_t i = start; i < stop; ++i) yb(static_cast<Eigen::Index>(i - start)) = ys(order[i]);

      const auto net_cache = net.forward_cached(xb);
      const auto head_cache = head.forward_cached(net_cache.output);
      const double scale = 2.0 / static_cast<double>(yb.size());
      const MatrixXd grad_out = scale * (head_cache.output - yb.transpose());
      const MatrixXd grad_feat = head.backward(head_cache, grad_out, head_grads);
      net.backward(net_cache, grad_feat, net_grads);
      net_adam.step(net.layers(), net_grads);
      head_adam.step(head.layers(), head_grads);
    }
    const double loss = feature_stage_loss(net, head.layers().front(), inputs, ys);
    res.loss_curve.push_back(loss);
    if (loss < best_loss) {
      best_loss = loss;
      best_net = net;
      best_head = head;
    }
  }
  res.net = std::move(best_net);
  res.head = best_head.layers().front();
  return res;
}

MatrixXd SurrogateModel::pooled(const std::vector<const MatrixXd*>& seqs) const {
  const Eigen::Index width = net.input_dim();
  MatrixXd out(width, static_cast<Eigen::Index>(seqs.size()));
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    const VectorXd p = pool(*seqs[i], l_max, pooling);
    if (p.size() != width)
      throw InvalidArgument("pooled embedding width " + std::to_string(p.size()) +
                            " does not match feature net input " + std::to_string(width));
    out.col(static_cast<Eigen::Index>(i)) = p;
  }
  return out;
}

MatrixXd SurrogateModel::features(const std::vector<const MatrixXd*>& seqs) const {
  return net.forward(pooled(seqs)).transpose();
}

SurrogateModel train_surrogate(const ObservedDataset& ds, const SurrogateOptions& opt) {
  if (ds.size() < 2) throw InvalidArgument("surrogate training needs at least 2 observations");
  SurrogateModel model;
  model.l_max = opt.l_max;
  model.pooling = opt.pooling;

  std::vector<const MatrixXd*> seqs;
  VectorXd y(static_cast<Eigen::Index>(ds.size()));
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (!ds[i].embedding) throw InvalidArgument("record without embedding: " + ds[i].text);
    seqs.push_back(&ds[i].embedding->vectors);
    y(static_cast<Eigen::Index>(i)) = ds[i].score;
  }
  MatrixXd inputs(opt.feature.dims.front(), static_cast<Eigen::Index>(seqs.size()));
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    const VectorXd p = pool(*seqs[i], opt.l_max, opt.pooling);
    if (p.size() != inputs.rows())
      throw InvalidArgument("pooled embedding width " + std::to_string(p.size()) +
                            " does not match mlp input width " + std::to_string(inputs.rows()));
    inputs.col(static_cast<Eigen::Index>(i)) = p;
  }

  auto stage1 = train_feature_stage(inputs, y, opt.feature);
  model.net = std::move(stage1.net);
  model.feature_loss_curve = std::move(stage1.loss_curve);

  const MatrixXd x = model.net.forward(inputs).transpose();
  auto stage2 = train_gp(x, y, opt.gp);
  model.gp = std::move(stage2.state);
  model.gp_nll_curve = std::move(stage2.nll_curve);
  return model;
}

std::vector<PredictiveDistribution> gp_predict_batch(const SurrogateModel& model,
                                                     const std::vector<const MatrixXd*>& seqs) {
  if (!model.trained()) throw InvalidArgument("surrogate model has not been trained");
  std::vector<PredictiveDistribution> out;
  if (seqs.empty()) return out;
  VectorXd mean, var;
  gp_posterior(model.gp, model.features(seqs), mean, var);
  out.reserve(seqs.size());
  for (Eigen::Index i = 0; i < mean.size(); ++i) out.push_back({mean(i), std::sqrt(var(i))});
  return out;
}

PredictiveDistribution gp_predict(const SurrogateModel& model, const MatrixXd& tokens) {
  return gp_predict_batch(model, {&tokens}).front();
}

}  // namespace latentbo
