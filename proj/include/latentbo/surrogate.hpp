//
// Project latentbo - Copyright 2026 The latentbo Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LATENTBO_SURROGATE_HPP
#define LATENTBO_SURROGATE_HPP

#include <cstdint>
#include <vector>

#include "latentbo/aggregation.hpp"
#include "latentbo/gp.hpp"
#include "latentbo/mlp.hpp"
#include "latentbo/types.hpp"

namespace latentbo {

struct FeatureStageOptions {
  std::vector<int> dims;  // input 2d ... output d'
  double lr = 1e-3;
  int epochs = 100;
  int batch_size = 16;
  std::uint64_t seed = 0;
};

struct FeatureStageResult {
  FeatureNet<double> net;
  DenseLayer<double> head;         // d' -> 1, dropped after training
  std::vector<double> loss_curve;  // full-data MSE, entry 0 before training
};

/// Stage one: fits head(net(x)) to standardized targets by minibatch Adam
/// on mean squared error. `inputs` holds one pooled embedding per column.
/// Returns the weights from the epoch with the lowest full-data MSE.
FeatureStageResult train_feature_stage(const MatrixXd& inputs, const VectorXd& targets,
                                       const FeatureStageOptions& opt);

/// Full-data MSE of head(net(x)) against standardized targets.
double feature_stage_loss(const FeatureNet<double>& net, const DenseLayer<double>& head,
                          const MatrixXd& inputs, const VectorXd& targets_std);

struct SurrogateOptions {
  FeatureStageOptions feature;
  GpTrainOptions<double> gp;
  Eigen::Index l_max = 80;
  Pooling pooling = Pooling::PositionAware;
};

/// Frozen feature map plus a GP over its outputs.
struct SurrogateModel {
  FeatureNet<double> net;
  GPState<double> gp;
  Eigen::Index l_max = 0;
  Pooling pooling = Pooling::PositionAware;
  std::vector<double> feature_loss_curve;
  std::vector<double> gp_nll_curve;

  [[nodiscard]] bool trained() const { return !net.empty() && gp.trained(); }

  /// Pooled embedding -> feature vector, one column per token matrix.
  [[nodiscard]] MatrixXd pooled(const std::vector<const MatrixXd*>& seqs) const;

  /// Feature rows (N x d') for a batch of token matrices.
  [[nodiscard]] MatrixXd features(const std::vector<const MatrixXd*>& seqs) const;
};

/// Trains both stages from scratch on every record of `ds`; every record
/// must carry an embedding.
SurrogateModel train_surrogate(const ObservedDataset& ds, const SurrogateOptions& opt);

PredictiveDistribution gp_predict(const SurrogateModel& model, const MatrixXd& tokens);

/// Batched prediction; one back-substitution for the whole batch.
std::vector<PredictiveDistribution> gp_predict_batch(const SurrogateModel& model,
                                                     const std::vector<const MatrixXd*>& seqs);

}  // namespace latentbo

#endif  // LATENTBO_SURROGATE_HPP
