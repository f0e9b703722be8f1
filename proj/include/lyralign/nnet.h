// include/lyralign/nnet.h

// Copyright 2026  lyralign authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef LYRALIGN_NNET_H_
#define LYRALIGN_NNET_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lyralign/base.h"
#include "lyralign/feature-matrix.h"
#include "lyralign/viterbi.h"

namespace lyralign {

struct MlpConfig {
  int32 hidden_dim = 256;
  int32 num_hidden = 2;
  int32 splice = 4;     // frames of context on each side
  int32 subsample = 3;  // decode every n-th frame
};

/// Feed-forward ReLU network over spliced, normalised frames with a
/// log-softmax output over all pdfs.  Division by the state priors turns
/// its posteriors into scaled likelihoods for decoding.
class Mlp {
 public:
  Mlp() = default;
  /// Weights drawn uniformly from +-1/sqrt(fan_in), biases zero.
  Mlp(int32 feat_dim, std::string layout, int32 num_outputs, const MlpConfig &config,
      uint64_t seed);

  int32 FeatDim() const { return static_cast<int32>(feat_mean.size()); }
  int32 InputDim() const { return FeatDim() * (2 * splice + 1); }
  int32 NumOutputs() const { return static_cast<int32>(biases.back().size()); }
  int32 NumLayers() const { return static_cast<int32>(weights.size()); }

  /// Columns are the spliced inputs for `frames` of `feats`.
  Eigen::MatrixXd SpliceFrames(const FeatureMatrix &feats,
                               const std::vector<int32> &frames) const;
  /// Log posteriors, one column per input column.
  Eigen::MatrixXd LogPosteriors(const Eigen::MatrixXd &input) const;
  /// log p(s|x) - log prior(s) on frames 0, subsample, 2*subsample, ...
  EmissionMatrix HybridEmissions(const FeatureMatrix &feats) const;
  /// Fraction of `frames` whose argmax posterior equals the label.
  double FrameAccuracy(const FeatureMatrix &feats, const std::vector<int32> &labels) const;

  /// Throws kDimensionMismatch unless `feats` matches the input layout.
  void CheckInput(const FeatureMatrix &feats) const;

  bool operator==(const Mlp &other) const;

  std::string layout;
  int32 splice = 4;
  int32 subsample = 3;
  Eigen::VectorXd feat_mean, feat_std;
  std::vector<Eigen::MatrixXd> weights;  // out x in
  std::vector<Eigen::VectorXd> biases;
  Eigen::VectorXd log_priors;
};

struct MlpTrainOptions {
  double lr = 0.003;
  int32 epochs = 5;
  int32 batch = 64;
  uint64_t seed = 1;
  /// Number of leading layers left untouched.
  int32 frozen_layers = 0;
  double prior_floor = 1e-5;
};

struct MlpTrainReport {
  std::vector<double> loss;      // mean cross-entropy per epoch
  std::vector<double> accuracy;  // training-frame accuracy per epoch
};

/// Sets the input normalisation from `feats`, re-estimates priors from
/// `labels`, then trains with Adam.  Epoch e visits the frames t with
/// t % subsample == e % subsample, in seeded shuffled order.
MlpTrainReport TrainMlp(Mlp *mlp, const std::vector<FeatureMatrix> &feats,
                        const std::vector<std::vector<int32>> &labels,
                        const MlpTrainOptions &opts);

struct AdaptConfig {
  double lr_multiplier = 1.0;
  int32 epochs = 1;
  std::string Name() const;  // "LR,epoch1", "0.5LR,epoch3"
};

/// Fine-tuning: keeps the normalisation, restarts Adam at
/// opts.lr * lr_multiplier for cfg.epochs and re-estimates the priors.
MlpTrainReport AdaptMlp(Mlp *mlp, const std::vector<FeatureMatrix> &feats,
                        const std::vector<std::vector<int32>> &labels,
                        const AdaptConfig &cfg, const MlpTrainOptions &opts);

/// Floored relative frequencies of `labels`, normalised to sum to one.
Eigen::VectorXd EstimateLogPriors(const std::vector<std::vector<int32>> &labels,
                                  int32 num_outputs, double floor);

}  // namespace lyralign

#endif  // LYRALIGN_NNET_H_
