// src/nnet.cc

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

#include "lyralign/nnet.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <utility>

#include "lyralign/io-util.h"

namespace lyralign {

namespace {

struct Sample {
  int32 utt, frame;
};

void CheckLabels(const std::vector<FeatureMatrix> &feats,
                 const std::vector<std::vector<int32>> &labels, int32 num_outputs) {
  if (feats.size() != labels.size())
    Fail(ErrorCode::kDimensionMismatch, "features and alignments differ in count");
  for (size_t u = 0; u < feats.size(); ++u) {
    if (static_cast<int32>(labels[u].size()) != feats[u].NumFrames())
      Fail(ErrorCode::kDimensionMismatch, "alignment length differs from frame count");
    for (int32 l : labels[u])
      if (l < 0 || l >= num_outputs)
        Fail(ErrorCode::kInvalidArgument, "alignment label out of range");
  }
}

Eigen::MatrixXd LogSoftmaxColumns(Eigen::MatrixXd z) {
  for (Eigen::Index c = 0; c < z.cols(); ++c) {
    double m = z.col(c).maxCoeff();
    double lse = m + std::log((z.col(c).array() - m).exp().sum());
    z.col(c).array() -= lse;
  }
  return z;
}

class AdamState {
 public:
  explicit AdamState(const Mlp &mlp) {
    for (int32 l = 0; l < mlp.NumLayers(); ++l) {
      mw_.push_back(Eigen::MatrixXd::Zero(mlp.weights[l].rows(), mlp.weights[l].cols()));
      vw_.push_back(mw_.back());
      mb_.push_back(Eigen::VectorXd::Zero(mlp.biases[l].size()));
      vb_.push_back(mb_.back());
    }
  }
  void Step(Mlp *mlp, int32 l, const Eigen::MatrixXd &gw, const Eigen::VectorXd &gb,
            double lr, int64 t) {
    const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t));
    mw_[l] = b1 * mw_[l] + (1 - b1) * gw;
    vw_[l] = b2 * vw_[l] + (1 - b2) * gw.cwiseAbs2();
    mb_[l] = b1 * mb_[l] + (1 - b1) * gb;
    vb_[l] = b2 * vb_[l] + (1 - b2) * gb.cwiseAbs2();
    mlp->weights[l].array() -=
        lr * (mw_[l].array() / c1) / ((vw_[l].array() / c2).sqrt() + eps);
    mlp->biases[l].array() -=
        lr * (mb_[l].array() / c1) / ((vb_[l].array() / c2).sqrt() + eps);
  }

 private:
  std::vector<Eigen::MatrixXd> mw_, vw_;
  std::vector<Eigen::VectorXd> mb_, vb_;
};

MlpTrainReport RunEpochs(Mlp *mlp, const std::vector<FeatureMatrix> &feats,
                         const std::vector<std::vector<int32>> &labels, double lr,
                         int32 epochs, const MlpTrainOptions &opts) {
  MlpTrainReport report;
  if (epochs <= 0) return report;
  if (opts.batch < 1) Fail(ErrorCode::kInvalidArgument, "batch must be >= 1");
  std::mt19937_64 rng(opts.seed);
  AdamState adam(*mlp);
  int64 step = 0;
  const int32 L = mlp->NumLayers();
  for (int32 e = 0; e < epochs; ++e) {
    std::vector<Sample> samples;
    for (size_t u = 0; u < feats.size(); ++u)
      for (int32 t = e % mlp->subsample; t < feats[u].NumFrames(); t += mlp->subsample)
        samples.push_back({static_cast<int32>(u), t});
    std::shuffle(samples.begin(), samples.end(), rng);
    double loss = 0.0;
    int64 correct = 0;
    for (size_t begin = 0; begin < samples.size(); begin += opts.batch) {
      size_t end = std::min(samples.size(), begin + opts.batch);
      const int32 B = static_cast<int32>(end - begin);
      Eigen::MatrixXd x(mlp->InputDim(), B);
      std::vector<int32> y(B);
      for (int32 b = 0; b < B; ++b) {
        const Sample &s = samples[begin + b];
        x.col(b) = mlp->SpliceFrames(feats[s.utt], {s.frame});
        y[b] = labels[s.utt][s.frame];
      }
      // Forward, keeping activations.
      std::vector<Eigen::MatrixXd> act{x};
      for (int32 l = 0; l < L; ++l) {
        Eigen::MatrixXd z = (mlp->weights[l] * act.back()).colwise() + mlp->biases[l];
        if (l + 1 < L) z = z.cwiseMax(0.0);
        act.push_back(std::move(z));
      }
      Eigen::MatrixXd logp = LogSoftmaxColumns(act.back());
      Eigen::MatrixXd grad = logp.array().exp();
      for (int32 b = 0; b < B; ++b) {
        loss -= logp(y[b], b);
        Eigen::Index arg;
        logp.col(b).maxCoeff(&arg);
        correct += (arg == y[b]);
        grad(y[b], b) -= 1.0;
      }
      grad /= B;
      ++step;
      for (int32 l = L - 1; l >= 0; --l) {
        Eigen::MatrixXd gw = grad * act[l].transpose();
        Eigen::VectorXd gb = grad.rowwise().sum();
        if (l > 0) {
          grad = mlp->weights[l].transpose() * grad;
          grad.array() *= (act[l].array() > 0.0).cast<double>();
        }
        if (l >= opts.frozen_layers) adam.Step(mlp, l, gw, gb, lr, step);
      }
    }
    const double n = std::max<size_t>(1, samples.size());
    report.loss.push_back(loss / n);
    report.accuracy.push_back(correct / n);
  }
  return report;
}

}  // namespace

Mlp::Mlp(int32 feat_dim, std::string layout_in, int32 num_outputs,
         const MlpConfig &config, uint64_t seed)
    : layout(std::move(layout_in)), splice(config.splice), subsample(config.subsample) {
  if (feat_dim < 1 || num_outputs < 1 || config.num_hidden < 0 || config.hidden_dim < 1 ||
      config.splice < 0 || config.subsample < 1)
    Fail(ErrorCode::kInvalidArgument, "bad network configuration");
  feat_mean = Eigen::VectorXd::Zero(feat_dim);
  feat_std = Eigen::VectorXd::Ones(feat_dim);
  std::mt19937_64 rng(seed);
  int32 in = InputDim();
  for (int32 l = 0; l <= config.num_hidden; ++l) {
    int32 out = l == config.num_hidden ? num_outputs : config.hidden_dim;
    std::uniform_real_distribution<double> u(-1.0 / std::sqrt(in), 1.0 / std::sqrt(in));
    Eigen::MatrixXd w(out, in);
    for (Eigen::Index c = 0; c < w.cols(); ++c)
      for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = u(rng);
    weights.push_back(std::move(w));
    biases.push_back(Eigen::VectorXd::Zero(out));
    in = out;
  }
  log_priors = Eigen::VectorXd::Constant(num_outputs, -std::log(num_outputs));
}

void Mlp::CheckInput(const FeatureMatrix &feats) const {
  if (feats.Dim() != FeatDim() || feats.LayoutString() != layout)
    Fail(ErrorCode::kDimensionMismatch, "features " + feats.LayoutString() +
                                            " do not match network input " + layout);
}

Eigen::MatrixXd Mlp::SpliceFrames(const FeatureMatrix &feats,
                                  const std::vector<int32> &frames) const {
  const int32 D = FeatDim(), T = feats.NumFrames();
  Eigen::MatrixXd x(InputDim(), static_cast<Eigen::Index>(frames.size()));
  for (size_t c = 0; c < frames.size(); ++c)
    for (int32 o = -splice; o <= splice; ++o) {
      auto row = feats.Row(std::clamp(frames[c] + o, 0, T - 1));
      const int32 base = (o + splice) * D;
      for (int32 d = 0; d < D; ++d)
        x(base + d, c) = (row[d] - feat_mean[d]) / feat_std[d];
    }
  return x;
}

Eigen::MatrixXd Mlp::LogPosteriors(const Eigen::MatrixXd &input) const {
  Eigen::MatrixXd a = input;
  for (int32 l = 0; l < NumLayers(); ++l) {
    a = (weights[l] * a).colwise() + biases[l];
    if (l + 1 < NumLayers()) a = a.cwiseMax(0.0);
  }
  return LogSoftmaxColumns(std::move(a));
}

EmissionMatrix Mlp::HybridEmissions(const FeatureMatrix &feats) const {
  CheckInput(feats);
  std::vector<int32> frames;
  for (int32 t = 0; t < feats.NumFrames(); t += subsample) frames.push_back(t);
  EmissionMatrix em(frames.size(), NumOutputs());
  const size_t chunk = 512;
  for (size_t b = 0; b < frames.size(); b += chunk) {
    std::vector<int32> part(frames.begin() + b,
                            frames.begin() + std::min(frames.size(), b + chunk));
    Eigen::MatrixXd lp = LogPosteriors(SpliceFrames(feats, part));
    for (size_t i = 0; i < part.size(); ++i)
      for (int32 s = 0; s < NumOutputs(); ++s)
        em(b + i, s) = std::max(lp(s, i) - log_priors[s], -1e10);
  }
  return em;
}

double Mlp::FrameAccuracy(const FeatureMatrix &feats, const std::vector<int32> &labels) const {
  CheckInput(feats);
  std::vector<int32> frames(feats.NumFrames());
  std::iota(frames.begin(), frames.end(), 0);
  Eigen::MatrixXd lp = LogPosteriors(SpliceFrames(feats, frames));
  int64 correct = 0;
  for (int32 t = 0; t < feats.NumFrames(); ++t) {
    Eigen::Index arg;
    lp.col(t).maxCoeff(&arg);
    correct += (arg == labels[t]);
  }
  return feats.NumFrames() ? static_cast<double>(correct) / feats.NumFrames() : 0.0;
}

bool Mlp::operator==(const Mlp &o) const {
  if (layout != o.layout || splice != o.splice || subsample != o.subsample ||
      weights.size() != o.weights.size() || feat_mean.size() != o.feat_mean.size() ||
      log_priors.size() != o.log_priors.size())
    return false;
  if (feat_mean != o.feat_mean || feat_std != o.feat_std || log_priors != o.log_priors)
    return false;
  for (size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].rows() != o.weights[l].rows() || weights[l].cols() != o.weights[l].cols() ||
        biases[l].size() != o.biases[l].size())
      return false;
    if (weights[l] != o.weights[l] || biases[l] != o.biases[l]) return false;
  }
  return true;
}

Eigen::VectorXd EstimateLogPriors(const std::vector<std::vector<int32>> &labels,
                                  int32 num_outputs, double floor) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(num_outputs);
  double n = 0.0;
  for (const auto &seq : labels)
    for (int32 l : seq) {
      p[l] += 1.0;
      n += 1.0;
    }
  if (n == 0.0) Fail(ErrorCode::kEmptyInput, "no frames to estimate priors");
  p = (p / n).cwiseMax(floor);
  p /= p.sum();
  return p.array().log();
}

MlpTrainReport TrainMlp(Mlp *mlp, const std::vector<FeatureMatrix> &feats,
                        const std::vector<std::vector<int32>> &labels,
                        const MlpTrainOptions &opts) {
  CheckLabels(feats, labels, mlp->NumOutputs());
  if (feats.empty()) Fail(ErrorCode::kEmptyInput, "no training utterances");
  for (const FeatureMatrix &f : feats) mlp->CheckInput(f);
  const int32 D = mlp->FeatDim();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(D), sq = Eigen::VectorXd::Zero(D);
  double n = 0.0;
  for (const FeatureMatrix &f : feats)
    for (int32 t = 0; t < f.NumFrames(); ++t, n += 1.0)
      for (int32 d = 0; d < D; ++d) {
        sum[d] += f(t, d);
        sq[d] += static_cast<double>(f(t, d)) * f(t, d);
      }
  if (n == 0.0) Fail(ErrorCode::kEmptyInput, "no training frames");
  mlp->feat_mean = sum / n;
  mlp->feat_std = (sq / n - mlp->feat_mean.cwiseAbs2()).cwiseMax(1e-8).cwiseSqrt();
  mlp->log_priors = EstimateLogPriors(labels, mlp->NumOutputs(), opts.prior_floor);
  return RunEpochs(mlp, feats, labels, opts.lr, opts.epochs, opts);
}

std::string AdaptConfig::Name() const {
  std::string lr = lr_multiplier == 1.0 ? "LR" : FormatDouble(lr_multiplier, 6) + "LR";
  return lr + ",epoch" + std::to_string(epochs);
}

MlpTrainReport AdaptMlp(Mlp *mlp, const std::vector<FeatureMatrix> &feats,
                        const std::vector<std::vector<int32>> &labels,
                        const AdaptConfig &cfg, const MlpTrainOptions &opts) {
  if (!(cfg.lr_multiplier > 0.0) || cfg.epochs < 1)
    Fail(ErrorCode::kInvalidArgument, "adaptation needs lr_multiplier > 0 and epochs >= 1");
  if (feats.empty()) Fail(ErrorCode::kEmptyInput, "empty adaptation set");
  CheckLabels(feats, labels, mlp->NumOutputs());
  for (const FeatureMatrix &f : feats) mlp->CheckInput(f);
  mlp->log_priors = EstimateLogPriors(labels, mlp->NumOutputs(), opts.prior_floor);
  return RunEpochs(mlp, feats, labels, opts.lr * cfg.lr_multiplier, cfg.epochs, opts);
}

}  // namespace lyralign
