// include/lyralign/diag-gmm.h

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

#ifndef LYRALIGN_DIAG_GMM_H_
#define LYRALIGN_DIAG_GMM_H_

#include <span>
#include <vector>

#include "lyralign/base.h"

namespace lyralign {

constexpr double kVarianceFloor = 1e-4;
constexpr double kEmissionLogFloor = -1e10;

/// Diagonal-covariance Gaussian mixture.  Components are stored as plain
/// vectors so the text model format can round-trip them exactly.
class DiagGmm {
 public:
  DiagGmm() = default;
  /// Single component with the given mean and variance (floored).
  DiagGmm(std::vector<double> mean, std::vector<double> var);

  int32 NumComponents() const { return static_cast<int32>(weights_.size()); }
  int32 Dim() const { return dim_; }

  const std::vector<double> &Weights() const { return weights_; }
  const std::vector<double> &Mean(int32 k) const { return means_[k]; }
  const std::vector<double> &Var(int32 k) const { return vars_[k]; }
  std::vector<double> &MutableMean(int32 k) { return means_[k]; }

  void AddComponent(double weight, std::vector<double> mean, std::vector<double> var);
  /// Recomputes cached normalisers; call after mutating means directly.
  void ComputeGconsts();

  /// log sum_k w_k N(x; mu_k, var_k), floored at kEmissionLogFloor.
  double LogLikelihood(std::span<const float> x) const;
  /// Per-component log(w_k N(x; ...)), written to `out`.
  void ComponentLogLikelihoods(std::span<const float> x, std::vector<double> *out) const;
  /// As above then normalised to posteriors; returns the total log-likelihood.
  double ComponentPosteriors(std::span<const float> x, std::vector<double> *post) const;

  /// One EM step on `frames`.  Components with no posterior mass are dropped.
  /// Returns false (leaving the GMM unchanged) if `frames` is empty.
  bool EmUpdate(const std::vector<std::span<const float>> &frames);
  /// Splits the heaviest component along its highest-variance dimension,
  /// refines on `frames`, and keeps the split only if the total
  /// log-likelihood of `frames` does not drop.  Returns whether it was kept.
  bool MixUp(const std::vector<std::span<const float>> &frames, int32 refine_iters = 4);

  double TotalLogLikelihood(const std::vector<std::span<const float>> &frames) const;

  /// Weights on the simplex within 1e-9 and every variance >= the floor.
  bool IsValid() const;
  bool operator==(const DiagGmm &other) const;

 private:
  int32 dim_ = 0;
  std::vector<double> weights_;
  std::vector<std::vector<double>> means_, vars_;
  std::vector<double> gconsts_;  // log w - 0.5 sum log(2 pi var)
};

double LogSumExp(std::span<const double> v);

}  // namespace lyralign

#endif  // LYRALIGN_DIAG_GMM_H_
