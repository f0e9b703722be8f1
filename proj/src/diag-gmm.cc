// src/diag-gmm.cc

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

#include "lyralign/diag-gmm.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace lyralign {

double LogSumExp(std::span<const double> v) {
  double m = kLogZero;
  for (double x : v) m = std::max(m, x);
  if (m == kLogZero) return kLogZero;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

DiagGmm::DiagGmm(std::vector<double> mean, std::vector<double> var) {
  AddComponent(1.0, std::move(mean), std::move(var));
}

void DiagGmm::AddComponent(double weight, std::vector<double> mean,
                           std::vector<double> var) {
  if (means_.empty()) dim_ = static_cast<int32>(mean.size());
  if (static_cast<int32>(mean.size()) != dim_ || var.size() != mean.size())
    Fail(ErrorCode::kDimensionMismatch, "GMM component dimension mismatch");
  for (double &v : var) v = std::max(v, kVarianceFloor);
  weights_.push_back(weight);
  means_.push_back(std::move(mean));
  vars_.push_back(std::move(var));
  ComputeGconsts();
}

void DiagGmm::ComputeGconsts() {
  gconsts_.resize(weights_.size());
  for (size_t k = 0; k < weights_.size(); ++k) {
    double g = std::log(weights_[k]);
    for (double v : vars_[k]) g -= 0.5 * std::log(2.0 * std::numbers::pi * v);
    gconsts_[k] = g;
  }
}

void DiagGmm::ComponentLogLikelihoods(std::span<const float> x,
                                      std::vector<double> *out) const {
  if (static_cast<int32>(x.size()) != dim_)
    Fail(ErrorCode::kDimensionMismatch, "feature dim " + std::to_string(x.size()) +
                                            " vs GMM dim " + std::to_string(dim_));
  out->resize(weights_.size());
  for (size_t k = 0; k < weights_.size(); ++k) {
    const double *mu = means_[k].data(), *var = vars_[k].data();
    double q = 0.0;
    for (int32 d = 0; d < dim_; ++d) {
      double diff = x[d] - mu[d];
      q += diff * diff / var[d];
    }
    (*out)[k] = gconsts_[k] - 0.5 * q;
  }
}

double DiagGmm::LogLikelihood(std::span<const float> x) const {
  thread_local std::vector<double> buf;
  ComponentLogLikelihoods(x, &buf);
  return std::max(LogSumExp(buf), kEmissionLogFloor);
}

double DiagGmm::ComponentPosteriors(std::span<const float> x,
                                    std::vector<double> *post) const {
  ComponentLogLikelihoods(x, post);
  double total = LogSumExp(*post);
  if (total == kLogZero) {
    std::fill(post->begin(), post->end(), 1.0 / post->size());
    return kEmissionLogFloor;
  }
  for (double &p : *post) p = std::exp(p - total);
  return std::max(total, kEmissionLogFloor);
}

double DiagGmm::TotalLogLikelihood(const std::vector<std::span<const float>> &frames) const {
  double total = 0.0;
  for (const auto &x : frames) total += LogLikelihood(x);
  return total;
}

bool DiagGmm::EmUpdate(const std::vector<std::span<const float>> &frames) {
  if (frames.empty()) return false;
  const size_t K = weights_.size();
  std::vector<double> occ(K, 0.0), post;
  std::vector<std::vector<double>> sum(K, std::vector<double>(dim_, 0.0)),
      sumsq(K, std::vector<double>(dim_, 0.0));
  for (const auto &x : frames) {
    ComponentPosteriors(x, &post);
    for (size_t k = 0; k < K; ++k) {
      if (post[k] == 0.0) continue;
      occ[k] += post[k];
      for (int32 d = 0; d < dim_; ++d) {
        sum[k][d] += post[k] * x[d];
        sumsq[k][d] += post[k] * x[d] * x[d];
      }
    }
  }
  std::vector<double> w;
  std::vector<std::vector<double>> mu, var;
  for (size_t k = 0; k < K; ++k) {
    if (occ[k] < 1e-10) continue;
    std::vector<double> m(dim_), v(dim_);
    for (int32 d = 0; d < dim_; ++d) {
      m[d] = sum[k][d] / occ[k];
      v[d] = std::max(sumsq[k][d] / occ[k] - m[d] * m[d], kVarianceFloor);
    }
    w.push_back(occ[k] / frames.size());
    mu.push_back(std::move(m));
    var.push_back(std::move(v));
  }
  double wsum = 0.0;
  for (double x : w) wsum += x;
  for (double &x : w) x /= wsum;
  weights_ = std::move(w);
  means_ = std::move(mu);
  vars_ = std::move(var);
  ComputeGconsts();
  return true;
}

bool DiagGmm::MixUp(const std::vector<std::span<const float>> &frames, int32 refine_iters) {
  if (frames.empty() || weights_.empty()) return false;
  const int32 k = static_cast<int32>(
      std::max_element(weights_.begin(), weights_.end()) - weights_.begin());
  const int32 d = static_cast<int32>(
      std::max_element(vars_[k].begin(), vars_[k].end()) - vars_[k].begin());
  const double before = TotalLogLikelihood(frames);
  DiagGmm saved = *this;

  const double offset = 0.2 * std::sqrt(vars_[k][d]);
  std::vector<double> mean2 = means_[k], var2 = vars_[k];
  means_[k][d] -= offset;
  mean2[d] += offset;
  weights_[k] *= 0.5;
  weights_.push_back(weights_[k]);
  means_.push_back(std::move(mean2));
  vars_.push_back(std::move(var2));
  ComputeGconsts();
  for (int32 i = 0; i < refine_iters; ++i) EmUpdate(frames);
  if (NumComponents() > saved.NumComponents() && TotalLogLikelihood(frames) >= before)
    return true;
  *this = std::move(saved);
  return false;
}

bool DiagGmm::IsValid() const {
  if (weights_.empty()) return false;
  double s = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) return false;
    s += w;
  }
  if (std::abs(s - 1.0) > 1e-9) return false;
  for (const auto &v : vars_)
    for (double x : v)
      if (!(x >= kVarianceFloor)) return false;
  return true;
}

bool DiagGmm::operator==(const DiagGmm &other) const {
  return dim_ == other.dim_ && weights_ == other.weights_ && means_ == other.means_ &&
         vars_ == other.vars_;
}

}  // namespace lyralign
