// include/lyralign/gmm-train.h

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

#ifndef LYRALIGN_GMM_TRAIN_H_
#define LYRALIGN_GMM_TRAIN_H_

#include <span>
#include <utility>
#include <vector>

#include "lyralign/acoustic-model.h"
#include "lyralign/align-graph.h"

namespace lyralign {

/// State index for each of `num_frames` frames when splitting them evenly
/// over `num_states` states: state j gets [j*T/S, (j+1)*T/S).
std::vector<int32> UniformSegmentation(int32 num_frames, int32 num_states);

/// Seeds every Gaussian with the global mean and variance, then re-estimates
/// each pdf that receives frames from a uniform segmentation of the
/// first-pronunciation state sequence.  Transitions are uniform.  SPN and
/// MUS copy SIL when they receive no frames.  Throws kOutOfVocabulary and
/// kTooShort (fewer frames than states).
AcousticModel FlatStart(const std::vector<FeatureMatrix> &feats,
                        const std::vector<std::vector<LyricsLine>> &transcripts,
                        const Lexicon &lex, const HmmTopology &topo = {});

struct EmOptions {
  int32 iterations = 10;
  /// Iterations (1-based) after whose update every pdf gains one component.
  std::vector<int32> mixup_iterations = {2, 4, 6};
  int32 max_gaussians = 4;
  GraphOptions graph{.sil = true, .mus = false, .oov_as_spn = false};
  int32 workers = 1;
};

struct EmReport {
  /// Total Viterbi log-likelihood of the data: entry i is under the model
  /// after i updates.  Empty when iterations == 0.
  std::vector<double> log_likelihood;
  /// Per iteration, pdfs used by some graph but given no frames; they keep
  /// their previous parameters.
  std::vector<std::vector<int32>> empty_pdfs;
  /// Frames per pdf under the final model.
  std::vector<int64> occupancy;
};

/// Viterbi-EM: hard state alignment, then one EM step of each state's GMM
/// on its frames and ML transition estimates.  Utterances may be aligned in
/// parallel; accumulation is always in input order.
EmReport EmTrain(AcousticModel *model, const std::vector<FeatureMatrix> &feats,
                 const std::vector<std::vector<LyricsLine>> &transcripts,
                 const Lexicon &lex, const EmOptions &opts);

struct StateAlignment {
  std::vector<int32> pdfs;   // per frame
  std::vector<int32> nodes;  // per frame, into `graph`
  double log_likelihood = kLogZero;
};

/// GMM forced alignment.  `word_spans`, if non-empty, restricts each word
/// to a frame interval.
StateAlignment AlignWithGmm(const AcousticModel &model, const AlignGraph &graph,
                            const FeatureMatrix &feats,
                            const std::vector<std::pair<int32, int32>> &word_spans = {});

/// MAP update of every Gaussian mean: mu' = (tau mu + sum g x) / (tau + sum g),
/// with g the component posterior of each frame aligned to the pdf.
/// Weights and variances are unchanged.  Throws kInvalidArgument for tau <= 0.
AcousticModel MapAdaptGmm(const AcousticModel &model, const std::vector<FeatureMatrix> &feats,
                          const std::vector<std::vector<int32>> &pdf_alignments,
                          double tau = 10.0);

/// Fits every MUS state to `frames` (non-vocal frames), growing up to
/// `max_gaussians` components, and copies SIL transitions.  With no frames
/// MUS becomes a copy of SIL.
void TrainMusFiller(AcousticModel *model, const std::vector<std::span<const float>> &frames,
                    int32 max_gaussians);

}  // namespace lyralign

#endif  // LYRALIGN_GMM_TRAIN_H_
