// src/gmm-train.cc

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

#include "lyralign/gmm-train.h"

#include <algorithm>
#include <set>

#include "lyralign/parallel.h"

namespace lyralign {

namespace {

typedef std::vector<std::span<const float>> FrameRefs;

DiagGmm GlobalGaussian(const std::vector<FeatureMatrix> &feats, int32 dim) {
  std::vector<double> sum(dim, 0.0), sq(dim, 0.0);
  double n = 0.0;
  for (const FeatureMatrix &f : feats)
    for (int32 t = 0; t < f.NumFrames(); ++t, n += 1.0)
      for (int32 d = 0; d < dim; ++d) {
        sum[d] += f(t, d);
        sq[d] += static_cast<double>(f(t, d)) * f(t, d);
      }
  if (n == 0.0) Fail(ErrorCode::kEmptyInput, "no training frames");
  std::vector<double> mean(dim), var(dim);
  for (int32 d = 0; d < dim; ++d) {
    mean[d] = sum[d] / n;
    var[d] = sq[d] / n - mean[d] * mean[d];
  }
  return DiagGmm(mean, var);
}

void CheckCorpus(const std::vector<FeatureMatrix> &feats,
                 const std::vector<std::vector<LyricsLine>> &transcripts) {
  if (feats.empty()) Fail(ErrorCode::kEmptyInput, "no training utterances");
  if (feats.size() != transcripts.size())
    Fail(ErrorCode::kDimensionMismatch, "features and transcripts differ in count");
  for (const FeatureMatrix &f : feats)
    if (f.LayoutString() != feats[0].LayoutString())
      Fail(ErrorCode::kDimensionMismatch, "utterances have different feature layouts");
}

void CopyFillerIfUnseen(AcousticModel *model, const std::vector<int64> &occupancy,
                        std::string_view phone) {
  const auto &pdfs = model->PhonePdfs(model->PhoneIndex(phone));
  bool seen = std::any_of(pdfs.begin(), pdfs.end(), [&](int32 p) { return occupancy[p] > 0; });
  if (!seen) model->CopyPhone(kSilPhone, phone);
}

}  // namespace

std::vector<int32> UniformSegmentation(int32 num_frames, int32 num_states) {
  if (num_states < 1 || num_frames < num_states)
    Fail(ErrorCode::kTooShort, std::to_string(num_frames) + " frames cannot cover " +
                                   std::to_string(num_states) + " states");
  std::vector<int32> seg(num_frames);
  for (int32 j = 0; j < num_states; ++j) {
    int64 begin = static_cast<int64>(j) * num_frames / num_states;
    int64 end = static_cast<int64>(j + 1) * num_frames / num_states;
    for (int64 t = begin; t < end; ++t) seg[t] = j;
  }
  return seg;
}

AcousticModel FlatStart(const std::vector<FeatureMatrix> &feats,
                        const std::vector<std::vector<LyricsLine>> &transcripts,
                        const Lexicon &lex, const HmmTopology &topo) {
  CheckCorpus(feats, transcripts);
  const int32 dim = feats[0].Dim();
  AcousticModel model(lex.Phones(), dim, feats[0].LayoutString(), topo);
  const DiagGmm global = GlobalGaussian(feats, dim);
  for (int32 p = 0; p < model.NumPdfs(); ++p) model.MutableGmm(p) = global;

  std::vector<FrameRefs> frames(model.NumPdfs());
  for (size_t u = 0; u < feats.size(); ++u) {
    std::vector<int32> states;
    for (const LyricsLine &line : transcripts[u])
      for (const std::string &w : line.words) {
        if (!lex.Contains(w))
          Fail(ErrorCode::kOutOfVocabulary, "word not in lexicon: " + w);
        for (const std::string &ph : lex.Pronunciations(w).front()) {
          const auto &pdfs = model.PhonePdfs(model.PhoneIndex(ph));
          states.insert(states.end(), pdfs.begin(), pdfs.end());
        }
      }
    if (states.empty()) Fail(ErrorCode::kEmptyInput, "empty transcript");
    std::vector<int32> seg = UniformSegmentation(feats[u].NumFrames(),
                                                 static_cast<int32>(states.size()));
    for (int32 t = 0; t < feats[u].NumFrames(); ++t)
      frames[states[seg[t]]].push_back(feats[u].Row(t));
  }
  std::vector<int64> occupancy(model.NumPdfs());
  for (int32 p = 0; p < model.NumPdfs(); ++p) {
    occupancy[p] = static_cast<int64>(frames[p].size());
    model.MutableGmm(p).EmUpdate(frames[p]);
  }
  CopyFillerIfUnseen(&model, occupancy, kSpnPhone);
  CopyFillerIfUnseen(&model, occupancy, kMusPhone);
  return model;
}

StateAlignment AlignWithGmm(const AcousticModel &model, const AlignGraph &graph,
                            const FeatureMatrix &feats,
                            const std::vector<std::pair<int32, int32>> &word_spans) {
  EmissionMatrix em = model.GmmEmissions(feats, graph.Pdfs());
  ViterbiOptions vo;
  vo.word_spans = word_spans;
  ViterbiResult r = Viterbi(graph.graph, em, vo);
  StateAlignment a;
  a.nodes = std::move(r.path);
  a.log_likelihood = r.score;
  a.pdfs.reserve(a.nodes.size());
  for (int32 n : a.nodes) a.pdfs.push_back(graph.graph.nodes[n].pdf);
  return a;
}

EmReport EmTrain(AcousticModel *model, const std::vector<FeatureMatrix> &feats,
                 const std::vector<std::vector<LyricsLine>> &transcripts,
                 const Lexicon &lex, const EmOptions &opts) {
  EmReport report;
  if (opts.iterations <= 0) return report;
  CheckCorpus(feats, transcripts);
  const int32 U = static_cast<int32>(feats.size());
  for (int32 it = 0; it <= opts.iterations; ++it) {
    std::vector<AlignGraph> graphs(U);
    std::vector<StateAlignment> ali(U);
    ParallelFor(U, opts.workers, [&](int32 u) {
      graphs[u] = BuildGraph(transcripts[u], lex, *model, opts.graph);
      ali[u] = AlignWithGmm(*model, graphs[u], feats[u]);
    });
    double total = 0.0;
    for (const StateAlignment &a : ali) total += a.log_likelihood;
    report.log_likelihood.push_back(total);

    std::vector<FrameRefs> frames(model->NumPdfs());
    std::vector<std::array<double, 3>> counts(model->NumPdfs(), {0.0, 0.0, 0.0});
    std::set<int32> used;
    for (int32 u = 0; u < U; ++u) {
      const StateGraph &g = graphs[u].graph;
      for (int32 p : graphs[u].Pdfs()) used.insert(p);
      const auto &path = ali[u].nodes;
      for (size_t t = 0; t < path.size(); ++t) {
        frames[g.nodes[path[t]].pdf].push_back(feats[u].Row(static_cast<int32>(t)));
        if (t > 0) {
          const auto &in = g.nodes[path[t]].in;
          auto arc = std::find_if(in.begin(), in.end(), [&](const StateGraph::Arc &a) {
            return a.from == path[t - 1];
          });
          counts[g.nodes[path[t - 1]].pdf][arc->kind] += 1.0;
        }
      }
      counts[g.nodes[path.back()].pdf][g.nodes[path.back()].final_kind] += 1.0;
    }
    if (it == opts.iterations) {
      report.occupancy.resize(model->NumPdfs());
      for (int32 p = 0; p < model->NumPdfs(); ++p)
        report.occupancy[p] = static_cast<int64>(frames[p].size());
      break;
    }

    const bool mixup = std::find(opts.mixup_iterations.begin(), opts.mixup_iterations.end(),
                                 it + 1) != opts.mixup_iterations.end();
    std::vector<int32> empty;
    for (int32 p = 0; p < model->NumPdfs(); ++p) {
      if (frames[p].empty()) {
        if (used.count(p)) empty.push_back(p);
        continue;
      }
      DiagGmm &gmm = model->MutableGmm(p);
      gmm.EmUpdate(frames[p]);
      if (mixup && gmm.NumComponents() < opts.max_gaussians) gmm.MixUp(frames[p]);
      model->SetTransitionsFromCounts(p, counts[p]);
    }
    report.empty_pdfs.push_back(std::move(empty));
  }
  return report;
}

AcousticModel MapAdaptGmm(const AcousticModel &model, const std::vector<FeatureMatrix> &feats,
                          const std::vector<std::vector<int32>> &pdf_alignments,
                          double tau) {
  if (!(tau > 0.0)) Fail(ErrorCode::kInvalidArgument, "MAP tau must be > 0");
  if (feats.size() != pdf_alignments.size())
    Fail(ErrorCode::kDimensionMismatch, "features and alignments differ in count");
  const int32 D = model.Dim();
  std::vector<std::vector<double>> occ(model.NumPdfs());
  std::vector<std::vector<std::vector<double>>> sum(model.NumPdfs());
  for (int32 p = 0; p < model.NumPdfs(); ++p) {
    const int32 K = model.Gmm(p).NumComponents();
    occ[p].assign(K, 0.0);
    sum[p].assign(K, std::vector<double>(D, 0.0));
  }
  std::vector<double> post;
  for (size_t u = 0; u < feats.size(); ++u) {
    model.CheckGmmInput(feats[u]);
    if (static_cast<int32>(pdf_alignments[u].size()) != feats[u].NumFrames())
      Fail(ErrorCode::kDimensionMismatch, "alignment length differs from frame count");
    for (int32 t = 0; t < feats[u].NumFrames(); ++t) {
      const int32 p = pdf_alignments[u][t];
      auto x = feats[u].Row(t);
      model.Gmm(p).ComponentPosteriors(x, &post);
      for (size_t k = 0; k < post.size(); ++k) {
        occ[p][k] += post[k];
        for (int32 d = 0; d < D; ++d) sum[p][k][d] += post[k] * x[d];
      }
    }
  }
  AcousticModel out = model;
  for (int32 p = 0; p < model.NumPdfs(); ++p) {
    DiagGmm &g = out.MutableGmm(p);
    for (int32 k = 0; k < g.NumComponents(); ++k) {
      if (occ[p][k] == 0.0) continue;
      std::vector<double> &mu = g.MutableMean(k);
      for (int32 d = 0; d < D; ++d)
        mu[d] = (tau * mu[d] + sum[p][k][d]) / (tau + occ[p][k]);
    }
    g.ComputeGconsts();
  }
  return out;
}

void TrainMusFiller(AcousticModel *model, const std::vector<std::span<const float>> &frames,
                    int32 max_gaussians) {
  if (frames.empty()) {
    model->CopyPhone(kSilPhone, kMusPhone);
    return;
  }
  const int32 D = model->Dim();
  DiagGmm g(std::vector<double>(D, 0.0), std::vector<double>(D, 1.0));
  g.EmUpdate(frames);
  while (g.NumComponents() < max_gaussians && g.MixUp(frames)) { }
  const auto &sil = model->PhonePdfs(model->PhoneIndex(kSilPhone));
  const auto &mus = model->PhonePdfs(model->PhoneIndex(kMusPhone));
  for (size_t s = 0; s < mus.size(); ++s) {
    model->MutableGmm(mus[s]) = g;
    model->SetTransitions(mus[s], {model->TransitionProb(sil[s], kArcSelf),
                                   model->TransitionProb(sil[s], kArcNext),
                                   model->TransitionProb(sil[s], kArcSkip)});
  }
}

}  // namespace lyralign
