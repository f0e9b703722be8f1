// src/viterbi.cc

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

#include "lyralign/viterbi.h"

#include <algorithm>
#include <string>

namespace lyralign {

int32 StateGraph::AddNode(int32 pdf, int32 word) {
  Node n;
  n.pdf = pdf;
  n.word = word;
  nodes.push_back(std::move(n));
  return NumNodes() - 1;
}

void StateGraph::AddArc(int32 from, int32 to, double log_prob, ArcKind kind) {
  if (from < 0 || to >= NumNodes() || from > to)
    Fail(ErrorCode::kInvalidArgument, "bad arc " + std::to_string(from) + " -> " +
                                          std::to_string(to));
  auto &in = nodes[to].in;
  auto it = std::lower_bound(in.begin(), in.end(), from,
                             [](const Arc &a, int32 f) { return a.from < f; });
  if (it != in.end() && it->from == from) {
    it->log_prob = std::max(it->log_prob, log_prob);
    return;
  }
  in.insert(it, Arc{from, log_prob, kind});
}

void StateGraph::Check() const {
  for (int32 n = 0; n < NumNodes(); ++n)
    for (size_t i = 0; i < nodes[n].in.size(); ++i) {
      const Arc &a = nodes[n].in[i];
      if (a.from < 0 || a.from > n || (i > 0 && nodes[n].in[i - 1].from >= a.from))
        Fail(ErrorCode::kInvalidArgument, "graph arcs not in topological order");
    }
}

ViterbiResult Viterbi(const StateGraph &graph, const EmissionMatrix &em,
                      const ViterbiOptions &opts) {
  const int32 T = static_cast<int32>(em.rows()), N = graph.NumNodes();
  if (T == 0 || N == 0) Fail(ErrorCode::kNoAdmissiblePath, "empty utterance or graph");
  const bool masked = !opts.word_spans.empty();
  auto allowed = [&](int32 t, int32 n) {
    int32 w = graph.nodes[n].word;
    if (!masked || w < 0 || w >= static_cast<int32>(opts.word_spans.size())) return true;
    return t >= opts.word_spans[w].first && t < opts.word_spans[w].second;
  };

  std::vector<double> prev(N, kLogZero), cur(N, kLogZero);
  std::vector<int32> back(static_cast<size_t>(T) * N, -1);
  for (int32 n = 0; n < N; ++n)
    if (graph.nodes[n].start && allowed(0, n)) prev[n] = em(0, graph.nodes[n].pdf);

  auto prune = [&](std::vector<double> &row) {
    if (opts.beam <= 0.0) return;
    double best = *std::max_element(row.begin(), row.end());
    for (double &v : row)
      if (v < best - opts.beam) v = kLogZero;
  };
  prune(prev);

  for (int32 t = 1; t < T; ++t) {
    int32 *bp = back.data() + static_cast<size_t>(t) * N;
    for (int32 n = 0; n < N; ++n) {
      cur[n] = kLogZero;
      if (!allowed(t, n)) continue;
      double best = kLogZero;
      int32 arg = -1;
      for (const StateGraph::Arc &a : graph.nodes[n].in) {
        if (prev[a.from] == kLogZero) continue;
        double v = prev[a.from] + a.log_prob;
        if (v >= best) {
          best = v;
          arg = a.from;
        }
      }
      if (arg < 0) continue;
      cur[n] = best + em(t, graph.nodes[n].pdf);
      bp[n] = arg;
    }
    prune(cur);
    std::swap(prev, cur);
  }

  ViterbiResult r;
  int32 last = -1;
  for (int32 n = 0; n < N; ++n) {
    if (prev[n] == kLogZero || graph.nodes[n].final_log_prob == kLogZero) continue;
    double v = prev[n] + graph.nodes[n].final_log_prob;
    if (v >= r.score) {
      r.score = v;
      last = n;
    }
  }
  if (last < 0)
    Fail(ErrorCode::kNoAdmissiblePath,
         "no admissible path through " + std::to_string(N) + " states in " +
             std::to_string(T) + " frames");
  r.path.resize(T);
  r.path[T - 1] = last;
  for (int32 t = T - 1; t > 0; --t)
    r.path[t - 1] = back[static_cast<size_t>(t) * N + r.path[t]];
  return r;
}

double PathScore(const StateGraph &graph, const EmissionMatrix &em,
                 const std::vector<int32> &path) {
  if (path.empty() || static_cast<int64>(path.size()) != em.rows() ||
      !graph.nodes[path[0]].start)
    return kLogZero;
  double s = em(0, graph.nodes[path[0]].pdf);
  for (size_t t = 1; t < path.size(); ++t) {
    const auto &in = graph.nodes[path[t]].in;
    auto it = std::find_if(in.begin(), in.end(),
                           [&](const StateGraph::Arc &a) { return a.from == path[t - 1]; });
    if (it == in.end()) return kLogZero;
    s = s + it->log_prob;
    s = s + em(t, graph.nodes[path[t]].pdf);
  }
  return s + graph.nodes[path.back()].final_log_prob;
}

}  // namespace lyralign
