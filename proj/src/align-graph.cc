// src/align-graph.cc

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

#include "lyralign/align-graph.h"

#include <algorithm>
#include <set>

namespace lyralign {

namespace {

struct Exit {
  int32 node;
  double log_prob;
  ArcKind kind;
};

// The set of ways to leave what has been built so far.
struct Frontier {
  bool start = false;
  std::vector<Exit> exits;
};

class GraphBuilder {
 public:
  GraphBuilder(const AcousticModel &model, StateGraph *g) : model_(model), g_(*g) { }

  void Enter(const Frontier &f, int32 node) {
    if (f.start) g_.nodes[node].start = true;
    for (const Exit &e : f.exits) g_.AddArc(e.node, node, e.log_prob, e.kind);
  }

  // Appends one phone HMM entered from `in`; returns its exits.
  Frontier Phone(const Frontier &in, std::string_view phone, int32 word) {
    const auto &pdfs = model_.PhonePdfs(model_.PhoneIndex(phone));
    const int32 n = static_cast<int32>(pdfs.size());
    std::vector<int32> nodes(n);
    for (int32 s = 0; s < n; ++s) nodes[s] = g_.AddNode(pdfs[s], word);
    Enter(in, nodes[0]);
    Frontier out;
    for (int32 s = 0; s < n; ++s) {
      const int32 pdf = pdfs[s];
      g_.AddArc(nodes[s], nodes[s], model_.TransitionLogProb(pdf, kArcSelf), kArcSelf);
      double next = model_.TransitionLogProb(pdf, kArcNext);
      if (s + 1 < n)
        g_.AddArc(nodes[s], nodes[s + 1], next, kArcNext);
      else
        out.exits.push_back({nodes[s], next, kArcNext});
      if (model_.ArcAllowed(pdf, kArcSkip)) {
        double skip = model_.TransitionLogProb(pdf, kArcSkip);
        if (s + 2 < n)
          g_.AddArc(nodes[s], nodes[s + 2], skip, kArcSkip);
        else
          out.exits.push_back({nodes[s], skip, kArcSkip});
      }
    }
    return out;
  }

  // MUS with a duration counter: node (c, s) is state s after c frames,
  // counts saturating at the minimum duration.  Exits only from saturated
  // nodes.
  Frontier Mus(const Frontier &in) {
    const auto &pdfs = model_.PhonePdfs(model_.PhoneIndex(kMusPhone));
    const int32 n = static_cast<int32>(pdfs.size());
    const int32 C = model_.Topology().mus_min_frames;
    std::vector<std::vector<int32>> id(C + 1, std::vector<int32>(n, -1));
    for (int32 c = 1; c <= C; ++c)
      for (int32 s = 0; s < n && s <= 2 * (c - 1); ++s) id[c][s] = g_.AddNode(pdfs[s]);
    Enter(in, id[1][0]);
    auto link = [&](int32 c, int32 s, int32 c2, int32 s2, ArcKind kind) {
      if (s2 < n && id[c2][s2] >= 0)
        g_.AddArc(id[c][s], id[c2][s2], model_.TransitionLogProb(pdfs[s], kind), kind);
    };
    Frontier out;
    for (int32 c = 1; c <= C; ++c)
      for (int32 s = 0; s < n; ++s) {
        if (id[c][s] < 0) continue;
        const int32 c2 = std::min(c + 1, C);
        link(c, s, c2, s, kArcSelf);
        link(c, s, c2, s + 1, kArcNext);
        if (model_.ArcAllowed(pdfs[s], kArcSkip)) link(c, s, c2, s + 2, kArcSkip);
        if (c == C) {
          if (s == n - 1)
            out.exits.push_back({id[c][s], model_.TransitionLogProb(pdfs[s], kArcNext),
                                 kArcNext});
          if (s == n - 2 && model_.ArcAllowed(pdfs[s], kArcSkip))
            out.exits.push_back({id[c][s], model_.TransitionLogProb(pdfs[s], kArcSkip),
                                 kArcSkip});
        }
      }
    return out;
  }

  // `in` plus the optional fillers.
  Frontier Junction(const Frontier &in, bool sil, bool mus) {
    Frontier out = in;
    if (sil) {
      Frontier f = Phone(in, kSilPhone, -1);
      out.exits.insert(out.exits.end(), f.exits.begin(), f.exits.end());
    }
    if (mus) {
      Frontier f = Mus(in);
      out.exits.insert(out.exits.end(), f.exits.begin(), f.exits.end());
    }
    return out;
  }

 private:
  const AcousticModel &model_;
  StateGraph &g_;
};

}  // namespace

std::vector<int32> AlignGraph::Pdfs() const {
  std::set<int32> s;
  for (const auto &n : graph.nodes) s.insert(n.pdf);
  return {s.begin(), s.end()};
}

AlignGraph BuildGraph(const std::vector<LyricsLine> &lines, const Lexicon &lex,
                      const AcousticModel &model, const GraphOptions &opts) {
  AlignGraph ag;
  for (size_t l = 0; l < lines.size(); ++l)
    for (const std::string &w : lines[l].words) {
      ag.words.push_back(w);
      ag.word_line.push_back(static_cast<int32>(l));
    }
  if (ag.words.empty()) Fail(ErrorCode::kEmptyInput, "empty lyrics");
  if (!opts.oov_as_spn) {
    std::vector<std::string> oov = OovReport(lex, lines);
    if (!oov.empty()) {
      std::string msg = "out-of-vocabulary words:";
      for (const std::string &w : oov) msg += " " + w;
      Fail(ErrorCode::kOutOfVocabulary, msg);
    }
  }

  GraphBuilder b(model, &ag.graph);
  Frontier f;
  f.start = true;
  f = b.Junction(f, opts.sil, opts.mus);
  for (size_t w = 0; w < ag.words.size(); ++w) {
    if (w > 0) {
      bool line_break = ag.word_line[w] != ag.word_line[w - 1];
      f = b.Junction(f, opts.sil, opts.mus && line_break);
    }
    std::vector<Pronunciation> prons;
    if (lex.Contains(ag.words[w]))
      prons = lex.Pronunciations(ag.words[w]);
    else
      prons.push_back({std::string(kSpnPhone)});
    Frontier word_out;
    for (const Pronunciation &p : prons) {
      Frontier branch = f;
      for (const std::string &ph : p) branch = b.Phone(branch, ph, static_cast<int32>(w));
      word_out.exits.insert(word_out.exits.end(), branch.exits.begin(), branch.exits.end());
    }
    f = word_out;
  }
  f = b.Junction(f, opts.sil, opts.mus);
  for (const Exit &e : f.exits) {
    auto &node = ag.graph.nodes[e.node];
    if (e.log_prob >= node.final_log_prob) {
      node.final_log_prob = e.log_prob;
      node.final_kind = e.kind;
    }
  }
  return ag;
}

}  // namespace lyralign
