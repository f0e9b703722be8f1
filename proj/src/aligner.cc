// src/aligner.cc

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

#include "lyralign/aligner.h"

#include <algorithm>
#include <optional>

#include "lyralign/gmm-train.h"
#include "lyralign/io-util.h"
#include "lyralign/parallel.h"

namespace lyralign {

std::vector<Segment> WordAlignment::Words() const {
  std::vector<Segment> w;
  for (const Segment &s : segments)
    if (!s.filler) w.push_back(s);
  return w;
}

double FrameToSec(int64 frame, int32 shift_ms) {
  return static_cast<double>(frame * shift_ms) / 1000.0;
}

WordAlignment PathToAlignment(const AlignGraph &graph, const AcousticModel &model,
                              const EmissionMatrix &em, const ViterbiResult &r,
                              int32 shift_ms) {
  const StateGraph &g = graph.graph;
  const std::vector<int32> &path = r.path;
  WordAlignment a;
  a.frame_shift_ms = shift_ms;
  a.log_likelihood = r.score;
  const int32 T = static_cast<int32>(path.size());
  int32 begin = 0;
  double score = 0.0;
  for (int32 t = 0; t < T; ++t) {
    const auto &node = g.nodes[path[t]];
    double step = em(t, node.pdf);
    if (t > 0) {
      for (const auto &arc : node.in)
        if (arc.from == path[t - 1]) step += arc.log_prob;
    }
    score += step;
    const bool last = t + 1 == T;
    if (last) score += node.final_log_prob;
    if (last || g.nodes[path[t + 1]].word != node.word ||
        (node.word < 0 && model.PdfPhone(g.nodes[path[t + 1]].pdf) !=
                              model.PdfPhone(node.pdf))) {
      Segment s;
      s.filler = node.word < 0;
      s.label = s.filler ? "<" + model.Phones()[model.PdfPhone(node.pdf)] + ">"
                         : graph.words[node.word];
      s.start_sec = FrameToSec(begin, shift_ms);
      s.end_sec = FrameToSec(t + 1, shift_ms);
      s.score = score;
      a.segments.push_back(std::move(s));
      begin = t + 1;
      score = 0.0;
    }
  }
  return a;
}

WordAlignment ViterbiAlign(const AlignGraph &graph, const AcousticModel &model,
                           const FeatureMatrix *gmm_feats, const FeatureMatrix *nn_feats,
                           const AlignOptions &opts) {
  EmissionMatrix em;
  int32 shift_ms = 10;
  if (opts.use_mlp && model.HasMlp()) {
    if (!nn_feats) Fail(ErrorCode::kInvalidArgument, "hybrid decoding needs network features");
    const Mlp &net = model.GetMlp();
    em = net.HybridEmissions(*nn_feats);
    shift_ms = 10 * net.subsample;
  } else {
    if (!gmm_feats) Fail(ErrorCode::kInvalidArgument, "GMM decoding needs GMM features");
    em = model.GmmEmissions(*gmm_feats, graph.Pdfs());
  }
  ViterbiOptions vo;
  vo.beam = opts.beam;
  ViterbiResult r = Viterbi(graph.graph, em, vo);
  return PathToAlignment(graph, model, em, r, shift_ms);
}

std::string WriteAlignmentTsv(const WordAlignment &a) {
  std::string out = "# utt=" + a.utt_id + " shift_ms=" + std::to_string(a.frame_shift_ms) +
                    " loglik=" + FormatDouble(a.log_likelihood, 17);
  for (const auto &[k, v] : a.header) out += " " + k + "=" + v;
  out += "\nword\tstart_sec\tend_sec\tscore\n";
  for (const Segment &s : a.segments)
    out += s.label + "\t" + FormatFixed(s.start_sec, 3) + "\t" + FormatFixed(s.end_sec, 3) +
           "\t" + FormatDouble(s.score, 17) + "\n";
  return out;
}

WordAlignment ReadAlignmentTsv(std::string_view text) {
  WordAlignment a;
  int line_no = 0;
  bool seen_columns = false;
  for (const std::string &raw : SplitString(text, '\n')) {
    ++line_no;
    std::string_view line = raw;
    if (line.empty()) continue;
    auto bad = [&](const std::string &msg) {
      Fail(ErrorCode::kParse, "alignment line " + std::to_string(line_no) + ": " + msg);
    };
    if (line[0] == '#') {
      for (const std::string &kv : SplitWhitespace(line.substr(1))) {
        size_t eq = kv.find('=');
        if (eq == std::string::npos) bad("expected key=value");
        std::string k = kv.substr(0, eq), v = kv.substr(eq + 1);
        long long n;
        if (k == "utt") {
          a.utt_id = v;
        } else if (k == "shift_ms") {
          if (!ParseInt(v, &n) || n <= 0) bad("bad shift");
          a.frame_shift_ms = static_cast<int32>(n);
        } else if (k == "loglik") {
          if (!ParseDouble(v, &a.log_likelihood)) bad("bad loglik");
        } else {
          a.header.emplace_back(k, v);
        }
      }
      continue;
    }
    if (!seen_columns && line.starts_with("word\t")) {
      seen_columns = true;
      continue;
    }
    std::vector<std::string> f = SplitString(line, '\t');
    if (f.size() != 4) bad("expected 4 tab-separated fields");
    Segment s;
    s.label = f[0];
    s.filler = s.label.size() > 2 && s.label.front() == '<' && s.label.back() == '>';
    if (!ParseDouble(f[1], &s.start_sec) || !ParseDouble(f[2], &s.end_sec) ||
        !ParseDouble(f[3], &s.score))
      bad("bad number");
    if (s.end_sec < s.start_sec) bad("end before start");
    a.segments.push_back(std::move(s));
  }
  return a;
}

AlignCorpusResult AlignCorpus(const std::vector<CorpusUtterance> &utts,
                              const AcousticModel &model, const Lexicon &lex,
                              const AlignOptions &opts, const FeatureSource &features,
                              int32 workers, const std::string &out_dir,
                              const std::vector<std::pair<std::string, std::string>> &header) {
  const int32 n = static_cast<int32>(utts.size());
  std::vector<std::optional<WordAlignment>> ok(n);
  std::vector<std::string> err(n);
  ParallelFor(n, workers, [&](int32 i) {
    try {
      auto [gmm_feats, nn_feats] = features(utts[i]);
      std::vector<LyricsLine> lines = NormalizeLyrics(ReadFileToString(utts[i].lyrics_path));
      AlignGraph g = BuildGraph(lines, lex, model, opts.graph);
      WordAlignment a = ViterbiAlign(g, model, &gmm_feats, &nn_feats, opts);
      a.utt_id = utts[i].id;
      a.header = header;
      if (!out_dir.empty())
        WriteStringToFile(out_dir + "/" + utts[i].id + ".align.tsv", WriteAlignmentTsv(a));
      ok[i] = std::move(a);
    } catch (const std::exception &e) {
      err[i] = e.what();
    }
  });
  AlignCorpusResult result;
  for (int32 i = 0; i < n; ++i) {
    if (ok[i])
      result.alignments.push_back(std::move(*ok[i]));
    else
      result.failures.emplace_back(utts[i].id, err[i]);
  }
  return result;
}

}  // namespace lyralign
