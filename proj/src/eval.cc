// src/eval.cc

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

#include "lyralign/eval.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"
#include "lyralign/io-util.h"
#include "lyralign/lexicon.h"
#include "lyralign/parallel.h"

namespace lyralign {

std::vector<TruthWord> ReadTruthTsv(std::string_view text) {
  std::vector<TruthWord> out;
  int line_no = 0;
  for (const std::string &raw : SplitString(text, '\n')) {
    ++line_no;
    std::string line(Trim(raw));
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f = SplitString(line, '\t');
    TruthWord w;
    if (f.size() != 3 || f[0].empty() || !ParseDouble(f[1], &w.start_sec) ||
        !ParseDouble(f[2], &w.end_sec))
      Fail(ErrorCode::kParse, "truth line " + std::to_string(line_no) + ": expected word, start, end");
    if (w.end_sec < w.start_sec)
      Fail(ErrorCode::kParse, "truth line " + std::to_string(line_no) + ": end before start");
    w.word = f[0];
    out.push_back(std::move(w));
  }
  return out;
}

std::string WriteTruthTsv(const std::vector<TruthWord> &words) {
  std::string out;
  for (const TruthWord &w : words)
    out += w.word + "\t" + FormatShortest(w.start_sec) + "\t" + FormatShortest(w.end_sec) + "\n";
  return out;
}

double WordError::StartError() const { return std::abs(pred_start - true_start); }
double WordError::EndError() const { return std::abs(pred_end - true_end); }

std::vector<WordError> PairWords(const WordAlignment &pred,
                                 const std::vector<TruthWord> &truth) {
  std::vector<Segment> words = pred.Words();
  const size_t n = std::min(words.size(), truth.size());
  std::vector<WordError> out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    std::string p = NormalizeWord(words[i].label), t = NormalizeWord(truth[i].word);
    if (p != t)
      Fail(ErrorCode::kWordMismatch, pred.utt_id + ": word " + std::to_string(i) +
           " is '" + p + "' in the alignment but '" + t + "' in the reference");
    out.push_back({pred.utt_id, t, words[i].start_sec, truth[i].start_sec,
                   words[i].end_sec, truth[i].end_sec});
  }
  if (words.size() != truth.size())
    Fail(ErrorCode::kWordMismatch, pred.utt_id + ": word " + std::to_string(n) + " exists only in the " +
         (words.size() > n ? "alignment" : "reference"));
  return out;
}

namespace {

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double Mean(const std::vector<double> &v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / v.size();
}

}  // namespace

EvalReport Aggregate(const std::vector<WordError> &words, double tolerance_sec) {
  if (words.empty()) Fail(ErrorCode::kEmptyInput, "no words to score");
  if (!(tolerance_sec >= 0.0)) Fail(ErrorCode::kInvalidArgument, "tolerance must be >= 0");
  std::vector<double> start, end;
  for (const WordError &w : words) {
    start.push_back(w.StartError());
    end.push_back(w.EndError());
  }
  EvalReport r;
  r.n_words = words.size();
  r.tolerance_sec = tolerance_sec;
  r.mean_ae_sec = Mean(start);
  r.median_ae_sec = Median(start);
  double ss = 0.0;
  int64 ok = 0;
  for (double e : start) {
    ss += (e - r.mean_ae_sec) * (e - r.mean_ae_sec);
    ok += e <= tolerance_sec;
  }
  r.std_ae_sec = std::sqrt(ss / start.size());
  r.pct_correct = 100.0 * ok / start.size();
  r.mean_end_ae_sec = Mean(end);
  r.median_end_ae_sec = Median(end);
  r.words = words;
  return r;
}

EvalReport AggregateErrors(const std::vector<double> &errors, double tolerance_sec) {
  std::vector<WordError> words;
  for (double e : errors) {
    if (!(e >= 0.0)) Fail(ErrorCode::kInvalidArgument, "absolute errors must be >= 0");
    words.push_back({"", "", e, 0.0, e, 0.0});
  }
  return Aggregate(words, tolerance_sec);
}

std::string ReportToJson(const EvalReport &r) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json header = nlohmann::ordered_json::array();
  for (const auto &[k, v] : r.header) header.push_back({k, v});
  j["header"] = std::move(header);
  j["n_words"] = r.n_words;
  j["mean_ae_sec"] = r.mean_ae_sec;
  j["median_ae_sec"] = r.median_ae_sec;
  j["std_ae_sec"] = r.std_ae_sec;
  j["pct_correct"] = r.pct_correct;
  j["tolerance_sec"] = r.tolerance_sec;
  j["extra"] = {{"mean_end_ae_sec", r.mean_end_ae_sec}, {"median_end_ae_sec", r.median_end_ae_sec}};
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const WordError &w : r.words)
    rows.push_back({{"utt", w.utt_id}, {"word", w.word}, {"pred_start", w.pred_start},
                    {"true_start", w.true_start}, {"pred_end", w.pred_end}, {"true_end", w.true_end}});
  j["words"] = std::move(rows);
  return j.dump(1) + "\n";
}

EvalReport ReportFromJson(std::string_view json) {
  try {
    nlohmann::json j = nlohmann::json::parse(json);
    EvalReport r;
    if (j.contains("header"))
      for (const auto &kv : j.at("header"))
        r.header.emplace_back(kv.at(0).get<std::string>(), kv.at(1).get<std::string>());
    r.n_words = j.at("n_words").get<int64>();
    r.mean_ae_sec = j.at("mean_ae_sec").get<double>();
    r.median_ae_sec = j.at("median_ae_sec").get<double>();
    r.std_ae_sec = j.at("std_ae_sec").get<double>();
    r.pct_correct = j.at("pct_correct").get<double>();
    r.tolerance_sec = j.at("tolerance_sec").get<double>();
    r.mean_end_ae_sec = j.at("extra").at("mean_end_ae_sec").get<double>();
    r.median_end_ae_sec = j.at("extra").at("median_end_ae_sec").get<double>();
    for (const auto &w : j.at("words"))
      r.words.push_back({w.at("utt").get<std::string>(), w.at("word").get<std::string>(),
                         w.at("pred_start").get<double>(), w.at("true_start").get<double>(),
                         w.at("pred_end").get<double>(), w.at("true_end").get<double>()});
    if (static_cast<int64>(r.words.size()) != r.n_words)
      Fail(ErrorCode::kParse, "report: n_words disagrees with the word table");
    return r;
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorCode::kParse, std::string("report: ") + e.what());
  }
}

std::vector<double> DefaultHistogramEdges() { return {0.0, 0.1, 0.25, 0.5, 1.0, 2.0, 5.0}; }

Histogram MakeHistogram(const std::vector<double> &errors, const std::vector<double> &edges) {
  if (edges.empty()) Fail(ErrorCode::kInvalidArgument, "histogram needs at least one edge");
  for (size_t i = 0; i < edges.size(); ++i) {
    if (!std::isfinite(edges[i]) || (i > 0 && !(edges[i] > edges[i - 1])))
      Fail(ErrorCode::kInvalidArgument, "histogram edges must be finite and strictly increasing");
  }
  Histogram h{edges, std::vector<int64>(edges.size(), 0)};
  for (double e : errors) {
    if (!(e >= edges[0])) Fail(ErrorCode::kInvalidArgument, "value below the first histogram edge");
    size_t bin = std::upper_bound(edges.begin(), edges.end(), e) - edges.begin() - 1;
    ++h.counts[bin];
  }
  return h;
}

std::string HistogramCsv(const Histogram &h) {
  std::string out = "bin_lo,bin_hi,count\n";
  for (size_t i = 0; i < h.counts.size(); ++i) {
    out += FormatShortest(h.edges[i]) + ",";
    out += i + 1 < h.edges.size() ? FormatShortest(h.edges[i + 1]) : std::string("inf");
    out += "," + std::to_string(h.counts[i]) + "\n";
  }
  return out;
}

std::vector<MetricDelta> CompareReports(const EvalReport &a, const EvalReport &b) {
  if (a.n_words != b.n_words)
    Fail(ErrorCode::kInvalidArgument, "reports cover different word counts (" +
         std::to_string(a.n_words) + " vs " + std::to_string(b.n_words) + ")");
  auto row = [](const char *name, double x, double y) {
    MetricDelta d{name, x, y, y - x, 0.0};
    if (x != 0.0) d.relative_pct = 100.0 * (y - x) / x;
    else if (y != 0.0) d.relative_pct = std::numeric_limits<double>::quiet_NaN();
    return d;
  };
  return {row("mean_ae_sec", a.mean_ae_sec, b.mean_ae_sec),
          row("median_ae_sec", a.median_ae_sec, b.median_ae_sec),
          row("std_ae_sec", a.std_ae_sec, b.std_ae_sec),
          row("pct_correct", a.pct_correct, b.pct_correct)};
}

std::string FormatComparison(const std::vector<MetricDelta> &deltas) {
  std::string out = "metric\ta\tb\tdelta\trelative_pct\n";
  for (const MetricDelta &d : deltas) {
    out += d.metric + "\t" + FormatFixed(d.a, 4) + "\t" + FormatFixed(d.b, 4) + "\t" +
           FormatFixed(d.delta, 4) + "\t" +
           (std::isnan(d.relative_pct) ? std::string("nan") : FormatFixed(d.relative_pct, 1)) + "\n";
  }
  return out;
}

std::vector<WordError> PairCorpus(
    const std::vector<std::pair<WordAlignment, std::vector<TruthWord>>> &items,
    int32 workers) {
  std::vector<std::vector<WordError>> parts(items.size());
  ParallelFor(items.size(), workers, [&](int32 i) {
    parts[i] = PairWords(items[i].first, items[i].second);
  });
  std::vector<WordError> out;
  for (auto &p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

}  // namespace lyralign
