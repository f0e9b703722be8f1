// include/lyralign/eval.h

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

#ifndef LYRALIGN_EVAL_H_
#define LYRALIGN_EVAL_H_

#include <string>
#include <string_view>
#include <vector>

#include "lyralign/aligner.h"

namespace lyralign {

struct TruthWord {
  std::string word;
  double start_sec = 0.0, end_sec = 0.0;
  bool operator==(const TruthWord &) const = default;
};

/// Reads `word<TAB>start_sec<TAB>end_sec` rows; `#` lines are ignored.
std::vector<TruthWord> ReadTruthTsv(std::string_view text);
std::string WriteTruthTsv(const std::vector<TruthWord> &words);

struct WordError {
  std::string utt_id, word;
  double pred_start = 0.0, true_start = 0.0;
  double pred_end = 0.0, true_end = 0.0;
  double StartError() const;
  double EndError() const;
  bool operator==(const WordError &) const = default;
};

/// Pairs predicted and reference words in order.  The two word sequences
/// must agree after normalization; kWordMismatch names the first index where
/// they diverge.
std::vector<WordError> PairWords(const WordAlignment &pred,
                                 const std::vector<TruthWord> &truth);

struct EvalReport {
  int64 n_words = 0;
  double mean_ae_sec = 0.0, median_ae_sec = 0.0, std_ae_sec = 0.0;
  double pct_correct = 0.0;
  double tolerance_sec = 0.25;
  // End-boundary statistics, not part of the headline metrics.
  double mean_end_ae_sec = 0.0, median_end_ae_sec = 0.0;
  std::vector<WordError> words;
  /// Provenance pairs (config and model hashes) carried through JSON.
  std::vector<std::pair<std::string, std::string>> header;
  bool operator==(const EvalReport &) const = default;
};

/// Word-start statistics over the whole list; the standard deviation is the
/// population one.
EvalReport Aggregate(const std::vector<WordError> &words, double tolerance_sec = 0.25);

/// Convenience form for bare absolute errors.
EvalReport AggregateErrors(const std::vector<double> &errors, double tolerance_sec = 0.25);

std::string ReportToJson(const EvalReport &r);
EvalReport ReportFromJson(std::string_view json);

struct Histogram {
  std::vector<double> edges;
  /// edges.size() entries: [edges[i], edges[i+1]) then [edges.back(), inf).
  std::vector<int64> counts;
};

std::vector<double> DefaultHistogramEdges();

/// `edges` must be non-empty and strictly increasing; values below edges[0]
/// are rejected.
Histogram MakeHistogram(const std::vector<double> &errors, const std::vector<double> &edges);
std::string HistogramCsv(const Histogram &h);

struct MetricDelta {
  std::string metric;
  double a = 0.0, b = 0.0;
  double delta = 0.0;         // b - a
  double relative_pct = 0.0;  // 100 * (b - a) / a; NaN when a is 0 and b is not
};

/// Metric-by-metric changes going from `a` to `b`.  Both must cover the same
/// number of words.
std::vector<MetricDelta> CompareReports(const EvalReport &a, const EvalReport &b);
std::string FormatComparison(const std::vector<MetricDelta> &deltas);

/// One (predicted, reference) pair per utterance, paired across `workers`
/// threads and concatenated in input order.
std::vector<WordError> PairCorpus(
    const std::vector<std::pair<WordAlignment, std::vector<TruthWord>>> &items,
    int32 workers);

}  // namespace lyralign

#endif  // LYRALIGN_EVAL_H_
