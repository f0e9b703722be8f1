// include/lyralign/aligner.h

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

#ifndef LYRALIGN_ALIGNER_H_
#define LYRALIGN_ALIGNER_H_

#include <functional>
#include <string>
#include <vector>

#include "lyralign/acoustic-model.h"
#include "lyralign/align-graph.h"

namespace lyralign {

/// One aligned span: a lyric word, or a filler labelled "<SIL>", "<MUS>".
struct Segment {
  std::string label;
  double start_sec = 0.0, end_sec = 0.0;
  double score = 0.0;  // log-likelihood share of the span
  bool filler = false;
  bool operator==(const Segment &) const = default;
};

struct WordAlignment {
  std::string utt_id;
  std::vector<Segment> segments;  // tiles [0, num_frames * shift)
  double log_likelihood = kLogZero;
  int32 frame_shift_ms = 10;
  /// Free-form `key=value` pairs echoed in the TSV header.
  std::vector<std::pair<std::string, std::string>> header;

  std::vector<Segment> Words() const;
  bool operator==(const WordAlignment &) const = default;
};

struct AlignOptions {
  GraphOptions graph{.sil = true, .mus = false, .oov_as_spn = false};
  /// Decode with the hybrid network when the model has one.
  bool use_mlp = true;
  double beam = 0.0;
};

/// Frame count times shift, computed from integers so the value is the
/// double nearest to the decimal millisecond time.
double FrameToSec(int64 frame, int32 shift_ms);

/// Turns a decoded node path into word and filler segments.
WordAlignment PathToAlignment(const AlignGraph &graph, const AcousticModel &model,
                              const EmissionMatrix &em, const ViterbiResult &r,
                              int32 shift_ms);

/// Forced alignment.  `gmm_feats` feeds the GMM; `nn_feats` feeds the
/// network (every subsample-th frame, 30 ms shift at the default).  Either
/// may be null when the corresponding path is not used.
WordAlignment ViterbiAlign(const AlignGraph &graph, const AcousticModel &model,
                           const FeatureMatrix *gmm_feats, const FeatureMatrix *nn_feats,
                           const AlignOptions &opts = {});

/// `#` header line(s), a column line, then `word	start	end	score` rows
/// with 3-decimal seconds.
std::string WriteAlignmentTsv(const WordAlignment &a);
WordAlignment ReadAlignmentTsv(std::string_view text);

struct CorpusUtterance {
  std::string id;
  std::string audio_path, lyrics_path;
};

/// Produces the features for one utterance: (GMM input, network input).
typedef std::function<std::pair<FeatureMatrix, FeatureMatrix>(const CorpusUtterance &)>
    FeatureSource;

struct AlignCorpusResult {
  std::vector<WordAlignment> alignments;  // successes, in input order
  std::vector<std::pair<std::string, std::string>> failures;  // id, message
};

/// Aligns every utterance on `workers` threads and writes
/// `<out_dir>/<id>.align.tsv` for each success when `out_dir` is non-empty.
/// Per-utterance failures are collected, never thrown.
AlignCorpusResult AlignCorpus(const std::vector<CorpusUtterance> &utts,
                              const AcousticModel &model, const Lexicon &lex,
                              const AlignOptions &opts, const FeatureSource &features,
                              int32 workers, const std::string &out_dir,
                              const std::vector<std::pair<std::string, std::string>> &header = {});

}  // namespace lyralign

#endif  // LYRALIGN_ALIGNER_H_
