// include/lyralign/pipeline.h

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

#ifndef LYRALIGN_PIPELINE_H_
#define LYRALIGN_PIPELINE_H_

// Stage drivers behind the `lyralign` subcommands.  Each stage reads and
// writes files under caller-chosen directories and collects per-utterance
// failures instead of stopping at the first one.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lyralign/acoustic-model.h"
#include "lyralign/aligner.h"
#include "lyralign/eval.h"
#include "lyralign/features.h"
#include "lyralign/gmm-train.h"
#include "lyralign/nnet.h"

namespace lyralign {

struct PipelineConfig {
  // Features.
  std::string features = "C2";  // preset (C1, C2, C2-A, ...) or group list
  bool cmvn = true;
  int32 delta_window = 2;
  std::vector<double> speed_perturb = {1.1};  // extra training copies
  // Lexicon and GMM-HMM.
  int32 max_vowel_repeat = 3;
  int32 gaussians = 4;
  int32 em_iterations = 10;
  std::vector<int32> mixup_iterations = {2, 4, 6};
  int32 mus_min_frames = 30;
  // Network.
  int32 mlp_hidden = 256;
  int32 mlp_layers = 2;
  int32 splice = 4;
  int32 subsample = 3;
  double mlp_lr = 0.003;
  int32 mlp_epochs = 5;
  int32 mlp_batch = 64;
  // Adaptation.
  std::vector<AdaptConfig> adapt_grid = {{1.0, 1}, {1.0, 2}, {1.0, 3},
                                         {0.5, 1}, {0.5, 2}, {0.5, 3}};
  int32 adapt_frozen_layers = 0;
  int32 adapt_label_passes = 3;  // MAP passes before labelling adaptation data
  double map_tau = 10.0;
  // Decoding and scoring.
  bool sil = true;
  bool mus = false;
  bool oov_as_spn = false;
  double beam = 0.0;
  double tolerance = 0.25;
  uint64_t seed = 1;

  /// `key=value` lines with `#` comments.  Unknown or repeated keys and bad
  /// values raise kConfig with the line number.
  static PipelineConfig Parse(std::string_view text);
  /// Overrides one key, with the same validation as Parse.
  void Set(std::string_view key, std::string_view value);
  void Validate() const;

  /// Every key in a fixed order, in the syntax Parse accepts.
  std::string ToString() const;
  std::string Hash() const;

  FeatureConfig NetworkFeatures() const;
  FeatureConfig GmmFeatures() const;
  MlpConfig MlpShape() const;
  MlpTrainOptions MlpTraining() const;
  EmOptions Em(int32 workers) const;
  AlignOptions Align() const;
  HmmTopology Topology() const;
};

PipelineConfig LoadConfig(const std::string &path);

struct ManifestRow {
  std::string id;
  std::string audio, lyrics, truth;  // truth may be empty
};

/// `id<TAB>audio<TAB>lyrics[<TAB>truth]`, `#` comments.  Relative paths are
/// resolved against the manifest's directory.  Ids must be unique and
/// usable as file names, and every listed file must exist.
std::vector<ManifestRow> ParseManifest(std::string_view text, const std::string &base_dir = ".");
std::vector<ManifestRow> ReadManifest(const std::string &path);

struct StageResult {
  int32 done = 0, skipped = 0;
  std::vector<std::pair<std::string, std::string>> failures;  // id, message
  bool ok() const { return failures.empty(); }
};

/// Feature file names inside a feature directory.  `factor` 1 is the
/// unperturbed audio.
std::string GmmFeaturePath(const std::string &dir, const std::string &id, double factor = 1.0);
std::string NetworkFeaturePath(const std::string &dir, const std::string &id, double factor = 1.0);

/// Writes `<id>.gmm.lyf` (39-dim MFCC for the GMM) and `<id>.feat.lyf` (the
/// configured network input) per row, plus speed-perturbed copies.  A row
/// whose `<id>.key` matches its audio hash and feature config is skipped.
StageResult ExtractFeatures(const std::vector<ManifestRow> &rows, const PipelineConfig &config,
                            const std::string &feat_dir, int32 workers);

/// One loaded utterance.
struct UttData {
  std::string id;
  std::vector<LyricsLine> lines;
  FeatureMatrix gmm, nn;
  std::vector<TruthWord> truth;  // empty when not annotated
};

/// Loads features, lyrics and truth for each row (speed-perturbed copies
/// too when `perturbed`).  Throws on the first unreadable row.
std::vector<UttData> LoadUtterances(const std::vector<ManifestRow> &rows,
                                    const PipelineConfig &config, const std::string &feat_dir,
                                    bool perturbed);

Lexicon LoadLexicon(const std::string &dict_path, const PipelineConfig &config);

struct TrainOutput {
  AcousticModel model;
  EmReport em;
  MlpTrainReport mlp;
  /// JSON lines: one per EM pass and one per network epoch.
  std::string report;
};

/// Flat start, Viterbi EM, interlude filler, then the hybrid network unless
/// `gmm_only`.  OOV words abort with the full list.
TrainOutput TrainModel(const std::vector<UttData> &utts, const Lexicon &lex,
                       const PipelineConfig &config, bool gmm_only, int32 workers);

/// Per-frame pdf labels from GMM alignment.  With a reference, each word is
/// confined to its annotated span when that is admissible.
std::vector<int32> LabelFrames(const AcousticModel &model, const Lexicon &lex, const UttData &u,
                               const PipelineConfig &config);

/// Aligns and scores annotated utterances; unannotated ones are skipped.
EvalReport EvaluateModel(const AcousticModel &model, const Lexicon &lex,
                         const std::vector<UttData> &utts, const PipelineConfig &config,
                         int32 workers);

struct AdaptCell {
  AdaptConfig cfg;
  std::string name;
  AcousticModel model;
  EvalReport dev;
};

struct AdaptGridResult {
  EvalReport unadapted;
  std::vector<AdaptCell> cells;
  int32 best = -1;  // minimum dev mean AE, first on ties
  /// JSON summary of the grid.
  std::string ToJson() const;
};

/// Fine-tunes the network once per grid cell on `adapt` and scores each
/// result on `dev`.  A model without a network gets a single MAP-adapted
/// GMM cell instead.
AdaptGridResult AdaptGrid(const AcousticModel &model, const Lexicon &lex,
                          const std::vector<UttData> &adapt, const std::vector<UttData> &dev,
                          const PipelineConfig &config, int32 workers);

/// Aligns every row from extracted features into `<out_dir>/<id>.align.tsv`.
AlignCorpusResult AlignManifest(const std::vector<ManifestRow> &rows, const AcousticModel &model,
                                const Lexicon &lex, const PipelineConfig &config,
                                const std::string &feat_dir, const std::string &out_dir,
                                int32 workers);

struct ScoreOutput {
  EvalReport report;
  std::vector<std::pair<std::string, std::string>> failures;
};

/// Pairs `<align_dir>/<id>.align.tsv` with each row's reference.
ScoreOutput ScoreManifest(const std::vector<ManifestRow> &rows, const std::string &align_dir,
                          const PipelineConfig &config, int32 workers);

/// Comma-separated numbers, e.g. "0,0.1,0.25".
std::vector<double> ParseNumberList(std::string_view text);

}  // namespace lyralign

#endif  // LYRALIGN_PIPELINE_H_
