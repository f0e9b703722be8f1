// include/lyralign/align-graph.h

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

#ifndef LYRALIGN_ALIGN_GRAPH_H_
#define LYRALIGN_ALIGN_GRAPH_H_

#include <string>
#include <vector>

#include "lyralign/acoustic-model.h"
#include "lyralign/lexicon.h"
#include "lyralign/viterbi.h"

namespace lyralign {

struct GraphOptions {
  /// Optional SIL before, between and after words.
  bool sil = false;
  /// Optional MUS before the first word, between lines and after the last word.
  bool mus = false;
  /// Map unknown words to a single SPN pronunciation instead of failing.
  bool oov_as_spn = false;
};

/// Decoding graph for a lyric.  Each word is a set of parallel pronunciation
/// branches; fillers are skippable alternatives at word or line junctions.
/// Graph-level branching carries no cost, so adding a filler option only
/// adds paths.  MUS is expanded with a frame counter so every pass through
/// it lasts at least Topology().mus_min_frames frames.
struct AlignGraph {
  StateGraph graph;
  std::vector<std::string> words;
  std::vector<int32> word_line;  // index into the input lines
  int32 NumStates() const { return graph.NumNodes(); }
  /// Distinct pdfs used by the graph, ascending.
  std::vector<int32> Pdfs() const;
};

/// Throws kEmptyInput for empty lyrics and kOutOfVocabulary (listing every
/// unknown word) unless opts.oov_as_spn.
AlignGraph BuildGraph(const std::vector<LyricsLine> &lines, const Lexicon &lex,
                      const AcousticModel &model, const GraphOptions &opts);

}  // namespace lyralign

#endif  // LYRALIGN_ALIGN_GRAPH_H_
