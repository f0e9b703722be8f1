// include/lyralign/viterbi.h

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

#ifndef LYRALIGN_VITERBI_H_
#define LYRALIGN_VITERBI_H_

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "lyralign/base.h"

namespace lyralign {

/// Which transition of the source HMM state an arc consumes.
enum ArcKind : int8_t { kArcSelf = 0, kArcNext = 1, kArcSkip = 2 };

/// Emission log-likelihoods, frames x pdfs.
typedef Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> EmissionMatrix;

/// A decoding graph over HMM states.  Arcs are stored on their destination
/// and must come from a node with index <= the destination, so nodes are in
/// topological order apart from self-loops.
struct StateGraph {
  struct Arc {
    int32 from;
    double log_prob;
    ArcKind kind;
  };
  struct Node {
    int32 pdf = 0;
    int32 word = -1;  // word position, or -1 for fillers
    bool start = false;
    double final_log_prob = kLogZero;
    ArcKind final_kind = kArcNext;
    std::vector<Arc> in;  // sorted by `from`
  };
  std::vector<Node> nodes;

  int32 NumNodes() const { return static_cast<int32>(nodes.size()); }
  int32 AddNode(int32 pdf, int32 word = -1);
  /// Adds from -> to; keeps `in` sorted.  Requires from <= to.
  void AddArc(int32 from, int32 to, double log_prob, ArcKind kind);
  /// Throws kInvalidArgument if an arc goes backwards or an index is out of range.
  void Check() const;
};

struct ViterbiOptions {
  /// Prune nodes scoring more than `beam` below the frame's best; 0 is exact.
  double beam = 0.0;
  /// Per word position, the allowed frame interval [first, last).  Nodes of
  /// a word may only be occupied inside it.  Empty means unconstrained.
  std::vector<std::pair<int32, int32>> word_spans;
};

struct ViterbiResult {
  std::vector<int32> path;  // node per frame
  double score = kLogZero;
};

/// Exact max-product decoding.  Score of a path n_0..n_{T-1} is
///   sum_t [arc(n_{t-1} -> n_t)] + emission(t, pdf(n_t)) + final(n_{T-1}),
/// accumulated frame by frame.  Among equal scores the later node index
/// wins at every backtrace step, so self-loops beat entering transitions and
/// boundaries land as early as possible.  Throws kNoAdmissiblePath.
ViterbiResult Viterbi(const StateGraph &graph, const EmissionMatrix &emissions,
                      const ViterbiOptions &opts = {});

/// Re-scores a given node sequence with the same accumulation order.
double PathScore(const StateGraph &graph, const EmissionMatrix &emissions,
                 const std::vector<int32> &path);

}  // namespace lyralign

#endif  // LYRALIGN_VITERBI_H_
