// support/viterbi-oracle.h

#ifndef LYRALIGN_TESTS_SUPPORT_VITERBI_ORACLE_H_
#define LYRALIGN_TESTS_SUPPORT_VITERBI_ORACLE_H_

#include <functional>
#include <vector>

#include "lyralign/viterbi.h"

namespace lyralign {
namespace testing {

struct OracleResult {
  std::vector<int32> path;
  double score = kLogZero;
};

// Exhaustive search over every arc-consistent node sequence.  Equal scores
// are broken toward the lexicographically larger reversed sequence.
inline OracleResult BruteForce(const StateGraph &g, const EmissionMatrix &em) {
  const int32 T = static_cast<int32>(em.rows()), N = g.NumNodes();
  OracleResult best;
  std::vector<int32> path(T);
  auto arc = [&](int32 from, int32 to) -> const StateGraph::Arc * {
    for (const auto &a : g.nodes[to].in)
      if (a.from == from) return &a;
    return nullptr;
  };
  auto better = [&](double s) {
    if (s > best.score) return true;
    if (s < best.score || best.path.empty()) return false;
    for (int32 t = T - 1; t >= 0; --t)
      if (path[t] != best.path[t]) return path[t] > best.path[t];
    return false;
  };
  std::function<void(int32, double)> rec = [&](int32 t, double s) {
    if (t == T) {
      double f = g.nodes[path[T - 1]].final_log_prob;
      if (f == kLogZero) return;
      double total = s + f;
      if (better(total)) {
        best.score = total;
        best.path = path;
      }
      return;
    }
    for (int32 n = 0; n < N; ++n) {
      double v;
      if (t == 0) {
        if (!g.nodes[n].start) continue;
        v = em(0, g.nodes[n].pdf);
      } else {
        const StateGraph::Arc *a = arc(path[t - 1], n);
        if (!a) continue;
        v = (s + a->log_prob) + em(t, g.nodes[n].pdf);
      }
      path[t] = n;
      rec(t + 1, v);
    }
  };
  rec(0, 0.0);
  return best;
}

}  // namespace testing
}  // namespace lyralign

#endif  // LYRALIGN_TESTS_SUPPORT_VITERBI_ORACLE_H_
