// aligner-test.cc

#include <cmath>
#include <filesystem>
#include <functional>
#include <random>
#include <map>
#include <set>

#include "doctest.h"
#include "lyralign/aligner.h"
#include "lyralign/gmm-train.h"
#include "lyralign/io-util.h"
#include "support/synth.h"
#include "support/viterbi-oracle.h"

using namespace lyralign;
using namespace lyralign::testing;

namespace {

Lexicon ToyLexicon() {
  return ParseDictionary("HELLO HH AH0 L OW1\nWORLD W ER1 L D\nA AH0\nA(2) EY1\n");
}

AcousticModel ToyModel(int32 dim = 2) {
  return AcousticModel(PhoneSet::Default(), dim, "MFCC=" + std::to_string(dim));
}

int32 CountStarts(const StateGraph &g) {
  int32 n = 0;
  for (const auto &node : g.nodes) n += node.start;
  return n;
}

void CheckTiling(const WordAlignment &a, int32 frames) {
  REQUIRE(!a.segments.empty());
  CHECK(a.segments.front().start_sec == 0.0);
  for (size_t i = 1; i < a.segments.size(); ++i)
    CHECK(a.segments[i].start_sec == a.segments[i - 1].end_sec);
  CHECK(a.segments.back().end_sec == FrameToSec(frames, a.frame_shift_ms));
  for (const Segment &s : a.segments) {
    CHECK(s.end_sec > s.start_sec);
    long long ms = std::llround(s.start_sec * 1000);
    CHECK(ms % a.frame_shift_ms == 0);
    CHECK(s.start_sec == FrameToSec(ms / a.frame_shift_ms, a.frame_shift_ms));
  }
}

}  // namespace

TEST_CASE("graph for one word without options is a chain") {
  Lexicon lex = ToyLexicon();
  AcousticModel m = ToyModel();
  AlignGraph g = BuildGraph(NormalizeLyrics("hello"), lex, m, {});
  CHECK(g.NumStates() == 12);
  CHECK(CountStarts(g.graph) == 1);
  for (int32 n = 1; n < g.NumStates(); ++n) {
    REQUIRE(g.graph.nodes[n].in.size() == 2);
    CHECK(g.graph.nodes[n].in[0].from == n - 1);
    CHECK(g.graph.nodes[n].in[1].from == n);
  }
  CHECK(g.graph.nodes[11].final_log_prob == std::log(0.5));
  g.graph.Check();
}

TEST_CASE("optional SIL between words") {
  Lexicon lex = ToyLexicon();
  AcousticModel m = ToyModel();
  GraphOptions o;
  o.sil = true;
  AlignGraph g = BuildGraph(NormalizeLyrics("hello world"), lex, m, o);
  CHECK(g.NumStates() == 12 + 12 + 3 * 5);
  CHECK(CountStarts(g.graph) == 2);  // leading SIL or HELLO
  // WORLD's first state is entered from HELLO directly or from the SIL.
  const int32 world0 = 5 + 12 + 5;
  CHECK(g.graph.nodes[world0].word == 1);
  CHECK(g.graph.nodes[world0].in.size() == 4);  // HELLO exit, SIL state 3 skip, SIL state 4, self
}

TEST_CASE("pronunciation variants are parallel branches") {
  Lexicon lex = ToyLexicon();
  AcousticModel m = ToyModel();
  AlignGraph g = BuildGraph(NormalizeLyrics("a hello"), lex, m, {});
  CHECK(g.NumStates() == 3 + 3 + 12);
  CHECK(CountStarts(g.graph) == 2);
  CHECK(g.graph.nodes[6].in.size() == 3);  // both branches merge into HELLO
}

TEST_CASE("graph errors") {
  Lexicon lex = ToyLexicon();
  AcousticModel m = ToyModel();
  CHECK_THROWS_AS(BuildGraph({}, lex, m, {}), Error);
  try {
    BuildGraph(NormalizeLyrics("hello zzzq qqq"), lex, m, {});
    FAIL("expected OOV");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kOutOfVocabulary);
    CHECK(std::string(e.what()).find("ZZZQ QQQ") != std::string::npos);
  }
  GraphOptions o;
  o.oov_as_spn = true;
  AlignGraph g = BuildGraph(NormalizeLyrics("hello zzzq"), lex, m, o);
  CHECK(g.NumStates() == 12 + 5);
}

TEST_CASE("MUS always lasts the minimum duration") {
  Lexicon lex = ToyLexicon();
  AcousticModel m = ToyModel(1);
  GraphOptions o;
  o.mus = true;
  AlignGraph g = BuildGraph(NormalizeLyrics("a"), lex, m, o);
  // Emissions favour MUS everywhere; the word still costs 3 frames, and MUS
  // only appears once it can fill at least 30 of the remaining ones.
  const int32 mus_pdf = m.PhonePdfs(m.PhoneIndex("MUS"))[0];
  for (int32 T : {29, 40}) {
    EmissionMatrix em = EmissionMatrix::Constant(T, m.NumPdfs(), -50.0);
    for (int32 p : m.PhonePdfs(m.PhoneIndex("MUS"))) em.col(p).setConstant(0.0);
    ViterbiResult r = Viterbi(g.graph, em);
    int32 mus_frames = 0;
    for (int32 n : r.path) mus_frames += m.PdfPhone(g.graph.nodes[n].pdf) == m.PdfPhone(mus_pdf);
    CHECK(mus_frames == (T < 33 ? 0 : T - 3));
  }
}

TEST_CASE("brute force agrees on small alignment graphs") {
  std::mt19937 rng(12);
  std::normal_distribution<double> g(0.0, 1.0);
  Lexicon lex = ParseDictionary("X K\nY T\n");
  HmmTopology topo;
  topo.phone_states = 2;
  AcousticModel m(PhoneSet::Default(), 2, "MFCC=2", topo);
  for (int32 p = 0; p < m.NumPdfs(); ++p)
    m.MutableGmm(p) = DiagGmm({g(rng), g(rng)}, {1.0 + std::abs(g(rng)), 1.0});
  for (int trial = 0; trial < 40; ++trial) {
    FeatureMatrix f(8, {{"MFCC", 2}});
    for (int32 t = 0; t < 8; ++t)
      for (int32 d = 0; d < 2; ++d) f(t, d) = static_cast<float>(g(rng));
    for (int32 p : {m.PhonePdfs(m.PhoneIndex("K"))[0], m.PhonePdfs(m.PhoneIndex("T"))[1]})
      m.SetTransitionsFromCounts(p, {1.0 + trial % 3, 1.0, 0.0});
    AlignGraph ag = BuildGraph(NormalizeLyrics("x y"), lex, m, {});
    EmissionMatrix em = m.GmmEmissions(f, ag.Pdfs());
    OracleResult o = BruteForce(ag.graph, em);
    WordAlignment a = ViterbiAlign(ag, m, &f, nullptr);
    ViterbiResult v = Viterbi(ag.graph, em);
    CHECK(v.path == o.path);
    CHECK(v.score == o.score);
    CHECK(a.log_likelihood == o.score);
    CheckTiling(a, 8);
  }
}

TEST_CASE("generate and align with the true model") {
  SynthModel sm = MakeSynthModel(6, 12, 77);
  std::mt19937 rng(78);
  int32 within = 0, total = 0;
  AlignOptions opts;
  for (int i = 0; i < 20; ++i) {
    SynthUtterance u = SampleUtterance(sm, rng);
    AlignGraph g = BuildGraph(u.lines, sm.lex, sm.truth, opts.graph);
    WordAlignment a = ViterbiAlign(g, sm.truth, &u.feats, nullptr, opts);
    CheckTiling(a, u.feats.NumFrames());
    std::vector<Segment> words = a.Words();
    REQUIRE(words.size() == u.word_start.size());
    for (size_t w = 0; w < words.size(); ++w) {
      ++total;
      within += std::abs(words[w].start_sec - FrameToSec(u.word_start[w], 10)) <= 0.0105;
    }
    double sum = 0.0;
    for (const Segment &s : a.segments) sum += s.score;
    CHECK(sum == doctest::Approx(a.log_likelihood).epsilon(1e-9));
    // A skippable option never lowers the optimum.
    AlignOptions no_sil = opts;
    no_sil.graph.sil = false;
    AlignGraph g2 = BuildGraph(u.lines, sm.lex, sm.truth, no_sil.graph);
    WordAlignment b = ViterbiAlign(g2, sm.truth, &u.feats, nullptr, no_sil);
    CHECK(a.log_likelihood >= b.log_likelihood);
    AlignOptions with_mus = opts;
    with_mus.graph.mus = true;
    AlignGraph g3 = BuildGraph(u.lines, sm.lex, sm.truth, with_mus.graph);
    CHECK(ViterbiAlign(g3, sm.truth, &u.feats, nullptr, with_mus).log_likelihood >=
          a.log_likelihood);
  }
  CHECK(within >= 0.95 * total);
}

TEST_CASE("MUS absorbs an instrumental utterance") {
  SynthModel sm = MakeSynthModel(4, 4, 5);
  const auto &mus = sm.truth.PhonePdfs(sm.truth.PhoneIndex("MUS"));
  std::mt19937 rng(6);
  std::normal_distribution<double> noise(0.0, 0.3);
  FeatureMatrix f(200, ParseLayout(SynthLayout(sm.dim)));
  for (int32 t = 0; t < 200; ++t)
    for (int32 d = 0; d < sm.dim; ++d)
      f(t, d) = static_cast<float>(sm.truth.Gmm(mus[(t / 40) % 5]).Mean(0)[d] + noise(rng));
  std::vector<LyricsLine> lines = NormalizeLyrics("w0 w1\nw2");
  AlignOptions o;
  o.graph.mus = true;
  AlignGraph g = BuildGraph(lines, sm.lex, sm.truth, o.graph);
  WordAlignment a = ViterbiAlign(g, sm.truth, &f, nullptr, o);
  double word_sec = 0.0, mus_sec = 0.0;
  for (const Segment &s : a.segments) {
    if (!s.filler) {
      const size_t phones = sm.lex.Pronunciations(s.label).front().size();
      CHECK(s.end_sec - s.start_sec == doctest::Approx(0.03 * phones));
      word_sec += s.end_sec - s.start_sec;
    } else if (s.label == "<MUS>") {
      mus_sec += s.end_sec - s.start_sec;
    }
  }
  CHECK(mus_sec > 4 * word_sec);
  CHECK(a.Words().size() == 3);
}

TEST_CASE("hybrid decoding runs at the subsampled shift") {
  SynthModel sm = MakeSynthModel(4, 6, 15);
  std::mt19937 rng(16);
  SynthUtterance u = SampleUtterance(sm, rng);
  AcousticModel m = sm.truth;
  MlpConfig cfg;
  cfg.hidden_dim = 16;
  Mlp net(sm.dim, SynthLayout(sm.dim), m.NumPdfs(), cfg, 3);
  MlpTrainOptions to;
  to.epochs = 3;
  TrainMlp(&net, {u.feats}, {u.pdfs}, to);
  m.SetMlp(net);
  AlignGraph g = BuildGraph(u.lines, sm.lex, m, AlignOptions{}.graph);
  WordAlignment a = ViterbiAlign(g, m, &u.feats, &u.feats);
  CHECK(a.frame_shift_ms == 30);
  CheckTiling(a, (u.feats.NumFrames() + 2) / 3);
  AlignOptions gmm_only;
  gmm_only.use_mlp = false;
  CHECK(ViterbiAlign(g, m, &u.feats, nullptr, gmm_only).frame_shift_ms == 10);
}

TEST_CASE("alignment TSV round trip") {
  WordAlignment a;
  a.utt_id = "utt-1";
  a.frame_shift_ms = 30;
  a.log_likelihood = -1234.5678901234567;
  a.header = {{"model", "abc"}, {"sil", "1"}};
  a.segments = {{"<SIL>", 0.0, FrameToSec(7, 30), -3.25, true},
                {"DON'T", FrameToSec(7, 30), FrameToSec(19, 30), -0.1 / 3, false},
                {"STOP", FrameToSec(19, 30), FrameToSec(20, 30), -1e-17, false}};
  std::string text = WriteAlignmentTsv(a);
  CHECK(text.find("DON'T\t0.210\t0.570\t") != std::string::npos);
  CHECK(ReadAlignmentTsv(text) == a);
  CHECK_THROWS_AS(ReadAlignmentTsv("A\t1\t2\n"), Error);
}

TEST_CASE("align corpus collects failures and is order stable") {
  SynthModel sm = MakeSynthModel(4, 6, 41);
  std::mt19937 rng(42);
  std::filesystem::path dir = std::filesystem::temp_directory_path() / "lyralign-align-test";
  std::filesystem::remove_all(dir);
  std::vector<CorpusUtterance> utts;
  std::map<std::string, FeatureMatrix> feats;
  for (int i = 0; i < 6; ++i) {
    SynthUtterance u = SampleUtterance(sm, rng);
    std::string id = "u" + std::to_string(i);
    std::string lyr;
    for (const auto &l : u.lines) {
      for (const auto &w : l.words) lyr += w + " ";
      lyr += "\n";
    }
    WriteStringToFile((dir / (id + ".txt")).string(), lyr);
    feats[id] = u.feats;
    utts.push_back({id, "", (dir / (id + ".txt")).string()});
  }
  utts[2].lyrics_path = (dir / "missing.txt").string();
  FeatureSource src = [&](const CorpusUtterance &u) {
    return std::make_pair(feats.at(u.id), feats.at(u.id));
  };
  AlignOptions o;
  AlignCorpusResult one = AlignCorpus(utts, sm.truth, sm.lex, o, src, 1, (dir / "a1").string());
  AlignCorpusResult four = AlignCorpus(utts, sm.truth, sm.lex, o, src, 4, (dir / "a4").string());
  CHECK(one.alignments.size() == 5);
  REQUIRE(one.failures.size() == 1);
  CHECK(one.failures[0].first == "u2");
  CHECK(one.alignments == four.alignments);
  for (const auto &a : one.alignments)
    CHECK(ReadFileToString((dir / "a1" / (a.utt_id + ".align.tsv")).string()) ==
          ReadFileToString((dir / "a4" / (a.utt_id + ".align.tsv")).string()));
  AlignCorpusResult none = AlignCorpus({}, sm.truth, sm.lex, o, src, 2, "");
  CHECK(none.alignments.empty());
  CHECK(none.failures.empty());
  std::filesystem::remove_all(dir);
}
