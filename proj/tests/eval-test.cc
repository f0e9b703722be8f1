// eval-test.cc

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "doctest.h"
#include "lyralign/eval.h"
#include "lyralign/io-util.h"

using namespace lyralign;

namespace {

WordAlignment MakeAlignment(const std::vector<TruthWord> &words) {
  WordAlignment a;
  a.utt_id = "u";
  double t = 0.0;
  for (const TruthWord &w : words) {
    if (w.start_sec > t) a.segments.push_back({"<SIL>", t, w.start_sec, 0.0, true});
    a.segments.push_back({w.word, w.start_sec, w.end_sec, 0.0, false});
    t = w.end_sec;
  }
  return a;
}

std::vector<TruthWord> Reference() {
  return {{"hello", 0.5, 1.0}, {"don't", 1.0, 1.75}, {"go", 2.0, 2.5}};
}

ErrorCode CodeOf(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::kIo;
}

}  // namespace

TEST_CASE("identical boundaries give zero error") {
  std::vector<WordError> e = PairWords(MakeAlignment(Reference()), Reference());
  REQUIRE(e.size() == 3);
  for (const WordError &w : e) CHECK(w.StartError() == 0.0);
  CHECK(e[1].word == "DON'T");
}

TEST_CASE("a shifted word gives its shift") {
  std::vector<TruthWord> pred = {{"HELLO", 0.6, 1.0}};
  std::vector<WordError> e = PairWords(MakeAlignment(pred), {{"hello", 0.5, 1.0}});
  REQUIRE(e.size() == 1);
  CHECK(e[0].StartError() == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(e[0].EndError() == 0.0);
}

TEST_CASE("word mismatch reports the first divergence") {
  std::vector<TruthWord> truth = Reference();
  truth.push_back({"home", 3.0, 3.5});
  try {
    PairWords(MakeAlignment(Reference()), truth);
    FAIL("expected mismatch");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kWordMismatch);
    CHECK(std::string(e.what()).find("word 3") != std::string::npos);
  }
  truth = Reference();
  truth[1].word = "do";
  try {
    PairWords(MakeAlignment(Reference()), truth);
    FAIL("expected mismatch");
  } catch (const Error &e) {
    CHECK(std::string(e.what()).find("word 1") != std::string::npos);
  }
}

TEST_CASE("aggregate fixtures") {
  EvalReport r = AggregateErrors({0.1, 0.3}, 0.25);
  CHECK(r.mean_ae_sec == doctest::Approx(0.2));
  CHECK(r.median_ae_sec == doctest::Approx(0.2));
  CHECK(r.std_ae_sec == doctest::Approx(0.1));
  CHECK(r.pct_correct == 50.0);

  r = AggregateErrors({0.0, 0.0, 0.0});
  CHECK(r.mean_ae_sec == 0.0);
  CHECK(r.std_ae_sec == 0.0);
  CHECK(r.pct_correct == 100.0);
  CHECK(r.tolerance_sec == 0.25);

  r = AggregateErrors({0.03, 0.03, 10.0});
  CHECK(r.median_ae_sec == 0.03);
  CHECK(r.mean_ae_sec == doctest::Approx(10.06 / 3));
  CHECK(r.median_ae_sec < r.mean_ae_sec);
  const double m = 10.06 / 3;
  CHECK(r.std_ae_sec == doctest::Approx(std::sqrt((2 * (0.03 - m) * (0.03 - m) + (10 - m) * (10 - m)) / 3)));

  // The tolerance bound is inclusive.
  CHECK(AggregateErrors({0.25, 0.2500001}).pct_correct == 50.0);
  CHECK(CodeOf([] { AggregateErrors({}); }) == ErrorCode::kEmptyInput);
  CHECK(CodeOf([] { AggregateErrors({-1.0}); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("aggregate properties on random fixtures") {
  std::mt19937 rng(3);
  std::exponential_distribution<double> ex(4.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> e(1 + rng() % 40);
    for (double &x : e) x = ex(rng);
    EvalReport r = AggregateErrors(e);
    std::vector<double> shuffled = e;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EvalReport s = AggregateErrors(shuffled);
    CHECK(s.mean_ae_sec == doctest::Approx(r.mean_ae_sec).epsilon(1e-12));
    CHECK(s.median_ae_sec == r.median_ae_sec);
    CHECK(s.std_ae_sec == doctest::Approx(r.std_ae_sec).epsilon(1e-12));
    CHECK(s.pct_correct == r.pct_correct);
    double prev = -1.0;
    for (double tol = 0.0; tol < 1.5; tol += 0.05) {
      double pc = AggregateErrors(e, tol).pct_correct;
      CHECK(pc >= prev);
      CHECK(pc >= 0.0);
      CHECK(pc <= 100.0);
      prev = pc;
    }
    // Recomputable from the word table.
    EvalReport again = Aggregate(r.words, r.tolerance_sec);
    CHECK(again == r);
  }
}

TEST_CASE("right skew puts the median below the mean") {
  EvalReport r = AggregateErrors({0.01, 0.02, 0.02, 0.03, 0.05, 0.1, 0.8, 2.5});
  CHECK(r.median_ae_sec < r.mean_ae_sec);
}

TEST_CASE("histogram") {
  Histogram h = MakeHistogram({0.1, 0.2}, {0.0, 0.15, 0.3});
  CHECK(h.counts == std::vector<int64>{1, 1, 0});
  CHECK(HistogramCsv(h) == "bin_lo,bin_hi,count\n0,0.15,1\n0.15,0.3,1\n0.3,inf,0\n");
  CHECK(MakeHistogram({0.15, 7.0}, {0.0, 0.15, 0.3}).counts == std::vector<int64>{0, 1, 1});
  CHECK(CodeOf([] { MakeHistogram({0.1}, {}); }) == ErrorCode::kInvalidArgument);
  CHECK(CodeOf([] { MakeHistogram({0.1}, {0.0, 0.5, 0.5}); }) == ErrorCode::kInvalidArgument);
  CHECK(CodeOf([] { MakeHistogram({0.1}, {0.3, 0.2}); }) == ErrorCode::kInvalidArgument);
  CHECK(CodeOf([] { MakeHistogram({-0.1}, {0.0}); }) == ErrorCode::kInvalidArgument);

  std::mt19937 rng(9);
  std::lognormal_distribution<double> ln(-1.5, 1.5);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> e(rng() % 200);
    for (double &x : e) x = ln(rng);
    Histogram d = MakeHistogram(e, DefaultHistogramEdges());
    CHECK(d.counts.size() == 7);
    int64 sum = 0;
    for (int64 c : d.counts) sum += c;
    CHECK(sum == static_cast<int64>(e.size()));
  }
}

TEST_CASE("compare reports") {
  EvalReport a = AggregateErrors({0.1, 0.3});
  for (const MetricDelta &d : CompareReports(a, a)) {
    CHECK(d.delta == 0.0);
    CHECK(d.relative_pct == 0.0);
  }
  EvalReport x = a, y = a;
  x.mean_ae_sec = 0.20;
  y.mean_ae_sec = 0.13;
  CHECK(FormatFixed(CompareReports(x, y)[0].relative_pct, 0) == "-35");
  x.mean_ae_sec = 0.288;
  y.mean_ae_sec = 0.170;
  MetricDelta d = CompareReports(x, y)[0];
  CHECK(FormatFixed(d.relative_pct, 0) == "-41");
  CHECK(d.delta == doctest::Approx(-0.118));
  CHECK(FormatComparison(CompareReports(x, y)).find("mean_ae_sec\t0.2880\t0.1700\t-0.1180\t-41.0") !=
        std::string::npos);
  EvalReport z = AggregateErrors({0.1});
  CHECK(CodeOf([&] { CompareReports(a, z); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("report JSON round trip") {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  std::vector<WordError> words;
  for (int i = 0; i < 25; ++i)
    words.push_back({"utt" + std::to_string(i % 3), "W\"" + std::to_string(i), u(rng), u(rng), u(rng), u(rng)});
  EvalReport r = Aggregate(words, 0.1 / 3);
  r.header = {{"config", "abc"}, {"model", "def"}};
  EvalReport back = ReportFromJson(ReportToJson(r));
  CHECK(back == r);
  CHECK(ReportToJson(back) == ReportToJson(r));
  CHECK(CodeOf([] { ReportFromJson("{\"n_words\": 1}"); }) == ErrorCode::kParse);
  CHECK(CodeOf([] { ReportFromJson("{"); }) == ErrorCode::kParse);
}

TEST_CASE("truth TSV") {
  std::vector<TruthWord> t = ReadTruthTsv("# ref\nhello\t0.5\t1\n\ngo\t2\t2.5\r\n");
  REQUIRE(t.size() == 2);
  CHECK(t[1] == TruthWord{"go", 2.0, 2.5});
  CHECK(ReadTruthTsv(WriteTruthTsv(Reference())) == Reference());
  CHECK(CodeOf([] { ReadTruthTsv("a\t1\n"); }) == ErrorCode::kParse);
  CHECK(CodeOf([] { ReadTruthTsv("a\t2\t1\n"); }) == ErrorCode::kParse);
}

TEST_CASE("corpus pairing is ordered") {
  std::vector<std::pair<WordAlignment, std::vector<TruthWord>>> items;
  for (int i = 0; i < 9; ++i) {
    std::vector<TruthWord> ref = Reference();
    for (TruthWord &w : ref) w.start_sec += 0.01 * i;
    WordAlignment a = MakeAlignment(Reference());
    a.utt_id = "u" + std::to_string(i);
    items.push_back({a, ref});
  }
  std::vector<WordError> one = PairCorpus(items, 1), four = PairCorpus(items, 4);
  CHECK(one == four);
  REQUIRE(one.size() == 27);
  CHECK(one[26].utt_id == "u8");
  items[5].second.pop_back();
  CHECK(CodeOf([&] { PairCorpus(items, 3); }) == ErrorCode::kWordMismatch);
}
