// src/pipeline.cc

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

#include "lyralign/pipeline.h"

#include <cmath>
#include <filesystem>
#include <functional>
#include <optional>

#include "json.hpp"
#include "lyralign/audio.h"
#include "lyralign/io-util.h"
#include "lyralign/parallel.h"

namespace lyralign {

namespace fs = std::filesystem;

namespace {

std::string Num(double v) { return FormatShortest(v); }

bool ToBool(std::string_view s, bool *out) {
  if (s == "1" || s == "true" || s == "yes") *out = true;
  else if (s == "0" || s == "false" || s == "no") *out = false;
  else return false;
  return true;
}

bool ToInt(std::string_view s, int32 *out) {
  long long v;
  if (!ParseInt(s, &v) || v < INT32_MIN || v > INT32_MAX) return false;
  *out = static_cast<int32>(v);
  return true;
}

bool ToReal(std::string_view s, double *out) { return ParseDouble(s, out) && std::isfinite(*out); }

struct Field {
  const char *name;
  std::function<bool(PipelineConfig *, std::string_view)> set;
  std::function<std::string(const PipelineConfig &)> get;
};

template <typename T>
Field IntField(const char *name, T PipelineConfig::*member) {
  return {name,
          [member](PipelineConfig *c, std::string_view v) {
            int32 x;
            if (!ToInt(v, &x)) return false;
            c->*member = x;
            return true;
          },
          [member](const PipelineConfig &c) { return std::to_string(c.*member); }};
}

Field RealField(const char *name, double PipelineConfig::*member) {
  return {name,
          [member](PipelineConfig *c, std::string_view v) { return ToReal(v, &(c->*member)); },
          [member](const PipelineConfig &c) { return Num(c.*member); }};
}

Field BoolField(const char *name, bool PipelineConfig::*member) {
  return {name,
          [member](PipelineConfig *c, std::string_view v) { return ToBool(v, &(c->*member)); },
          [member](const PipelineConfig &c) { return std::string(c.*member ? "1" : "0"); }};
}

const std::vector<Field> &Fields() {
  static const std::vector<Field> fields = {
      {"features",
       [](PipelineConfig *c, std::string_view v) {
         c->features = std::string(Trim(v));
         return !c->features.empty();
       },
       [](const PipelineConfig &c) { return c.features; }},
      BoolField("cmvn", &PipelineConfig::cmvn),
      IntField("delta_window", &PipelineConfig::delta_window),
      {"speed_perturb",
       [](PipelineConfig *c, std::string_view v) {
         c->speed_perturb.clear();
         if (Trim(v) == "none") return true;
         try {
           c->speed_perturb = ParseNumberList(v);
         } catch (const Error &) {
           return false;
         }
         return true;
       },
       [](const PipelineConfig &c) {
         if (c.speed_perturb.empty()) return std::string("none");
         std::string s;
         for (double f : c.speed_perturb) s += (s.empty() ? "" : ",") + Num(f);
         return s;
       }},
      IntField("max_vowel_repeat", &PipelineConfig::max_vowel_repeat),
      IntField("gaussians", &PipelineConfig::gaussians),
      IntField("em_iterations", &PipelineConfig::em_iterations),
      {"mixup_iterations",
       [](PipelineConfig *c, std::string_view v) {
         c->mixup_iterations.clear();
         if (Trim(v) == "none") return true;
         for (const std::string &tok : SplitString(v, ',')) {
           int32 x;
           if (!ToInt(Trim(tok), &x)) return false;
           c->mixup_iterations.push_back(x);
         }
         return true;
       },
       [](const PipelineConfig &c) {
         if (c.mixup_iterations.empty()) return std::string("none");
         std::string s;
         for (int32 i : c.mixup_iterations) s += (s.empty() ? "" : ",") + std::to_string(i);
         return s;
       }},
      IntField("mus_min_frames", &PipelineConfig::mus_min_frames),
      IntField("mlp_hidden", &PipelineConfig::mlp_hidden),
      IntField("mlp_layers", &PipelineConfig::mlp_layers),
      IntField("splice", &PipelineConfig::splice),
      IntField("subsample", &PipelineConfig::subsample),
      RealField("mlp_lr", &PipelineConfig::mlp_lr),
      IntField("mlp_epochs", &PipelineConfig::mlp_epochs),
      IntField("mlp_batch", &PipelineConfig::mlp_batch),
      {"adapt_grid",
       [](PipelineConfig *c, std::string_view v) {
         c->adapt_grid.clear();
         for (const std::string &tok : SplitString(v, ',')) {
           std::vector<std::string> p = SplitString(Trim(tok), ':');
           AdaptConfig a;
           if (p.size() != 2 || !ToReal(p[0], &a.lr_multiplier) || !ToInt(p[1], &a.epochs))
             return false;
           c->adapt_grid.push_back(a);
         }
         return true;
       },
       [](const PipelineConfig &c) {
         std::string s;
         for (const AdaptConfig &a : c.adapt_grid)
           s += (s.empty() ? "" : ",") + Num(a.lr_multiplier) + ":" + std::to_string(a.epochs);
         return s;
       }},
      IntField("adapt_frozen_layers", &PipelineConfig::adapt_frozen_layers),
      IntField("adapt_label_passes", &PipelineConfig::adapt_label_passes),
      RealField("map_tau", &PipelineConfig::map_tau),
      BoolField("sil", &PipelineConfig::sil),
      BoolField("mus", &PipelineConfig::mus),
      BoolField("oov_as_spn", &PipelineConfig::oov_as_spn),
      RealField("beam", &PipelineConfig::beam),
      RealField("tolerance", &PipelineConfig::tolerance),
      {"seed",
       [](PipelineConfig *c, std::string_view v) {
         long long x;
         if (!ParseInt(v, &x) || x < 0) return false;
         c->seed = static_cast<uint64_t>(x);
         return true;
       },
       [](const PipelineConfig &c) { return std::to_string(c.seed); }},
  };
  return fields;
}

FeatureConfig FeaturesFromName(const std::string &name) {
  return name.starts_with("C") ? FeatureConfig::FromPreset(name) : FeatureConfig::FromGroups(name);
}

std::string FactorTag(double factor) { return factor == 1.0 ? "" : ".sp" + Num(factor); }

AudioBuffer DecodeBytes(const std::string &bytes) {
  return DecodeWav({reinterpret_cast<const std::uint8_t *>(bytes.data()), bytes.size()});
}

std::vector<double> Factors(const PipelineConfig &config) {
  std::vector<double> f = {1.0};
  f.insert(f.end(), config.speed_perturb.begin(), config.speed_perturb.end());
  return f;
}

std::vector<std::pair<int32, int32>> TruthSpans(const std::vector<TruthWord> &truth,
                                                int32 num_frames) {
  std::vector<std::pair<int32, int32>> spans;
  for (const TruthWord &w : truth) {
    int32 a = static_cast<int32>(std::lround(w.start_sec * 100.0));
    int32 b = static_cast<int32>(std::lround(w.end_sec * 100.0));
    a = std::clamp(a, 0, num_frames - 1);
    b = std::clamp(b, a + 1, num_frames);
    spans.emplace_back(a, b);
  }
  return spans;
}

int32 CountWords(const std::vector<LyricsLine> &lines) {
  int32 n = 0;
  for (const LyricsLine &l : lines) n += static_cast<int32>(l.words.size());
  return n;
}

}  // namespace

std::vector<double> ParseNumberList(std::string_view text) {
  std::vector<double> out;
  for (const std::string &tok : SplitString(text, ',')) {
    double v;
    if (!ToReal(Trim(tok), &v)) Fail(ErrorCode::kInvalidArgument, "bad number '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Config.

void PipelineConfig::Set(std::string_view key, std::string_view value) {
  for (const Field &f : Fields()) {
    if (key != f.name) continue;
    if (!f.set(this, Trim(value)))
      Fail(ErrorCode::kConfig, "bad value for '" + std::string(key) + "': '" + std::string(value) + "'");
    return;
  }
  Fail(ErrorCode::kConfig, "unknown config key '" + std::string(key) + "'");
}

PipelineConfig PipelineConfig::Parse(std::string_view text) {
  PipelineConfig c;
  std::vector<std::string> seen;
  int line_no = 0;
  for (const std::string &raw : SplitString(text, '\n')) {
    ++line_no;
    std::string_view line = Trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const std::string where = "config line " + std::to_string(line_no) + ": ";
    size_t eq = line.find('=');
    if (eq == std::string_view::npos) Fail(ErrorCode::kConfig, where + "expected key=value");
    std::string key(Trim(line.substr(0, eq)));
    if (std::find(seen.begin(), seen.end(), key) != seen.end())
      Fail(ErrorCode::kConfig, where + "repeated key '" + key + "'");
    seen.push_back(key);
    try {
      c.Set(key, line.substr(eq + 1));
    } catch (const Error &e) {
      Fail(ErrorCode::kConfig, where + e.what());
    }
  }
  c.Validate();
  return c;
}

void PipelineConfig::Validate() const {
  auto need = [](bool ok, const char *what) {
    if (!ok) Fail(ErrorCode::kConfig, std::string("config: ") + what);
  };
  try {
    NetworkFeatures();
  } catch (const Error &e) {
    Fail(ErrorCode::kConfig, std::string("config: features: ") + e.what());
  }
  need(delta_window >= 1, "delta_window must be >= 1");
  for (double f : speed_perturb) need(f > 0.0 && f != 1.0, "speed_perturb factors must be positive and not 1");
  need(max_vowel_repeat >= 1, "max_vowel_repeat must be >= 1");
  need(gaussians >= 1, "gaussians must be >= 1");
  need(em_iterations >= 0, "em_iterations must be >= 0");
  for (int32 i : mixup_iterations) need(i >= 1, "mixup_iterations must be >= 1");
  need(mus_min_frames >= 1, "mus_min_frames must be >= 1");
  need(mlp_hidden >= 1 && mlp_layers >= 0, "bad network shape");
  need(splice >= 0 && subsample >= 1, "bad splice or subsample");
  need(mlp_lr > 0.0 && mlp_epochs >= 0 && mlp_batch >= 1, "bad network training options");
  need(!adapt_grid.empty(), "adapt_grid is empty");
  for (const AdaptConfig &a : adapt_grid)
    need(a.lr_multiplier > 0.0 && a.epochs >= 1, "adapt_grid cells need multiplier > 0 and epochs >= 1");
  need(adapt_frozen_layers >= 0 && adapt_frozen_layers <= mlp_layers + 1, "bad adapt_frozen_layers");
  need(map_tau > 0.0, "map_tau must be > 0");
  need(adapt_label_passes >= 0, "adapt_label_passes must be >= 0");
  need(beam >= 0.0, "beam must be >= 0");
  need(tolerance >= 0.0, "tolerance must be >= 0");
}

std::string PipelineConfig::ToString() const {
  std::string out;
  for (const Field &f : Fields()) out += std::string(f.name) + "=" + f.get(*this) + "\n";
  return out;
}

std::string PipelineConfig::Hash() const { return ShortHash(ToString()); }

FeatureConfig PipelineConfig::NetworkFeatures() const {
  FeatureConfig f = FeaturesFromName(features);
  f.cmvn = cmvn;
  f.delta_window = delta_window;
  return f;
}

FeatureConfig PipelineConfig::GmmFeatures() const {
  FeatureConfig f = GmmFeatureConfig(cmvn);
  f.delta_window = delta_window;
  return f;
}

MlpConfig PipelineConfig::MlpShape() const { return {mlp_hidden, mlp_layers, splice, subsample}; }

MlpTrainOptions PipelineConfig::MlpTraining() const {
  MlpTrainOptions o;
  o.lr = mlp_lr;
  o.epochs = mlp_epochs;
  o.batch = mlp_batch;
  o.seed = seed;
  return o;
}

EmOptions PipelineConfig::Em(int32 workers) const {
  EmOptions o;
  o.iterations = em_iterations;
  o.mixup_iterations = mixup_iterations;
  o.max_gaussians = gaussians;
  o.graph.sil = sil;
  o.workers = workers;
  return o;
}

AlignOptions PipelineConfig::Align() const {
  AlignOptions o;
  o.graph = {.sil = sil, .mus = mus, .oov_as_spn = oov_as_spn};
  o.beam = beam;
  return o;
}

HmmTopology PipelineConfig::Topology() const {
  HmmTopology t;
  t.mus_min_frames = mus_min_frames;
  return t;
}

PipelineConfig LoadConfig(const std::string &path) {
  return PipelineConfig::Parse(ReadFileToString(path));
}

// ---------------------------------------------------------------------------
// Manifest.

std::vector<ManifestRow> ParseManifest(std::string_view text, const std::string &base_dir) {
  std::vector<ManifestRow> rows;
  int line_no = 0;
  auto resolve = [&](const std::string &p) {
    fs::path path(p);
    return (path.is_absolute() ? path : fs::path(base_dir) / path).lexically_normal().string();
  };
  for (const std::string &raw : SplitString(text, '\n')) {
    ++line_no;
    std::string line(Trim(raw));
    if (line.empty() || line[0] == '#') continue;
    const std::string where = "manifest line " + std::to_string(line_no) + ": ";
    std::vector<std::string> f = SplitString(line, '\t');
    if (f.size() < 3 || f.size() > 4)
      Fail(ErrorCode::kConfig, where + "expected id, audio, lyrics and optional truth");
    ManifestRow r{f[0], resolve(f[1]), resolve(f[2]), f.size() == 4 ? resolve(f[3]) : ""};
    if (r.id.empty() || r.id.find_first_not_of("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
                                               "0123456789._-") != std::string::npos)
      Fail(ErrorCode::kConfig, where + "bad utterance id '" + r.id + "'");
    for (const ManifestRow &o : rows)
      if (o.id == r.id) Fail(ErrorCode::kConfig, where + "duplicate id '" + r.id + "'");
    for (const std::string *p : {&r.audio, &r.lyrics, &r.truth})
      if (!p->empty() && !FileExists(*p)) Fail(ErrorCode::kIo, where + "missing file " + *p);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ManifestRow> ReadManifest(const std::string &path) {
  return ParseManifest(ReadFileToString(path), fs::path(path).parent_path().string());
}

// ---------------------------------------------------------------------------
// Stages.

std::string GmmFeaturePath(const std::string &dir, const std::string &id, double factor) {
  return (fs::path(dir) / (id + FactorTag(factor) + ".gmm.lyf")).string();
}

std::string NetworkFeaturePath(const std::string &dir, const std::string &id, double factor) {
  return (fs::path(dir) / (id + FactorTag(factor) + ".feat.lyf")).string();
}

StageResult ExtractFeatures(const std::vector<ManifestRow> &rows, const PipelineConfig &config,
                            const std::string &feat_dir, int32 workers) {
  fs::create_directories(feat_dir);
  const FeatureConfig gmm_cfg = config.GmmFeatures(), nn_cfg = config.NetworkFeatures();
  const bool same = gmm_cfg.CanonicalString() == nn_cfg.CanonicalString();
  const std::vector<double> factors = Factors(config);
  std::string factor_list;
  for (double f : factors) factor_list += Num(f) + ",";
  const int32 n = static_cast<int32>(rows.size());
  std::vector<int> state(n, 0);  // 1 extracted, 2 skipped
  std::vector<std::string> err(n);
  ParallelFor(n, workers, [&](int32 i) {
    const ManifestRow &r = rows[i];
    try {
      const std::string bytes = ReadFileToString(r.audio);
      const std::string key = ShortHash("audio=" + Sha256Hex(bytes) + "\ngmm:" +
                                        gmm_cfg.CanonicalString() + "\nnn:" +
                                        nn_cfg.CanonicalString() + "\nspeed=" + factor_list);
      const std::string key_path = (fs::path(feat_dir) / (r.id + ".key")).string();
      bool fresh = FileExists(key_path) && ReadFileToString(key_path) == key + "\n";
      for (double f : factors)
        fresh = fresh && FileExists(GmmFeaturePath(feat_dir, r.id, f)) &&
                FileExists(NetworkFeaturePath(feat_dir, r.id, f));
      if (fresh) {
        state[i] = 2;
        return;
      }
      const AudioBuffer audio = Canonicalize(DecodeBytes(bytes));
      for (double f : factors) {
        const AudioBuffer buf = f == 1.0 ? audio : SpeedPerturb(audio, f);
        FeatureMatrix gmm = ComputeFeatures(buf, gmm_cfg);
        WriteLyfFile(GmmFeaturePath(feat_dir, r.id, f), gmm);
        WriteLyfFile(NetworkFeaturePath(feat_dir, r.id, f), same ? gmm : ComputeFeatures(buf, nn_cfg));
      }
      WriteStringToFile(key_path, key + "\n");
      state[i] = 1;
    } catch (const std::exception &e) {
      err[i] = e.what();
    }
  });
  StageResult res;
  for (int32 i = 0; i < n; ++i) {
    if (state[i] == 1) ++res.done;
    else if (state[i] == 2) ++res.skipped;
    else res.failures.emplace_back(rows[i].id, err[i]);
  }
  return res;
}

std::vector<UttData> LoadUtterances(const std::vector<ManifestRow> &rows,
                                    const PipelineConfig &config, const std::string &feat_dir,
                                    bool perturbed) {
  const std::vector<double> factors = perturbed ? Factors(config) : std::vector<double>{1.0};
  const int32 n = static_cast<int32>(rows.size());
  std::vector<std::vector<UttData>> parts(n);
  ParallelFor(n, 1, [&](int32 i) {
    const ManifestRow &r = rows[i];
    std::vector<LyricsLine> lines = NormalizeLyrics(ReadFileToString(r.lyrics));
    std::vector<TruthWord> truth;
    if (!r.truth.empty()) truth = ReadTruthTsv(ReadFileToString(r.truth));
    for (double f : factors) {
      UttData u;
      u.id = r.id + FactorTag(f);
      u.lines = lines;
      u.gmm = ReadLyfFile(GmmFeaturePath(feat_dir, r.id, f));
      u.nn = ReadLyfFile(NetworkFeaturePath(feat_dir, r.id, f));
      if (u.gmm.NumFrames() != u.nn.NumFrames())
        Fail(ErrorCode::kDimensionMismatch, u.id + ": GMM and network features differ in length");
      if (f == 1.0) u.truth = truth;
      parts[i].push_back(std::move(u));
    }
  });
  std::vector<UttData> out;
  for (auto &p : parts)
    for (auto &u : p) out.push_back(std::move(u));
  return out;
}

Lexicon LoadLexicon(const std::string &dict_path, const PipelineConfig &config) {
  return DurationVariants(ReadDictionaryFile(dict_path), config.max_vowel_repeat);
}

std::vector<int32> LabelFrames(const AcousticModel &model, const Lexicon &lex, const UttData &u,
                               const PipelineConfig &config) {
  AlignGraph g = BuildGraph(u.lines, lex, model, config.Align().graph);
  if (!u.truth.empty() && static_cast<int32>(u.truth.size()) == CountWords(u.lines)) {
    try {
      return AlignWithGmm(model, g, u.gmm, TruthSpans(u.truth, u.gmm.NumFrames())).pdfs;
    } catch (const Error &e) {
      if (e.code() != ErrorCode::kNoAdmissiblePath) throw;
    }
  }
  return AlignWithGmm(model, g, u.gmm).pdfs;
}

TrainOutput TrainModel(const std::vector<UttData> &utts, const Lexicon &lex,
                       const PipelineConfig &config, bool gmm_only, int32 workers) {
  if (utts.empty()) Fail(ErrorCode::kEmptyInput, "no training utterances");
  std::vector<FeatureMatrix> feats;
  std::vector<std::vector<LyricsLine>> transcripts;
  std::vector<std::string> oov;
  for (const UttData &u : utts) {
    for (const std::string &w : OovReport(lex, u.lines))
      if (std::find(oov.begin(), oov.end(), w) == oov.end()) oov.push_back(w);
    feats.push_back(u.gmm);
    transcripts.push_back(u.lines);
  }
  if (!oov.empty()) {
    std::string list;
    for (const std::string &w : oov) list += " " + w;
    Fail(ErrorCode::kOutOfVocabulary, "words missing from the lexicon:" + list);
  }

  TrainOutput out;
  out.model = FlatStart(feats, transcripts, lex, config.Topology());
  out.em = EmTrain(&out.model, feats, transcripts, lex, config.Em(workers));
  for (size_t i = 0; i < out.em.log_likelihood.size(); ++i) {
    nlohmann::ordered_json j;
    j["stage"] = "em";
    j["pass"] = i;
    j["log_likelihood"] = out.em.log_likelihood[i];
    j["empty_pdfs"] = out.em.empty_pdfs.size() > i ? out.em.empty_pdfs[i].size() : 0;
    out.report += j.dump() + "\n";
  }

  // Frames outside every annotated word feed the interlude model.
  std::vector<std::span<const float>> non_vocal;
  for (const UttData &u : utts) {
    if (u.truth.empty()) continue;
    std::vector<bool> vocal(u.gmm.NumFrames(), false);
    for (const auto &[a, b] : TruthSpans(u.truth, u.gmm.NumFrames()))
      std::fill(vocal.begin() + a, vocal.begin() + b, true);
    for (int32 t = 0; t < u.gmm.NumFrames(); ++t)
      if (!vocal[t]) non_vocal.push_back(u.gmm.Row(t));
  }
  if (!non_vocal.empty()) TrainMusFiller(&out.model, non_vocal, config.gaussians);

  if (!gmm_only) {
    std::vector<std::vector<int32>> labels(utts.size());
    ParallelFor(static_cast<int32>(utts.size()), workers, [&](int32 i) {
      labels[i] = LabelFrames(out.model, lex, utts[i], config);
    });
    std::vector<FeatureMatrix> nn;
    for (const UttData &u : utts) nn.push_back(u.nn);
    Mlp net(nn[0].Dim(), nn[0].LayoutString(), out.model.NumPdfs(), config.MlpShape(), config.seed);
    out.mlp = TrainMlp(&net, nn, labels, config.MlpTraining());
    out.model.SetMlp(std::move(net));
    for (size_t e = 0; e < out.mlp.loss.size(); ++e) {
      nlohmann::ordered_json j;
      j["stage"] = "mlp";
      j["epoch"] = e + 1;
      j["loss"] = out.mlp.loss[e];
      j["accuracy"] = out.mlp.accuracy[e];
      out.report += j.dump() + "\n";
    }
  }
  out.model.SetInfo("config", config.Hash());
  return out;
}

EvalReport EvaluateModel(const AcousticModel &model, const Lexicon &lex,
                         const std::vector<UttData> &utts, const PipelineConfig &config,
                         int32 workers) {
  const AlignOptions opts = config.Align();
  std::vector<std::pair<WordAlignment, std::vector<TruthWord>>> items(utts.size());
  std::vector<bool> keep(utts.size(), false);
  ParallelFor(static_cast<int32>(utts.size()), workers, [&](int32 i) {
    const UttData &u = utts[i];
    if (u.truth.empty()) return;
    AlignGraph g = BuildGraph(u.lines, lex, model, opts.graph);
    items[i].first = ViterbiAlign(g, model, &u.gmm, &u.nn, opts);
    items[i].first.utt_id = u.id;
    items[i].second = u.truth;
    keep[i] = true;
  });
  std::vector<std::pair<WordAlignment, std::vector<TruthWord>>> scored;
  for (size_t i = 0; i < items.size(); ++i)
    if (keep[i]) scored.push_back(std::move(items[i]));
  EvalReport r = Aggregate(PairCorpus(scored, 1), config.tolerance);
  r.header = {{"config", config.Hash()}, {"model", ModelHash(model)}};
  return r;
}

std::string AdaptGridResult::ToJson() const {
  auto summary = [](const EvalReport &r) {
    nlohmann::ordered_json j;
    j["n_words"] = r.n_words;
    j["mean_ae_sec"] = r.mean_ae_sec;
    j["median_ae_sec"] = r.median_ae_sec;
    j["std_ae_sec"] = r.std_ae_sec;
    j["pct_correct"] = r.pct_correct;
    return j;
  };
  nlohmann::ordered_json j;
  j["unadapted"] = summary(unadapted);
  nlohmann::ordered_json cells_json = nlohmann::ordered_json::array();
  for (size_t i = 0; i < cells.size(); ++i) {
    nlohmann::ordered_json c;
    c["name"] = cells[i].name;
    c["lr_multiplier"] = cells[i].cfg.lr_multiplier;
    c["epochs"] = cells[i].cfg.epochs;
    c["model"] = ModelHash(cells[i].model);
    c["dev"] = summary(cells[i].dev);
    c["best"] = static_cast<int32>(i) == best;
    cells_json.push_back(std::move(c));
  }
  j["cells"] = std::move(cells_json);
  j["best"] = best >= 0 ? cells[best].name : "";
  return j.dump(1) + "\n";
}

AdaptGridResult AdaptGrid(const AcousticModel &model, const Lexicon &lex,
                          const std::vector<UttData> &adapt, const std::vector<UttData> &dev,
                          const PipelineConfig &config, int32 workers) {
  if (adapt.empty()) Fail(ErrorCode::kEmptyInput, "adaptation set is empty");
  AdaptGridResult res;
  res.unadapted = EvaluateModel(model, lex, dev, config, workers);

  // Labels come from the GMM after MAP passes on the adaptation data, so
  // the frame targets follow the shifted domain rather than the source one.
  std::vector<FeatureMatrix> gmm_feats;
  for (const UttData &u : adapt) gmm_feats.push_back(u.gmm);
  AcousticModel labeller = model;
  std::vector<std::vector<int32>> labels(adapt.size());
  for (int32 pass = 0; pass <= config.adapt_label_passes; ++pass) {
    ParallelFor(static_cast<int32>(adapt.size()), workers, [&](int32 i) {
      labels[i] = LabelFrames(labeller, lex, adapt[i], config);
    });
    if (pass < config.adapt_label_passes)
      labeller = MapAdaptGmm(labeller, gmm_feats, labels, config.map_tau);
  }

  if (!model.HasMlp()) {
    AdaptCell cell{{}, "MAP", MapAdaptGmm(labeller, gmm_feats, labels, config.map_tau), {}};
    cell.model.SetInfo("adapt", "MAP");
    cell.dev = EvaluateModel(cell.model, lex, dev, config, workers);
    res.cells.push_back(std::move(cell));
  } else {
    std::vector<FeatureMatrix> nn;
    for (const UttData &u : adapt) nn.push_back(u.nn);
    MlpTrainOptions opts = config.MlpTraining();
    opts.frozen_layers = config.adapt_frozen_layers;
    res.cells.resize(config.adapt_grid.size());
    ParallelFor(static_cast<int32>(config.adapt_grid.size()), workers, [&](int32 i) {
      AdaptCell &cell = res.cells[i];
      cell.cfg = config.adapt_grid[i];
      cell.name = cell.cfg.Name();
      cell.model = model;
      AdaptMlp(&cell.model.MutableMlp(), nn, labels, cell.cfg, opts);
      cell.model.SetInfo("adapt", cell.name);
      cell.dev = EvaluateModel(cell.model, lex, dev, config, 1);
    });
  }
  for (size_t i = 0; i < res.cells.size(); ++i)
    if (res.best < 0 || res.cells[i].dev.mean_ae_sec < res.cells[res.best].dev.mean_ae_sec)
      res.best = static_cast<int32>(i);
  return res;
}

AlignCorpusResult AlignManifest(const std::vector<ManifestRow> &rows, const AcousticModel &model,
                                const Lexicon &lex, const PipelineConfig &config,
                                const std::string &feat_dir, const std::string &out_dir,
                                int32 workers) {
  if (!out_dir.empty()) fs::create_directories(out_dir);
  std::vector<CorpusUtterance> utts;
  for (const ManifestRow &r : rows) utts.push_back({r.id, r.audio, r.lyrics});
  FeatureSource source = [&](const CorpusUtterance &u) {
    return std::make_pair(ReadLyfFile(GmmFeaturePath(feat_dir, u.id)),
                          ReadLyfFile(NetworkFeaturePath(feat_dir, u.id)));
  };
  const AlignOptions opts = config.Align();
  std::vector<std::pair<std::string, std::string>> header = {
      {"config", config.Hash()}, {"model", ModelHash(model)},
      {"sil", opts.graph.sil ? "1" : "0"}, {"mus", opts.graph.mus ? "1" : "0"},
      {"decoder", model.HasMlp() && opts.use_mlp ? "hybrid" : "gmm"}};
  return AlignCorpus(utts, model, lex, opts, source, workers, out_dir, header);
}

ScoreOutput ScoreManifest(const std::vector<ManifestRow> &rows, const std::string &align_dir,
                          const PipelineConfig &config, int32 workers) {
  const int32 n = static_cast<int32>(rows.size());
  std::vector<std::vector<WordError>> parts(n);
  std::vector<std::string> err(n), model_hash(n);
  ParallelFor(n, workers, [&](int32 i) {
    const ManifestRow &r = rows[i];
    try {
      if (r.truth.empty()) Fail(ErrorCode::kInvalidArgument, "no reference annotation");
      WordAlignment a = ReadAlignmentTsv(
          ReadFileToString((fs::path(align_dir) / (r.id + ".align.tsv")).string()));
      for (const auto &[k, v] : a.header)
        if (k == "model") model_hash[i] = v;
      a.utt_id = r.id;
      parts[i] = PairWords(a, ReadTruthTsv(ReadFileToString(r.truth)));
    } catch (const std::exception &e) {
      err[i] = e.what();
      if (err[i].empty()) err[i] = "failed";
    }
  });
  ScoreOutput out;
  std::vector<WordError> words;
  std::string model;
  for (int32 i = 0; i < n; ++i) {
    if (!err[i].empty()) {
      out.failures.emplace_back(rows[i].id, err[i]);
      continue;
    }
    words.insert(words.end(), parts[i].begin(), parts[i].end());
    if (model.empty()) model = model_hash[i];
    else if (model != model_hash[i]) model = "mixed";
  }
  if (words.empty()) Fail(ErrorCode::kEmptyInput, "no scorable utterances");
  out.report = Aggregate(words, config.tolerance);
  out.report.header = {{"config", config.Hash()}, {"model", model.empty() ? "unknown" : model}};
  return out;
}

}  // namespace lyralign
