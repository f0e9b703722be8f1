// tools/lyralign.cc

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

// lyralign: feature extraction, training, adaptation, alignment and scoring
// of sung lyrics.  Run `lyralign <command> --help` for the options.

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "lyralign/io-util.h"
#include "lyralign/parallel.h"
#include "lyralign/pipeline.h"

namespace fs = std::filesystem;
using namespace lyralign;

namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  int32 workers = 1;
  bool quiet = false;
};

void AddCommon(CLI::App *cmd, Common *c) {
  cmd->add_option("--config", c->config_path, "key=value config file; defaults apply otherwise");
  cmd->add_option("--set", c->overrides, "override one config key, e.g. --set mus=1");
  cmd->add_option("--workers", c->workers, "worker threads (LYRALIGN_WORKERS takes precedence)")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--quiet", c->quiet, "suppress progress messages");
}

PipelineConfig ResolveConfig(const Common &c) {
  PipelineConfig cfg = c.config_path.empty() ? PipelineConfig() : LoadConfig(c.config_path);
  for (const std::string &kv : c.overrides) {
    size_t eq = kv.find('=');
    if (eq == std::string::npos) Fail(ErrorCode::kConfig, "--set expects key=value, got '" + kv + "'");
    cfg.Set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.Validate();
  return cfg;
}

int Report(const char *what, int32 done, int32 skipped,
           const std::vector<std::pair<std::string, std::string>> &failures) {
  for (const auto &[id, msg] : failures) std::cerr << "FAILED " << id << ": " << msg << "\n";
  std::cout << what << ": " << done << " done, " << skipped << " skipped, " << failures.size()
            << " failed\n";
  return failures.empty() ? 0 : 1;
}

void WriteConfigEcho(const std::string &dir, const PipelineConfig &cfg) {
  fs::create_directories(dir);
  WriteStringToFile((fs::path(dir) / "config.effective").string(),
                    "# config=" + cfg.Hash() + "\n" + cfg.ToString());
}

// Hash over everything that determines a trained or adapted model.
std::string InputKey(const PipelineConfig &cfg, const std::vector<ManifestRow> &rows,
                     const std::string &feat_dir, const std::string &extra) {
  std::string s = cfg.ToString() + extra + "\n";
  for (const ManifestRow &r : rows) {
    const std::string key = (fs::path(feat_dir) / (r.id + ".key")).string();
    s += r.id + " " + (FileExists(key) ? ReadFileToString(key) : "?\n");
    s += Sha256Hex(ReadFileToString(r.lyrics)) + " ";
    s += (r.truth.empty() ? "-" : Sha256Hex(ReadFileToString(r.truth))) + "\n";
  }
  return ShortHash(s);
}

std::string CellFileName(const std::string &name) {
  std::string f = name;
  for (char &c : f)
    if (c == ',') c = '_';
  return f + ".lyam";
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Lyrics-to-audio forced alignment toolkit"};
  app.require_subcommand(1);
  Common common;
  std::string manifest, feat_dir, dict, model_path, out, out_dir, dev_manifest, align_dir,
      baseline, edges_text;
  std::vector<std::string> reports;
  bool gmm_only = false;
  double tolerance = -1.0;

  CLI::App *extract = app.add_subcommand(
      "extract", "Compute <id>.gmm.lyf (39-dim MFCC) and <id>.feat.lyf (configured groups); "
                 "rows whose audio and feature config are unchanged are skipped");
  CLI::App *train = app.add_subcommand(
      "train", "Flat start, Viterbi EM (defaults: 10 passes, up to 4 Gaussians per state), "
               "then the hybrid network (2x256 hidden, splice +-4, subsample 3)");
  CLI::App *adapt = app.add_subcommand(
      "adapt", "Fine-tune the network on in-domain data over the grid "
               "{LR, 0.5LR} x {1, 2, 3} epochs and pick the cell with the lowest dev mean AE");
  CLI::App *align = app.add_subcommand("align", "Write <id>.align.tsv word boundaries");
  CLI::App *score = app.add_subcommand(
      "score", "Mean, median and std of word-start errors and %correct (default 0.25 s)");
  CLI::App *plot = app.add_subcommand(
      "plot", "Error histogram CSV per report (default edges 0,0.1,0.25,0.5,1,2,5 and overflow)");
  for (CLI::App *cmd : {extract, train, adapt, align, score, plot}) AddCommon(cmd, &common);

  for (CLI::App *cmd : {extract, train, adapt, align, score})
    cmd->add_option("--manifest", manifest, "TSV: id, audio, lyrics[, truth]")->required();
  for (CLI::App *cmd : {extract, train, adapt, align})
    cmd->add_option("--feat-dir", feat_dir, "feature directory")->required();
  for (CLI::App *cmd : {train, adapt, align})
    cmd->add_option("--dict", dict, "pronunciation dictionary")->required();
  for (CLI::App *cmd : {adapt, align})
    cmd->add_option("--model", model_path, "LYAM1 model")->required();
  train->add_option("--out", out, "output model path")->required();
  train->add_flag("--gmm-only", gmm_only, "stop after GMM training");
  adapt->add_option("--dev", dev_manifest, "annotated development manifest")->required();
  adapt->add_option("--out-dir", out_dir, "adapted models and grid.json")->required();
  align->add_option("--out-dir", out_dir, "alignment directory")->required();
  score->add_option("--align-dir", align_dir, "alignment directory")->required();
  score->add_option("--out", out, "report JSON path")->required();
  score->add_option("--tolerance", tolerance, "seconds; overrides the config value");
  score->add_option("--baseline", baseline, "report JSON to compare against");
  plot->add_option("--report", reports, "report JSON (repeatable)")->required();
  plot->add_option("--out-dir", out_dir, "histogram directory")->required();
  plot->add_option("--edges", edges_text, "comma-separated bin edges");

  CLI11_PARSE(app, argc, argv);
  try {
    SetQuiet(common.quiet);
    PipelineConfig cfg = ResolveConfig(common);
    if (tolerance >= 0.0) cfg.tolerance = tolerance;
    const int32 workers = WorkerCount(common.workers);

    if (*extract) {
      std::vector<ManifestRow> rows = ReadManifest(manifest);
      StageResult r = ExtractFeatures(rows, cfg, feat_dir, workers);
      return Report("extract", r.done, r.skipped, r.failures);
    }

    if (*train) {
      std::vector<ManifestRow> rows = ReadManifest(manifest);
      const std::string key = InputKey(cfg, rows, feat_dir,
                                       Sha256Hex(ReadFileToString(dict)) + (gmm_only ? " gmm" : " full"));
      if (FileExists(out) && LoadModel(out).Info("inputs") == key) {
        LogInfo("train: " + out + " is up to date");
        return Report("train", 0, 1, {});
      }
      Lexicon lex = LoadLexicon(dict, cfg);
      TrainOutput t = TrainModel(LoadUtterances(rows, cfg, feat_dir, true), lex, cfg, gmm_only, workers);
      t.model.SetInfo("inputs", key);
      SaveModel(out, t.model);
      WriteStringToFile(out + ".report.jsonl", "{\"config\":\"" + cfg.Hash() + "\",\"model\":\"" +
                                                   ModelHash(t.model) + "\"}\n" + t.report);
      std::cout << "model " << ModelHash(t.model) << " written to " << out << "\n";
      return Report("train", 1, 0, {});
    }

    if (*adapt) {
      std::vector<ManifestRow> rows = ReadManifest(manifest), dev_rows = ReadManifest(dev_manifest);
      AcousticModel model = LoadModel(model_path);
      const std::string key = InputKey(cfg, rows, feat_dir,
                                       ModelHash(model) + Sha256Hex(ReadFileToString(dict)) +
                                       InputKey(cfg, dev_rows, feat_dir, ""));
      const std::string grid_path = (fs::path(out_dir) / "grid.json").string();
      if (FileExists(grid_path) && FileExists(grid_path + ".key") &&
          ReadFileToString(grid_path + ".key") == key + "\n") {
        LogInfo("adapt: " + out_dir + " is up to date");
        return Report("adapt", 0, 1, {});
      }
      Lexicon lex = LoadLexicon(dict, cfg);
      AdaptGridResult g = AdaptGrid(model, lex, LoadUtterances(rows, cfg, feat_dir, false),
                                    LoadUtterances(dev_rows, cfg, feat_dir, false), cfg, workers);
      WriteConfigEcho(out_dir, cfg);
      for (const AdaptCell &c : g.cells) {
        SaveModel((fs::path(out_dir) / CellFileName(c.name)).string(), c.model);
        std::cout << c.name << "\tdev_mean_ae=" << FormatFixed(c.dev.mean_ae_sec, 4)
                  << (&c == &g.cells[g.best] ? "\tbest" : "") << "\n";
      }
      std::cout << "unadapted\tdev_mean_ae=" << FormatFixed(g.unadapted.mean_ae_sec, 4) << "\n";
      WriteStringToFile(grid_path, g.ToJson());
      WriteStringToFile(grid_path + ".key", key + "\n");
      return Report("adapt", static_cast<int32>(g.cells.size()), 0, {});
    }

    if (*align) {
      std::vector<ManifestRow> rows = ReadManifest(manifest);
      AcousticModel model = LoadModel(model_path);
      AlignCorpusResult r = AlignManifest(rows, model, LoadLexicon(dict, cfg), cfg, feat_dir,
                                          out_dir, workers);
      WriteConfigEcho(out_dir, cfg);
      return Report("align", static_cast<int32>(r.alignments.size()), 0, r.failures);
    }

    if (*score) {
      ScoreOutput s = ScoreManifest(ReadManifest(manifest), align_dir, cfg, workers);
      WriteStringToFile(out, ReportToJson(s.report));
      const EvalReport &r = s.report;
      std::cout << "words=" << r.n_words << " mean_ae=" << FormatFixed(r.mean_ae_sec, 4)
                << " median_ae=" << FormatFixed(r.median_ae_sec, 4)
                << " std_ae=" << FormatFixed(r.std_ae_sec, 4)
                << " pct_correct=" << FormatFixed(r.pct_correct, 2) << "\n";
      if (!baseline.empty())
        std::cout << FormatComparison(CompareReports(ReportFromJson(ReadFileToString(baseline)), r));
      return Report("score", static_cast<int32>(r.n_words), 0, s.failures);
    }

    if (*plot) {
      const std::vector<double> edges =
          edges_text.empty() ? DefaultHistogramEdges() : ParseNumberList(edges_text);
      fs::create_directories(out_dir);
      for (const std::string &path : reports) {
        EvalReport r = ReportFromJson(ReadFileToString(path));
        std::vector<double> errors;
        for (const WordError &w : r.words) errors.push_back(w.StartError());
        std::string head = "#";
        for (const auto &[k, v] : r.header) head += " " + k + "=" + v;
        const std::string csv = (fs::path(out_dir) / (fs::path(path).stem().string() + ".hist.csv")).string();
        WriteStringToFile(csv, head + "\n" + HistogramCsv(MakeHistogram(errors, edges)));
        std::cout << csv << "\n";
      }
      return Report("plot", static_cast<int32>(reports.size()), 0, {});
    }
  } catch (const Error &e) {
    std::cerr << "lyralign: " << ErrorCodeName(e.code()) << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "lyralign: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
