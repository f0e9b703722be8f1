// src/acoustic-model.cc

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

#include "lyralign/acoustic-model.h"

#include <cmath>

#include "lyralign/io-util.h"

namespace lyralign {

bool HmmTopology::IsFiller(std::string_view phone) {
  return phone == kSilPhone || phone == kMusPhone || phone == kSpnPhone;
}

int32 HmmTopology::NumStates(std::string_view phone) const {
  return IsFiller(phone) ? filler_states : phone_states;
}

AcousticModel::AcousticModel(const PhoneSet &phones, int32 dim, std::string gmm_layout,
                             const HmmTopology &topo)
    : topo_(topo), dim_(dim), gmm_layout_(std::move(gmm_layout)) {
  if (dim < 1 || topo.phone_states < 1 || topo.filler_states < 3 || topo.mus_min_frames < 1)
    Fail(ErrorCode::kInvalidArgument, "bad model dimensions or topology");
  for (const std::string &p : phones.Phones()) {
    const int32 phone = static_cast<int32>(phones_.size());
    phones_.push_back(p);
    phone_pdfs_.emplace_back();
    const int32 n = topo_.NumStates(p);
    for (int32 s = 0; s < n; ++s) {
      phone_pdfs_.back().push_back(NumPdfs());
      pdf_phone_.push_back(phone);
      pdf_state_.push_back(s);
      gmms_.emplace_back(std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0));
      const bool skip = HmmTopology::IsFiller(p) && s <= n - 2;
      trans_.push_back(skip ? std::array<double, 3>{1.0 / 3, 1.0 / 3, 1.0 / 3}
                            : std::array<double, 3>{0.5, 0.5, 0.0});
    }
  }
}

int32 AcousticModel::PhoneIndex(std::string_view phone) const {
  for (int32 i = 0; i < NumPhones(); ++i)
    if (phones_[i] == phone) return i;
  Fail(ErrorCode::kUnknownPhone, "phone not in model: " + std::string(phone));
}

bool AcousticModel::ArcAllowed(int32 pdf, ArcKind kind) const {
  if (kind != kArcSkip) return true;
  const std::string &phone = phones_[pdf_phone_[pdf]];
  const int32 n = static_cast<int32>(phone_pdfs_[pdf_phone_[pdf]].size());
  return HmmTopology::IsFiller(phone) && pdf_state_[pdf] <= n - 2;
}

double AcousticModel::TransitionLogProb(int32 pdf, ArcKind kind) const {
  double p = trans_[pdf][kind];
  return p > 0.0 ? std::log(p) : kLogZero;
}

void AcousticModel::SetTransitionsFromCounts(int32 pdf, const std::array<double, 3> &counts) {
  double total = 0.0;
  for (ArcKind k : {kArcSelf, kArcNext, kArcSkip})
    if (ArcAllowed(pdf, k)) total += counts[k];
  if (total <= 0.0) return;
  std::array<double, 3> p{0.0, 0.0, 0.0};
  double sum = 0.0;
  for (ArcKind k : {kArcSelf, kArcNext, kArcSkip})
    if (ArcAllowed(pdf, k)) {
      p[k] = std::max(counts[k] / total, kTransitionFloor);
      sum += p[k];
    }
  for (double &x : p) x /= sum;
  trans_[pdf] = p;
}

void AcousticModel::SetTransitions(int32 pdf, const std::array<double, 3> &probs) {
  double sum = 0.0;
  for (ArcKind k : {kArcSelf, kArcNext, kArcSkip}) {
    if (!ArcAllowed(pdf, k) && probs[k] != 0.0)
      Fail(ErrorCode::kInvalidArgument, "probability on a disallowed arc");
    if (probs[k] < 0.0) Fail(ErrorCode::kInvalidArgument, "negative transition probability");
    sum += probs[k];
  }
  if (std::abs(sum - 1.0) > 1e-9)
    Fail(ErrorCode::kInvalidArgument, "transition probabilities must sum to 1");
  trans_[pdf] = probs;
}

void AcousticModel::CopyPhone(std::string_view from, std::string_view to) {
  const auto &src = phone_pdfs_[PhoneIndex(from)];
  const auto &dst = phone_pdfs_[PhoneIndex(to)];
  if (src.size() != dst.size())
    Fail(ErrorCode::kInvalidArgument, "cannot copy between phones of different lengths");
  for (size_t s = 0; s < src.size(); ++s) {
    gmms_[dst[s]] = gmms_[src[s]];
    trans_[dst[s]] = trans_[src[s]];
  }
}

void AcousticModel::CheckGmmInput(const FeatureMatrix &feats) const {
  if (feats.Dim() != dim_ || feats.LayoutString() != gmm_layout_)
    Fail(ErrorCode::kDimensionMismatch, "features " + feats.LayoutString() +
                                            " do not match GMM input " + gmm_layout_);
}

EmissionMatrix AcousticModel::GmmEmissions(const FeatureMatrix &feats,
                                           const std::vector<int32> &pdfs) const {
  CheckGmmInput(feats);
  EmissionMatrix em = EmissionMatrix::Zero(feats.NumFrames(), NumPdfs());
  for (int32 t = 0; t < feats.NumFrames(); ++t) {
    auto row = feats.Row(t);
    for (int32 p : pdfs) em(t, p) = gmms_[p].LogLikelihood(row);
  }
  return em;
}

bool AcousticModel::IsValid() const {
  for (int32 p = 0; p < NumPdfs(); ++p) {
    if (!gmms_[p].IsValid()) return false;
    double s = trans_[p][0] + trans_[p][1] + trans_[p][2];
    if (std::abs(s - 1.0) > 1e-9) return false;
  }
  return true;
}

std::string AcousticModel::Info(std::string_view key) const {
  for (const auto &[k, v] : info_)
    if (k == key) return v;
  return "";
}

void AcousticModel::SetInfo(const std::string &key, const std::string &value) {
  if (key.empty() || value.empty() || key.find_first_of(" \t\n") != std::string::npos ||
      value.find_first_of(" \t\n") != std::string::npos)
    Fail(ErrorCode::kInvalidArgument, "model info entries are single non-empty tokens");
  for (auto &[k, v] : info_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  info_.emplace_back(key, value);
}

bool AcousticModel::operator==(const AcousticModel &o) const {
  return topo_ == o.topo_ && dim_ == o.dim_ && gmm_layout_ == o.gmm_layout_ &&
         phones_ == o.phones_ && phone_pdfs_ == o.phone_pdfs_ && gmms_ == o.gmms_ &&
         trans_ == o.trans_ && mlp_ == o.mlp_ && info_ == o.info_;
}

// ---------------------------------------------------------------------------
// LYAM1 text format.

namespace {

constexpr int kDigits = 17;

void AppendNumbers(std::string *out, const double *v, Eigen::Index n) {
  for (Eigen::Index i = 0; i < n; ++i) {
    *out += ' ';
    *out += FormatDouble(v[i], kDigits);
  }
}

void AppendVector(std::string *out, const char *key, const Eigen::VectorXd &v) {
  *out += key;
  AppendNumbers(out, v.data(), v.size());
  *out += '\n';
}

class LineReader {
 public:
  explicit LineReader(std::vector<std::string> lines) : lines_(std::move(lines)) { }

  /// Next line split into fields; its first field must be `key`.
  std::vector<std::string> Next(std::string_view key, size_t min_fields = 1) {
    if (pos_ >= lines_.size())
      Fail(ErrorCode::kTruncated, "LYAM1: file ends before '" + std::string(key) + "'");
    std::vector<std::string> f = SplitWhitespace(lines_[pos_++]);
    if (f.empty() || f[0] != key || f.size() < min_fields)
      Error("expected '" + std::string(key) + "'");
    return f;
  }
  [[noreturn]] void Error(const std::string &msg) const {
    Fail(ErrorCode::kParse, "LYAM1 line " + std::to_string(pos_) + ": " + msg);
  }
  long long Int(const std::string &s) const {
    long long v;
    if (!ParseInt(s, &v)) Error("bad integer '" + s + "'");
    return v;
  }
  double Real(const std::string &s) const {
    double v;
    if (!ParseDouble(s, &v) || !std::isfinite(v)) Error("bad number '" + s + "'");
    return v;
  }
  std::vector<double> Reals(const std::vector<std::string> &f, size_t begin,
                            size_t count) const {
    if (f.size() != begin + count)
      Error("expected " + std::to_string(count) + " values, found " +
            std::to_string(f.size() > begin ? f.size() - begin : 0));
    std::vector<double> v(count);
    for (size_t i = 0; i < count; ++i) v[i] = Real(f[begin + i]);
    return v;
  }
  Eigen::VectorXd Vector(std::string_view key, size_t count) {
    std::vector<std::string> f = Next(key);
    std::vector<double> v = Reals(f, 1, count);
    return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(count));
  }
  size_t pos() const { return pos_; }
  bool PeekIs(std::string_view key) const {
    if (pos_ >= lines_.size()) return false;
    std::vector<std::string> f = SplitWhitespace(lines_[pos_]);
    return !f.empty() && f[0] == key;
  }
  size_t size() const { return lines_.size(); }

 private:
  std::vector<std::string> lines_;
  size_t pos_ = 0;
};

}  // namespace

std::string WriteModel(const AcousticModel &m) {
  std::string out = "LYAM1\n";
  for (const auto &[k, v] : m.info_) out += "info " + k + " " + v + "\n";
  out += "topology " + std::to_string(m.topo_.phone_states) + " " +
         std::to_string(m.topo_.filler_states) + " " +
         std::to_string(m.topo_.mus_min_frames) + "\n";
  out += "gmm " + std::to_string(m.dim_) + " " + m.gmm_layout_ + "\n";
  out += "phones " + std::to_string(m.NumPhones()) + "\n";
  for (int32 p = 0; p < m.NumPhones(); ++p) {
    out += "phone " + m.phones_[p];
    for (int32 pdf : m.phone_pdfs_[p]) out += " " + std::to_string(pdf);
    out += '\n';
  }
  out += "pdfs " + std::to_string(m.NumPdfs()) + "\n";
  for (int32 pdf = 0; pdf < m.NumPdfs(); ++pdf) {
    const DiagGmm &g = m.gmms_[pdf];
    out += "pdf " + std::to_string(pdf) + " " + std::to_string(g.NumComponents());
    AppendNumbers(&out, m.trans_[pdf].data(), 3);
    out += '\n';
    for (int32 k = 0; k < g.NumComponents(); ++k) {
      out += "comp " + FormatDouble(g.Weights()[k], kDigits);
      AppendNumbers(&out, g.Mean(k).data(), g.Dim());
      AppendNumbers(&out, g.Var(k).data(), g.Dim());
      out += '\n';
    }
  }
  if (!m.mlp_) {
    out += "mlp none\n";
  } else {
    const Mlp &n = *m.mlp_;
    out += "mlp " + n.layout + " " + std::to_string(n.FeatDim()) + " " +
           std::to_string(n.splice) + " " + std::to_string(n.subsample) + " " +
           std::to_string(n.NumLayers()) + "\n";
    AppendVector(&out, "norm_mean", n.feat_mean);
    AppendVector(&out, "norm_std", n.feat_std);
    for (int32 l = 0; l < n.NumLayers(); ++l) {
      const Eigen::MatrixXd &w = n.weights[l];
      out += "layer " + std::to_string(w.rows()) + " " + std::to_string(w.cols()) + "\n";
      for (Eigen::Index r = 0; r < w.rows(); ++r) {
        Eigen::VectorXd row = w.row(r).transpose();
        AppendVector(&out, "w", row);
      }
      AppendVector(&out, "b", n.biases[l]);
    }
    AppendVector(&out, "priors", n.log_priors);
  }
  out += "checksum " + Sha256Hex(out) + "\n";
  return out;
}

AcousticModel ReadModel(std::string_view text) {
  std::vector<std::string> lines = SplitString(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || Trim(lines[0]) != "LYAM1")
    Fail(ErrorCode::kVersionMismatch, "not an LYAM1 model file");
  if (!lines.back().starts_with("checksum "))
    Fail(ErrorCode::kTruncated, "LYAM1: missing checksum line (truncated file?)");
  LineReader in(lines);
  in.Next("LYAM1");
  AcousticModel m;
  while (in.PeekIs("info")) {
    auto f = in.Next("info");
    if (f.size() != 3) in.Error("info needs a key and a value");
    m.info_.emplace_back(f[1], f[2]);
  }
  auto topo = in.Next("topology", 4);
  m.topo_.phone_states = static_cast<int32>(in.Int(topo[1]));
  m.topo_.filler_states = static_cast<int32>(in.Int(topo[2]));
  m.topo_.mus_min_frames = static_cast<int32>(in.Int(topo[3]));
  auto gmm = in.Next("gmm", 3);
  m.dim_ = static_cast<int32>(in.Int(gmm[1]));
  m.gmm_layout_ = gmm[2];
  if (m.dim_ < 1) in.Error("bad dimension");

  const long long num_phones = in.Int(in.Next("phones", 2)[1]);
  if (num_phones < 0) in.Error("bad phone count");
  for (long long p = 0; p < num_phones; ++p) {
    auto f = in.Next("phone", 3);
    m.phones_.push_back(f[1]);
    m.phone_pdfs_.emplace_back();
    for (size_t i = 2; i < f.size(); ++i) {
      long long pdf = in.Int(f[i]);
      if (pdf != static_cast<long long>(m.pdf_phone_.size())) in.Error("pdf ids out of order");
      m.phone_pdfs_.back().push_back(static_cast<int32>(pdf));
      m.pdf_phone_.push_back(static_cast<int32>(p));
      m.pdf_state_.push_back(static_cast<int32>(i - 2));
    }
  }
  const long long num_pdfs = in.Int(in.Next("pdfs", 2)[1]);
  if (num_pdfs != static_cast<long long>(m.pdf_phone_.size())) in.Error("pdf count mismatch");
  for (long long pdf = 0; pdf < num_pdfs; ++pdf) {
    auto f = in.Next("pdf", 6);
    if (in.Int(f[1]) != pdf) in.Error("pdf ids out of order");
    const long long ncomp = in.Int(f[2]);
    if (ncomp < 1) in.Error("pdf without components");
    std::vector<double> t = in.Reals(f, 3, 3);
    m.trans_.push_back({t[0], t[1], t[2]});
    DiagGmm g;
    for (long long k = 0; k < ncomp; ++k) {
      auto c = in.Next("comp");
      std::vector<double> v = in.Reals(c, 1, 1 + 2 * m.dim_);
      g.AddComponent(v[0], {v.begin() + 1, v.begin() + 1 + m.dim_},
                     {v.begin() + 1 + m.dim_, v.end()});
    }
    m.gmms_.push_back(std::move(g));
  }
  auto mlp = in.Next("mlp", 2);
  if (mlp[1] != "none") {
    if (mlp.size() != 6) in.Error("malformed mlp header");
    Mlp n;
    n.layout = mlp[1];
    const long long feat_dim = in.Int(mlp[2]);
    n.splice = static_cast<int32>(in.Int(mlp[3]));
    n.subsample = static_cast<int32>(in.Int(mlp[4]));
    const long long num_layers = in.Int(mlp[5]);
    if (feat_dim < 1 || n.splice < 0 || n.subsample < 1 || num_layers < 1)
      in.Error("bad mlp header");
    n.feat_mean = in.Vector("norm_mean", feat_dim);
    n.feat_std = in.Vector("norm_std", feat_dim);
    long long in_dim = n.InputDim();
    for (long long l = 0; l < num_layers; ++l) {
      auto h = in.Next("layer", 3);
      const long long rows = in.Int(h[1]), cols = in.Int(h[2]);
      if (cols != in_dim || rows < 1) in.Error("layer shape mismatch");
      Eigen::MatrixXd w(rows, cols);
      for (long long r = 0; r < rows; ++r) w.row(r) = in.Vector("w", cols).transpose();
      n.weights.push_back(std::move(w));
      n.biases.push_back(in.Vector("b", rows));
      in_dim = rows;
    }
    n.log_priors = in.Vector("priors", in_dim);
    m.mlp_ = std::move(n);
  }
  const size_t checksum_line = in.pos();
  auto ck = in.Next("checksum", 2);
  if (in.pos() != in.size()) in.Error("trailing data after checksum");
  size_t offset = 0;
  for (size_t i = 0; i < checksum_line; ++i) offset += lines[i].size() + 1;
  if (Sha256Hex(text.substr(0, offset)) != ck[1])
    Fail(ErrorCode::kChecksum, "LYAM1 checksum mismatch");
  return m;
}

void SaveModel(const std::string &path, const AcousticModel &model) {
  WriteStringToFile(path, WriteModel(model));
}

AcousticModel LoadModel(const std::string &path) { return ReadModel(ReadFileToString(path)); }

std::string ModelHash(const AcousticModel &model) { return ShortHash(WriteModel(model)); }

}  // namespace lyralign
