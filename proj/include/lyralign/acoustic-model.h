// include/lyralign/acoustic-model.h

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

#ifndef LYRALIGN_ACOUSTIC_MODEL_H_
#define LYRALIGN_ACOUSTIC_MODEL_H_

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lyralign/diag-gmm.h"
#include "lyralign/lexicon.h"
#include "lyralign/nnet.h"
#include "lyralign/viterbi.h"

namespace lyralign {

constexpr double kTransitionFloor = 1e-8;

/// Speech phones are 3-state left-to-right; SIL, MUS and SPN are 5-state with
/// skip arcs (i -> i+2, and exit from the penultimate state).
struct HmmTopology {
  int32 phone_states = 3;
  int32 filler_states = 5;
  /// Minimum number of frames a MUS segment occupies in a decoding graph.
  int32 mus_min_frames = 30;

  static bool IsFiller(std::string_view phone);
  int32 NumStates(std::string_view phone) const;
  bool operator==(const HmmTopology &) const = default;
};

/// Monophone HMM set with one GMM and one transition distribution per pdf
/// (a pdf is a phone state), plus an optional hybrid network.
class AcousticModel {
 public:
  AcousticModel() = default;
  /// Every pdf starts as a unit Gaussian with uniform transitions.
  AcousticModel(const PhoneSet &phones, int32 dim, std::string gmm_layout,
                const HmmTopology &topo = {});

  int32 NumPhones() const { return static_cast<int32>(phones_.size()); }
  const std::vector<std::string> &Phones() const { return phones_; }
  /// Throws kUnknownPhone.
  int32 PhoneIndex(std::string_view phone) const;
  const std::vector<int32> &PhonePdfs(int32 phone) const { return phone_pdfs_[phone]; }
  int32 PdfPhone(int32 pdf) const { return pdf_phone_[pdf]; }
  int32 PdfState(int32 pdf) const { return pdf_state_[pdf]; }
  int32 NumPdfs() const { return static_cast<int32>(gmms_.size()); }

  int32 Dim() const { return dim_; }
  const std::string &GmmLayout() const { return gmm_layout_; }
  const HmmTopology &Topology() const { return topo_; }

  const DiagGmm &Gmm(int32 pdf) const { return gmms_[pdf]; }
  DiagGmm &MutableGmm(int32 pdf) { return gmms_[pdf]; }

  bool ArcAllowed(int32 pdf, ArcKind kind) const;
  double TransitionProb(int32 pdf, ArcKind kind) const { return trans_[pdf][kind]; }
  double TransitionLogProb(int32 pdf, ArcKind kind) const;
  /// ML estimate from arc counts, floored at kTransitionFloor and
  /// renormalised.  All-zero counts leave the distribution unchanged.
  void SetTransitionsFromCounts(int32 pdf, const std::array<double, 3> &counts);
  void SetTransitions(int32 pdf, const std::array<double, 3> &probs);

  /// Copies the GMMs and transitions of one phone onto another with the
  /// same number of states.
  void CopyPhone(std::string_view from, std::string_view to);

  bool HasMlp() const { return mlp_.has_value(); }
  const Mlp &GetMlp() const { return *mlp_; }
  Mlp &MutableMlp() { return *mlp_; }
  void SetMlp(Mlp mlp) { mlp_ = std::move(mlp); }
  void ClearMlp() { mlp_.reset(); }

  /// Throws kDimensionMismatch unless `feats` matches the GMM input layout.
  void CheckGmmInput(const FeatureMatrix &feats) const;
  /// GMM log-likelihoods for the listed pdfs; other columns are left at 0.
  EmissionMatrix GmmEmissions(const FeatureMatrix &feats,
                              const std::vector<int32> &pdfs) const;
  /// Every GMM valid and every transition row on the simplex.
  bool IsValid() const;

  /// Free-form provenance entries (config hash and the like), written
  /// verbatim into the model file.  Values are single tokens.
  std::string Info(std::string_view key) const;
  void SetInfo(const std::string &key, const std::string &value);

  bool operator==(const AcousticModel &other) const;

 private:
  friend std::string WriteModel(const AcousticModel &);
  friend AcousticModel ReadModel(std::string_view);

  HmmTopology topo_;
  int32 dim_ = 0;
  std::string gmm_layout_;
  std::vector<std::string> phones_;
  std::vector<std::vector<int32>> phone_pdfs_;
  std::vector<int32> pdf_phone_, pdf_state_;
  std::vector<DiagGmm> gmms_;
  std::vector<std::array<double, 3>> trans_;
  std::optional<Mlp> mlp_;
  std::vector<std::pair<std::string, std::string>> info_;
};

/// Text format "LYAM1": all parameters with 17 significant digits, closed by
/// a `checksum <sha256>` line over everything before it.
std::string WriteModel(const AcousticModel &model);
/// Throws kVersionMismatch (magic), kTruncated (missing data or checksum
/// line), kParse (with line number) or kChecksum.
AcousticModel ReadModel(std::string_view text);
void SaveModel(const std::string &path, const AcousticModel &model);
AcousticModel LoadModel(const std::string &path);
/// Short content hash of the serialised model.
std::string ModelHash(const AcousticModel &model);

}  // namespace lyralign

#endif  // LYRALIGN_ACOUSTIC_MODEL_H_
