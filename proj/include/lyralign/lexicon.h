// include/lyralign/lexicon.h

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

#ifndef LYRALIGN_LEXICON_H_
#define LYRALIGN_LEXICON_H_

#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lyralign/base.h"

namespace lyralign {

inline constexpr std::string_view kSilPhone = "SIL";
inline constexpr std::string_view kMusPhone = "MUS";
inline constexpr std::string_view kSpnPhone = "SPN";

typedef std::vector<std::string> Pronunciation;

class PhoneSet {
 public:
  /// 39 ARPAbet phones plus SIL, MUS and SPN.
  static PhoneSet Default();
  /// One phone per line, optionally followed by the tag `vowel`.  Lines
  /// starting with `#` are ignored.  SIL/MUS/SPN are always added.
  static PhoneSet Parse(std::string_view text);

  void Add(const std::string &phone, bool vowel);
  void MarkVowel(const std::string &phone);
  bool Contains(std::string_view phone) const;
  bool IsVowel(std::string_view phone) const;
  /// Phones in insertion order.
  const std::vector<std::string> &Phones() const { return phones_; }

 private:
  std::vector<std::string> phones_;
  std::map<std::string, bool, std::less<>> vowel_;
};

class Lexicon {
 public:
  Lexicon() : phone_set_(PhoneSet::Default()) { }
  explicit Lexicon(PhoneSet phone_set) : phone_set_(std::move(phone_set)) { }

  /// Validates every phone and appends `pron` to `word` unless it is already
  /// present.  `word` is uppercased.
  void Add(std::string_view word, const Pronunciation &pron);

  bool Contains(std::string_view word) const;
  /// Throws kOutOfVocabulary for unknown words.
  const std::vector<Pronunciation> &Pronunciations(std::string_view word) const;
  /// Words in first-insertion order.
  const std::vector<std::string> &Words() const { return words_; }
  size_t NumPronunciations() const;

  const PhoneSet &Phones() const { return phone_set_; }
  PhoneSet &MutablePhones() { return phone_set_; }

  bool operator==(const Lexicon &other) const;

 private:
  PhoneSet phone_set_;
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::vector<Pronunciation>> entries_;
};

/// CMU-style dictionary text: `WORD PH1 PH2 ...`, `WORD(2) ...` for
/// alternates, `;;;` comments.  Stress digits 0/1/2 are stripped and mark the
/// phone as a vowel.
Lexicon ParseDictionary(std::string_view text, PhoneSet phone_set = PhoneSet::Default());
Lexicon ReadDictionaryFile(const std::string &path,
                           PhoneSet phone_set = PhoneSet::Default());
std::string WriteDictionary(const Lexicon &lex);

struct LyricsLine {
  std::vector<std::string> words;
  int32 line_index = 0;  // index of the source text line
  std::string original;
};

/// Uppercases, strips punctuation except apostrophes inside words, drops
/// empty lines.  Bytes >= 0x80 are kept as word characters.
std::vector<LyricsLine> NormalizeLyrics(std::string_view text);
std::string NormalizeWord(std::string_view token);

/// Adds, for every pronunciation, the variants in which each vowel is
/// repeated k times for k = 2..max_repeat.  Runs of a repeated vowel are
/// collapsed first, so applying this to its own output adds nothing.
Lexicon DurationVariants(const Lexicon &lex, int32 max_repeat = 3);

/// Unique unknown words in first-occurrence order.
std::vector<std::string> OovReport(const Lexicon &lex,
                                   const std::vector<LyricsLine> &lines);

}  // namespace lyralign

#endif  // LYRALIGN_LEXICON_H_
