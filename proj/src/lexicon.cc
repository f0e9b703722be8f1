// src/lexicon.cc

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

#include "lyralign/lexicon.h"

#include <algorithm>
#include <cctype>
#include <set>

#include "lyralign/io-util.h"

namespace lyralign {

namespace {

const char *const kArpabetVowels[] = {"AA", "AE", "AH", "AO", "AW", "AY", "EH", "ER",
                                      "EY", "IH", "IY", "OW", "OY", "UH", "UW"};
const char *const kArpabetConsonants[] = {"B",  "CH", "D", "DH", "F",  "G",  "HH",  "JH",
                                          "K",  "L",  "M", "N",  "NG", "P",  "R",   "S",
                                          "SH", "T",  "TH", "V", "W",  "Y",  "Z",   "ZH"};

void AddSpecial(PhoneSet *set) {
  for (std::string_view p : {kSilPhone, kMusPhone, kSpnPhone})
    if (!set->Contains(p)) set->Add(std::string(p), false);
}

std::string Upper(std::string_view s) {
  std::string out(s);
  for (char &c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

bool IsWordChar(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

}  // namespace

PhoneSet PhoneSet::Default() {
  PhoneSet set;
  for (const char *p : kArpabetConsonants) set.Add(p, false);
  for (const char *p : kArpabetVowels) set.Add(p, true);
  AddSpecial(&set);
  return set;
}

PhoneSet PhoneSet::Parse(std::string_view text) {
  PhoneSet set;
  int line_no = 0;
  for (const std::string &line : SplitString(text, '\n')) {
    ++line_no;
    std::vector<std::string> f = SplitWhitespace(line);
    if (f.empty() || f[0][0] == '#') continue;
    if (f.size() > 2 || (f.size() == 2 && f[1] != "vowel"))
      Fail(ErrorCode::kParse, "phone set line " + std::to_string(line_no) +
                                  ": expected `PHONE [vowel]`");
    set.Add(Upper(f[0]), f.size() == 2);
  }
  AddSpecial(&set);
  return set;
}

void PhoneSet::Add(const std::string &phone, bool vowel) {
  auto it = vowel_.find(phone);
  if (it == vowel_.end()) {
    phones_.push_back(phone);
    vowel_.emplace(phone, vowel);
  } else {
    it->second = it->second || vowel;
  }
}

void PhoneSet::MarkVowel(const std::string &phone) {
  auto it = vowel_.find(phone);
  if (it == vowel_.end()) Fail(ErrorCode::kUnknownPhone, "unknown phone " + phone);
  it->second = true;
}

bool PhoneSet::Contains(std::string_view phone) const {
  return vowel_.find(phone) != vowel_.end();
}

bool PhoneSet::IsVowel(std::string_view phone) const {
  auto it = vowel_.find(phone);
  return it != vowel_.end() && it->second;
}

void Lexicon::Add(std::string_view word, const Pronunciation &pron) {
  std::string w = Upper(word);
  if (w.empty()) Fail(ErrorCode::kParse, "empty word");
  if (pron.empty())
    Fail(ErrorCode::kEmptyPronunciation, "empty pronunciation for " + w);
  for (const std::string &p : pron)
    if (!phone_set_.Contains(p))
      Fail(ErrorCode::kUnknownPhone, "unknown phone " + p + " in " + w);
  auto [it, inserted] = entries_.try_emplace(w);
  if (inserted) words_.push_back(w);
  if (std::find(it->second.begin(), it->second.end(), pron) == it->second.end())
    it->second.push_back(pron);
}

bool Lexicon::Contains(std::string_view word) const {
  return entries_.count(std::string(word)) != 0;
}

const std::vector<Pronunciation> &Lexicon::Pronunciations(std::string_view word) const {
  auto it = entries_.find(std::string(word));
  if (it == entries_.end())
    Fail(ErrorCode::kOutOfVocabulary, "word not in lexicon: " + std::string(word));
  return it->second;
}

size_t Lexicon::NumPronunciations() const {
  size_t n = 0;
  for (const auto &kv : entries_) n += kv.second.size();
  return n;
}

bool Lexicon::operator==(const Lexicon &other) const {
  return words_ == other.words_ && entries_ == other.entries_ &&
         phone_set_.Phones() == other.phone_set_.Phones();
}

Lexicon ParseDictionary(std::string_view text, PhoneSet phone_set) {
  Lexicon lex(std::move(phone_set));
  int line_no = 0;
  for (const std::string &raw : SplitString(text, '\n')) {
    ++line_no;
    std::string_view line = Trim(raw);
    if (line.empty() || line.starts_with(";;;")) continue;
    std::vector<std::string> f = SplitWhitespace(line);
    std::string word = f[0];
    // WORD(2) → WORD
    if (size_t open = word.rfind('('); open != std::string::npos && open > 0 &&
                                       word.back() == ')')
      word.resize(open);
    if (f.size() == 1)
      Fail(ErrorCode::kEmptyPronunciation, "dictionary line " + std::to_string(line_no) +
                                               ": empty pronunciation for " + word);
    Pronunciation pron;
    for (size_t i = 1; i < f.size(); ++i) {
      std::string p = Upper(f[i]);
      bool stressed = false;
      if (p.size() > 1 && (p.back() == '0' || p.back() == '1' || p.back() == '2')) {
        p.pop_back();
        stressed = true;
      }
      if (!lex.Phones().Contains(p))
        Fail(ErrorCode::kUnknownPhone, "dictionary line " + std::to_string(line_no) +
                                           ": unknown phone " + p);
      if (stressed) lex.MutablePhones().MarkVowel(p);
      pron.push_back(std::move(p));
    }
    lex.Add(word, pron);
  }
  return lex;
}

Lexicon ReadDictionaryFile(const std::string &path, PhoneSet phone_set) {
  return ParseDictionary(ReadFileToString(path), std::move(phone_set));
}

std::string WriteDictionary(const Lexicon &lex) {
  std::string out;
  for (const std::string &w : lex.Words()) {
    const auto &prons = lex.Pronunciations(w);
    for (size_t i = 0; i < prons.size(); ++i) {
      out += w;
      if (i > 0) out += "(" + std::to_string(i + 1) + ")";
      for (const std::string &p : prons[i]) out += " " + p;
      out += '\n';
    }
  }
  return out;
}

std::string NormalizeWord(std::string_view token) {
  std::string out;
  for (size_t i = 0; i < token.size(); ++i) {
    unsigned char c = token[i];
    if (IsWordChar(c)) {
      out += static_cast<char>(std::toupper(c));
    } else if (c == '\'' && !out.empty() && i + 1 < token.size() &&
               IsWordChar(token[i + 1])) {
      out += '\'';
    }
  }
  return out;
}

std::vector<LyricsLine> NormalizeLyrics(std::string_view text) {
  std::vector<LyricsLine> lines;
  std::vector<std::string> raw = SplitString(text, '\n');
  for (size_t i = 0; i < raw.size(); ++i) {
    std::string s = raw[i];
    if (!s.empty() && s.back() == '\r') s.pop_back();
    // U+2019 RIGHT SINGLE QUOTATION MARK is a common apostrophe in lyrics.
    for (size_t pos; (pos = s.find("\xE2\x80\x99")) != std::string::npos;)
      s.replace(pos, 3, "'");
    LyricsLine line;
    line.line_index = static_cast<int32>(i);
    line.original = raw[i];
    std::string token;
    auto flush = [&] {
      std::string w = NormalizeWord(token);
      if (!w.empty()) line.words.push_back(std::move(w));
      token.clear();
    };
    for (char c : s) {
      if (IsWordChar(static_cast<unsigned char>(c)) || c == '\'')
        token += c;
      else
        flush();
    }
    flush();
    if (!line.words.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

Lexicon DurationVariants(const Lexicon &lex, int32 max_repeat) {
  if (max_repeat < 1) Fail(ErrorCode::kInvalidArgument, "max_repeat must be >= 1");
  const PhoneSet &phones = lex.Phones();
  Lexicon out(phones);
  for (const std::string &w : lex.Words()) {
    const auto &prons = lex.Pronunciations(w);
    for (const Pronunciation &p : prons) out.Add(w, p);
    for (const Pronunciation &p : prons) {
      Pronunciation base;
      for (const std::string &ph : p)
        if (base.empty() || ph != base.back() || !phones.IsVowel(ph)) base.push_back(ph);
      if (std::none_of(base.begin(), base.end(),
                       [&](const std::string &ph) { return phones.IsVowel(ph); }))
        continue;
      for (int32 k = 2; k <= max_repeat; ++k) {
        Pronunciation v;
        for (const std::string &ph : base)
          v.insert(v.end(), phones.IsVowel(ph) ? k : 1, ph);
        out.Add(w, v);
      }
    }
  }
  return out;
}

std::vector<std::string> OovReport(const Lexicon &lex,
                                   const std::vector<LyricsLine> &lines) {
  std::vector<std::string> oov;
  std::set<std::string> seen;
  for (const LyricsLine &line : lines)
    for (const std::string &w : line.words)
      if (!lex.Contains(w) && seen.insert(w).second) oov.push_back(w);
  return oov;
}

}  // namespace lyralign
