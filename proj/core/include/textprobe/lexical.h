// Copyright 2026 The textprobe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Lexical resources: synonym lexicon, stop words, and a coarse POS lexicon.
//
// Two synonym sources are supported. The TSV format is
//
//   # comment
//   good<TAB>fine,great
//
// and the WordNet database format reads WNDB `data.*` files, where the
// synonyms of a word are the other lemmas of every synset it belongs to.
// Collocations (lemmas containing '_') are skipped.

#ifndef TEXTPROBE_LEXICAL_H_
#define TEXTPROBE_LEXICAL_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace textprobe {

enum class LexiconFormat { kTsv, kWordNetDb };

class SynonymLexicon {
 public:
  SynonymLexicon() = default;
  // Keys are lowercased; lists are deduplicated in first-seen order and never
  // contain their own key.
  SynonymLexicon(const std::map<std::string, std::vector<std::string>>& entries,
                 std::string source);

  static SynonymLexicon ParseTsv(std::istream& in, const std::string& source);
  static SynonymLexicon ParseWordNetData(std::istream& in,
                                         const std::string& source);

  // Case-insensitive lookup. An uppercase first letter of `word` is mirrored
  // onto each returned synonym.
  std::vector<std::string> Synonyms(std::string_view word) const;

  const std::map<std::string, std::vector<std::string>>& entries() const {
    return entries_;
  }
  const std::string& source() const { return source_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // Appends lists from `other` after this lexicon's own entries.
  void Merge(const SynonymLexicon& other);

 private:
  std::map<std::string, std::vector<std::string>> entries_;
  std::string source_;
};

// `path` is a TSV file, or for kWordNetDb either one `data.*` file or a
// directory holding data.noun/data.verb/data.adj/data.adv.
// Throws ParseError, EmptyLexiconError, IoError.
SynonymLexicon LoadLexicon(const std::filesystem::path& path,
                           LexiconFormat format);

class StopWordList {
 public:
  StopWordList() = default;
  explicit StopWordList(std::set<std::string> words);

  // English list compiled into the library; see data/stopwords_en.txt.
  static const StopWordList& Default();
  static StopWordList Load(const std::filesystem::path& path);
  static StopWordList Parse(std::istream& in);

  bool Contains(std::string_view word) const;
  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }

 private:
  std::set<std::string> words_;
};

inline bool IsStopWord(const StopWordList& list, std::string_view word) {
  return list.Contains(word);
}

enum PosTag : std::uint8_t {
  kPosNoun = 1 << 0,
  kPosVerb = 1 << 1,
  kPosAdj = 1 << 2,
  kPosAdv = 1 << 3,
  kPosOther = 1 << 4,
};
using PosTagSet = std::uint8_t;

std::string PosTagSetToString(PosTagSet tags);

class PosLexicon {
 public:
  PosLexicon() = default;

  // TSV: word<TAB>tag[,tag...] with tags from {noun, verb, adj, adv, other}.
  static PosLexicon ParseTsv(std::istream& in, const std::string& source);
  static PosLexicon Load(const std::filesystem::path& path);
  // Tags taken from synset types in WNDB data files (a and s both map to adj).
  static PosLexicon FromWordNet(std::istream& in, const std::string& source);

  void Add(std::string_view word, PosTagSet tags);
  // 0 when unknown.
  PosTagSet Tags(std::string_view word) const;
  std::size_t size() const { return tags_.size(); }

 private:
  std::map<std::string, PosTagSet> tags_;
};

}  // namespace textprobe

#endif  // TEXTPROBE_LEXICAL_H_
