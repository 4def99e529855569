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

#include "textprobe/lexical.h"

#include <cctype>
#include <fstream>
#include <sstream>
#include <utility>

#include "textprobe/errors.h"
#include "textprobe/text.h"

namespace textprobe {
namespace {

#include "default_stopwords.inc"

std::string Trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> SplitComma(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t end = s.find(',', start);
    if (end == std::string_view::npos) end = s.size();
    std::string item = Trim(s.substr(start, end - start));
    if (!item.empty()) out.push_back(std::move(item));
    start = end + 1;
  }
  return out;
}

std::ifstream OpenOrThrow(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

// Strips the adjective position markers WNDB appends to lemmas: (a), (p), (ip).
std::string StripAdjMarker(std::string lemma) {
  const std::size_t paren = lemma.find('(');
  if (paren != std::string::npos && !lemma.empty() && lemma.back() == ')') {
    lemma.resize(paren);
  }
  return lemma;
}

struct WordNetSynset {
  char ss_type = 'n';
  std::vector<std::string> lemmas;  // lowercased
};

// Calls `fn` for each synset of a WNDB data file. License header lines begin
// with two spaces.
template <typename Fn>
void ForEachSynset(std::istream& in, const std::string& source, Fn&& fn) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.rfind("  ", 0) == 0) continue;
    std::istringstream fields(line);
    std::string offset, lex_filenum, ss_type, w_cnt_hex;
    if (!(fields >> offset >> lex_filenum >> ss_type >> w_cnt_hex)) {
      throw ParseError(source, lineno, "truncated synset record");
    }
    for (char c : offset) {
      if (!std::isdigit(static_cast<unsigned char>(c))) {
        throw ParseError(source, lineno, "bad synset offset '" + offset + "'");
      }
    }
    if (ss_type.size() != 1 ||
        std::string_view("nvasr").find(ss_type[0]) == std::string_view::npos) {
      throw ParseError(source, lineno, "bad synset type '" + ss_type + "'");
    }
    std::size_t w_cnt = 0;
    try {
      std::size_t used = 0;
      w_cnt = std::stoul(w_cnt_hex, &used, 16);
      if (used != w_cnt_hex.size()) throw std::invalid_argument("hex");
    } catch (const std::exception&) {
      throw ParseError(source, lineno, "bad word count '" + w_cnt_hex + "'");
    }
    WordNetSynset synset;
    synset.ss_type = ss_type[0];
    for (std::size_t k = 0; k < w_cnt; ++k) {
      std::string word, lex_id;
      if (!(fields >> word >> lex_id)) {
        throw ParseError(source, lineno, "expected " + std::to_string(w_cnt) +
                                             " lemmas");
      }
      synset.lemmas.push_back(ToLowerAscii(StripAdjMarker(std::move(word))));
    }
    fn(synset);
  }
}

std::vector<std::filesystem::path> WordNetDataFiles(
    const std::filesystem::path& path) {
  if (!std::filesystem::is_directory(path)) return {path};
  std::vector<std::filesystem::path> files;
  for (const char* name : {"data.noun", "data.verb", "data.adj", "data.adv"}) {
    if (std::filesystem::exists(path / name)) files.push_back(path / name);
  }
  if (files.empty()) {
    throw IoError("no WordNet data.* files under " + path.string());
  }
  return files;
}

PosTagSet TagFromName(std::string_view name) {
  if (name == "noun") return kPosNoun;
  if (name == "verb") return kPosVerb;
  if (name == "adj") return kPosAdj;
  if (name == "adv") return kPosAdv;
  if (name == "other") return kPosOther;
  return 0;
}

}  // namespace

SynonymLexicon::SynonymLexicon(
    const std::map<std::string, std::vector<std::string>>& entries,
    std::string source)
    : source_(std::move(source)) {
  for (const auto& [word, syns] : entries) {
    const std::string key = ToLowerAscii(word);
    auto& list = entries_[key];
    std::set<std::string> seen;
    for (const auto& existing : list) seen.insert(ToLowerAscii(existing));
    for (const auto& s : syns) {
      const std::string lower = ToLowerAscii(s);
      if (s.empty() || lower == key || !seen.insert(lower).second) continue;
      list.push_back(s);
    }
    if (list.empty()) entries_.erase(key);
  }
}

void SynonymLexicon::Merge(const SynonymLexicon& other) {
  std::map<std::string, std::vector<std::string>> combined = entries_;
  for (const auto& [word, syns] : other.entries_) {
    auto& list = combined[word];
    list.insert(list.end(), syns.begin(), syns.end());
  }
  std::string source = source_.empty() ? other.source_
                                       : source_ + ";" + other.source_;
  *this = SynonymLexicon(combined, std::move(source));
}

SynonymLexicon SynonymLexicon::ParseTsv(std::istream& in,
                                        const std::string& source) {
  // Repeated words append in file order, so collect in order first.
  std::vector<std::pair<std::string, std::vector<std::string>>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string trimmed = Trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError(source, lineno, "expected word<TAB>synonyms");
    }
    std::string word = Trim(std::string_view(line).substr(0, tab));
    if (word.empty()) throw ParseError(source, lineno, "empty headword");
    rows.emplace_back(std::move(word),
                      SplitComma(std::string_view(line).substr(tab + 1)));
  }
  std::map<std::string, std::vector<std::string>> entries;
  for (auto& [word, syns] : rows) {
    auto& list = entries[ToLowerAscii(word)];
    list.insert(list.end(), syns.begin(), syns.end());
  }
  SynonymLexicon lex(entries, source);
  if (lex.empty()) throw EmptyLexiconError(source + ": no synonym entries");
  return lex;
}

SynonymLexicon SynonymLexicon::ParseWordNetData(std::istream& in,
                                                const std::string& source) {
  std::map<std::string, std::vector<std::string>> entries;
  ForEachSynset(in, source, [&](const WordNetSynset& synset) {
    for (const auto& word : synset.lemmas) {
      if (word.find('_') != std::string::npos) continue;
      auto& list = entries[word];
      for (const auto& other : synset.lemmas) {
        if (other == word || other.find('_') != std::string::npos) continue;
        list.push_back(other);
      }
    }
  });
  SynonymLexicon lex(entries, source);
  if (lex.empty()) throw EmptyLexiconError(source + ": no synonym entries");
  return lex;
}

std::vector<std::string> SynonymLexicon::Synonyms(std::string_view word) const {
  if (word.empty()) return {};
  const auto it = entries_.find(ToLowerAscii(word));
  if (it == entries_.end()) return {};
  std::vector<std::string> out = it->second;
  const bool capital = std::isupper(static_cast<unsigned char>(word[0])) != 0;
  if (capital) {
    for (auto& s : out) {
      s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    }
  }
  return out;
}

SynonymLexicon LoadLexicon(const std::filesystem::path& path,
                           LexiconFormat format) {
  if (format == LexiconFormat::kTsv) {
    auto in = OpenOrThrow(path);
    return SynonymLexicon::ParseTsv(in, path.string());
  }
  SynonymLexicon merged;
  bool any = false;
  for (const auto& file : WordNetDataFiles(path)) {
    auto in = OpenOrThrow(file);
    try {
      SynonymLexicon part = SynonymLexicon::ParseWordNetData(in, file.string());
      merged.Merge(part);
      any = true;
    } catch (const EmptyLexiconError&) {
      // A single data file may legitimately hold only monosemous lemmas.
    }
  }
  if (!any) throw EmptyLexiconError(path.string() + ": no synonym entries");
  return merged;
}

StopWordList::StopWordList(std::set<std::string> words) {
  for (const auto& w : words) words_.insert(ToLowerAscii(w));
}

const StopWordList& StopWordList::Default() {
  static const StopWordList list = [] {
    std::istringstream in(kDefaultStopWords);
    return Parse(in);
  }();
  return list;
}

StopWordList StopWordList::Parse(std::istream& in) {
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    const std::string w = Trim(line);
    if (w.empty() || w[0] == '#') continue;
    words.insert(ToLowerAscii(w));
  }
  return StopWordList(std::move(words));
}

StopWordList StopWordList::Load(const std::filesystem::path& path) {
  auto in = OpenOrThrow(path);
  return Parse(in);
}

bool StopWordList::Contains(std::string_view word) const {
  return words_.count(ToLowerAscii(word)) > 0;
}

std::string PosTagSetToString(PosTagSet tags) {
  std::string out;
  const std::pair<PosTag, const char*> names[] = {
      {kPosNoun, "noun"}, {kPosVerb, "verb"}, {kPosAdj, "adj"},
      {kPosAdv, "adv"},   {kPosOther, "other"}};
  for (const auto& [tag, name] : names) {
    if ((tags & tag) == 0) continue;
    if (!out.empty()) out += ',';
    out += name;
  }
  return out;
}

void PosLexicon::Add(std::string_view word, PosTagSet tags) {
  tags_[ToLowerAscii(word)] |= tags;
}

PosTagSet PosLexicon::Tags(std::string_view word) const {
  const auto it = tags_.find(ToLowerAscii(word));
  return it == tags_.end() ? 0 : it->second;
}

PosLexicon PosLexicon::ParseTsv(std::istream& in, const std::string& source) {
  PosLexicon lex;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string trimmed = Trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError(source, lineno, "expected word<TAB>tags");
    }
    PosTagSet tags = 0;
    for (const auto& name : SplitComma(std::string_view(line).substr(tab + 1))) {
      const PosTagSet t = TagFromName(ToLowerAscii(name));
      if (t == 0) throw ParseError(source, lineno, "unknown POS tag '" + name + "'");
      tags |= t;
    }
    lex.Add(Trim(std::string_view(line).substr(0, tab)), tags);
  }
  return lex;
}

PosLexicon PosLexicon::Load(const std::filesystem::path& path) {
  auto in = OpenOrThrow(path);
  return ParseTsv(in, path.string());
}

PosLexicon PosLexicon::FromWordNet(std::istream& in, const std::string& source) {
  PosLexicon lex;
  ForEachSynset(in, source, [&](const WordNetSynset& synset) {
    PosTagSet tag = kPosOther;
    switch (synset.ss_type) {
      case 'n': tag = kPosNoun; break;
      case 'v': tag = kPosVerb; break;
      case 'a': case 's': tag = kPosAdj; break;
      case 'r': tag = kPosAdv; break;
    }
    for (const auto& lemma : synset.lemmas) lex.Add(lemma, tag);
  });
  return lex;
}

}  // namespace textprobe
