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


#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "test_util.h"
#include "textprobe/errors.h"
#include "textprobe/lexical.h"
#include "textprobe/text.h"

namespace textprobe {
namespace {

using testing::Fixture;

using Words = std::vector<std::string>;

SynonymLexicon FromTsv(const std::string& text) {
  std::istringstream in(text);
  return SynonymLexicon::ParseTsv(in, "inline");
}

TEST(SynonymLexiconTest, TsvLine) {
  const auto lex = FromTsv("good\tfine,great\n");
  EXPECT_EQ(lex.Synonyms("good"), (Words{"fine", "great"}));
}

TEST(SynonymLexiconTest, AbsentWord) {
  const auto lex = FromTsv("good\tfine\n");
  EXPECT_TRUE(lex.Synonyms("xyzzy").empty());
  EXPECT_TRUE(lex.Synonyms("").empty());
}

TEST(SynonymLexiconTest, CaseMirroring) {
  const auto lex = FromTsv("good\tfine\n");
  EXPECT_EQ(lex.Synonyms("Good"), Words{"Fine"});
  EXPECT_EQ(lex.Synonyms("GOOD"), Words{"Fine"});
}

TEST(SynonymLexiconTest, NormalizesEntries) {
  const auto lex = FromTsv(
      "# comment\n\nGood\tfine, Fine ,good,great\ngood\tgreat,superb\r\n");
  EXPECT_EQ(lex.Synonyms("good"), (Words{"fine", "great", "superb"}));
}

TEST(SynonymLexiconTest, NeverContainsItself) {
  const auto lex = LoadLexicon(Fixture("synonyms.tsv"), LexiconFormat::kTsv);
  for (const auto& [word, syns] : lex.entries()) {
    for (const auto& s : syns) EXPECT_NE(ToLowerAscii(s), word);
  }
}

TEST(SynonymLexiconTest, DeterministicLoad) {
  const auto a = LoadLexicon(Fixture("synonyms.tsv"), LexiconFormat::kTsv);
  const auto b = LoadLexicon(Fixture("synonyms.tsv"), LexiconFormat::kTsv);
  EXPECT_EQ(a.entries(), b.entries());
  EXPECT_EQ(a.Synonyms("want"), (Words{"hope", "wish"}));
}

TEST(SynonymLexiconTest, ParseErrors) {
  try {
    FromTsv("good\tfine\nbroken line\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.source(), "inline");
  }
  EXPECT_THROW(FromTsv("# only comments\n"), EmptyLexiconError);
  EXPECT_THROW(FromTsv("good\tgood\n"), EmptyLexiconError);
  EXPECT_THROW(LoadLexicon("/nonexistent/lexicon.tsv", LexiconFormat::kTsv),
               IoError);
}

TEST(WordNetTest, SharedSynset) {
  const auto lex = LoadLexicon(Fixture("wordnet"), LexiconFormat::kWordNetDb);
  const auto wet = lex.Synonyms("wet");
  EXPECT_NE(std::find(wet.begin(), wet.end(), "damp"), wet.end());
  EXPECT_EQ(wet, (Words{"damp", "moist"}));
  EXPECT_EQ(lex.Synonyms("arid"), Words{"dry"});
}

TEST(WordNetTest, SkipsCollocationsAndMarkers) {
  const auto lex =
      LoadLexicon(Fixture("wordnet/data.adj"), LexiconFormat::kWordNetDb);
  EXPECT_TRUE(lex.Synonyms("good").empty());
  EXPECT_TRUE(lex.Synonyms("well_made").empty());
  EXPECT_TRUE(lex.Synonyms("able").empty());
}

TEST(WordNetTest, MalformedRecord) {
  std::istringstream in("  1 header\n00001 00 a zz wet 0\n");
  try {
    SynonymLexicon::ParseWordNetData(in, "data.adj");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  std::istringstream bad_type("00001 00 q 01 wet 0 000 | x\n");
  EXPECT_THROW(SynonymLexicon::ParseWordNetData(bad_type, "x"), ParseError);
  std::istringstream truncated("00001 00 a 02 wet 0\n");
  EXPECT_THROW(SynonymLexicon::ParseWordNetData(truncated, "x"), ParseError);
}

TEST(StopWordTest, DefaultList) {
  const auto& list = StopWordList::Default();
  EXPECT_TRUE(IsStopWord(list, "the"));
  EXPECT_TRUE(IsStopWord(list, "The"));
  EXPECT_FALSE(IsStopWord(list, "finance"));
  EXPECT_EQ(list.size(), 179u);
}

TEST(StopWordTest, ParseCustomList) {
  std::istringstream in("# custom\nFoo\n\nbar\n");
  const auto list = StopWordList::Parse(in);
  EXPECT_EQ(list.size(), 2u);
  EXPECT_TRUE(list.Contains("foo"));
  EXPECT_TRUE(list.Contains("BAR"));
}

TEST(PosLexiconTest, TsvTags) {
  const auto pos = PosLexicon::Load(Fixture("pos.tsv"));
  EXPECT_EQ(pos.Tags("want"), kPosVerb | kPosNoun);
  EXPECT_EQ(pos.Tags("Movie"), kPosNoun);
  EXPECT_EQ(pos.Tags("unknown"), 0);
  EXPECT_EQ(PosTagSetToString(pos.Tags("quickly")), "adv");
}

TEST(PosLexiconTest, BadTag) {
  std::istringstream in("word\tnoun,bogus\n");
  EXPECT_THROW(PosLexicon::ParseTsv(in, "x"), ParseError);
}

TEST(PosLexiconTest, FromWordNet) {
  std::ifstream in(Fixture("wordnet/data.adj"));
  const auto pos = PosLexicon::FromWordNet(in, "data.adj");
  EXPECT_EQ(pos.Tags("wet"), kPosAdj);
  EXPECT_EQ(pos.Tags("arid"), kPosAdj);
}

}  // namespace
}  // namespace textprobe
