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
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"
#include "test_util.h"
#include "textprobe/config.h"
#include "textprobe/dataset.h"
#include "textprobe/errors.h"

namespace textprobe {
namespace {

const LabelSet kBinary = {"positive", "negative"};

EnvLookup NoEnv() {
  return [](const std::string&) -> std::optional<std::string> { return std::nullopt; };
}

EnvLookup MapEnv(std::map<std::string, std::string> vars) {
  return [vars](const std::string& k) -> std::optional<std::string> {
    auto it = vars.find(k);
    if (it == vars.end()) return std::nullopt;
    return it->second;
  };
}

// --- CSV -------------------------------------------------------------------

TEST(CsvTest, QuotesAndMultiline) {
  std::istringstream in("a,b\n\"x, y\",\"say \"\"hi\"\"\"\n\"two\nlines\",z\n");
  const auto rows = ParseCsv(in, "t.csv");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1].fields, (std::vector<std::string>{"x, y", "say \"hi\""}));
  EXPECT_EQ(rows[2].fields, (std::vector<std::string>{"two\nlines", "z"}));
  EXPECT_EQ(rows[2].line, 3u);
}

TEST(CsvTest, CrLfAndEmptyFields) {
  std::istringstream in("a,b,c\r\n,,\r\n");
  const auto rows = ParseCsv(in, "t.csv");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].fields, (std::vector<std::string>{"", "", ""}));
}

TEST(CsvTest, Errors) {
  for (const char* bad : {"a,b\nx\"y,z\n", "a,b\n\"x\"y,z\n", "a,b\n\"open,z\n"}) {
    std::istringstream in(bad);
    try {
      ParseCsv(in, "bad.csv");
      ADD_FAILURE() << bad;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), 2u) << bad;
      EXPECT_EQ(e.source(), "bad.csv");
    }
  }
}

// --- Datasets --------------------------------------------------------------

TEST(DatasetTest, CsvFixture) {
  const auto recs = LoadDataset(testing::Fixture("sentiment.csv"), DatasetFormat::kCsv, kBinary);
  ASSERT_EQ(recs.size(), 10u);
  EXPECT_EQ(recs[0].id, "r01");
  EXPECT_EQ(recs[1].text, "a great film, with a good cast");
  EXPECT_EQ(recs[9].label, "negative");
}

TEST(DatasetTest, JsonlFixture) {
  const auto recs =
      LoadDataset(testing::Fixture("sentiment.jsonl"), DatasetFormat::kJsonl, kBinary);
  ASSERT_EQ(recs.size(), 3u);
  EXPECT_EQ(recs[2].id, "3");
  EXPECT_EQ(recs[2].label, "negative");  // canonical spelling
}

TEST(DatasetTest, MissingLabelNamesLine) {
  try {
    LoadDataset(testing::Fixture("missing_label.jsonl"), DatasetFormat::kJsonl, kBinary);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("label"), std::string::npos);
  }
}

TEST(DatasetTest, FourClassNews) {
  const LabelSet news = {"World", "Sports", "Business", "Sci/Tech"};
  const auto recs = LoadDataset(testing::Fixture("agnews.jsonl"), DatasetFormat::kJsonl, news);
  EXPECT_FALSE(recs.empty());
  for (const auto& r : recs) {
    EXPECT_NE(std::find(news.begin(), news.end(), r.label), news.end());
  }
  EXPECT_THROW(
      LoadDataset(testing::Fixture("agnews_bad_label.jsonl"), DatasetFormat::kJsonl, news),
      UnknownLabelError);
}

TEST(DatasetTest, RecordErrors) {
  std::istringstream empty_text("{\"id\":\"a\",\"text\":\"\",\"label\":\"positive\"}\n");
  EXPECT_THROW(ParseDataset(empty_text, DatasetFormat::kJsonl, kBinary, "x"), EmptyTextError);
  std::istringstream dup("id,text,label\na,x,positive\na,y,negative\n");
  EXPECT_THROW(ParseDataset(dup, DatasetFormat::kCsv, kBinary, "x"), ParseError);
  std::istringstream no_header("id,body,label\na,x,positive\n");
  EXPECT_THROW(ParseDataset(no_header, DatasetFormat::kCsv, kBinary, "x"), ParseError);
  std::istringstream short_row("text,label\nonly\n");
  EXPECT_THROW(ParseDataset(short_row, DatasetFormat::kCsv, kBinary, "x"), ParseError);
  std::istringstream not_json("{oops\n");
  EXPECT_THROW(ParseDataset(not_json, DatasetFormat::kJsonl, kBinary, "x"), ParseError);
  EXPECT_THROW(LoadDataset("/nonexistent.csv", DatasetFormat::kCsv, kBinary), IoError);
}

TEST(DatasetTest, MissingIdsAreNumbered) {
  std::istringstream in("text,label\nx,positive\ny,negative\n");
  const auto recs = ParseDataset(in, DatasetFormat::kCsv, kBinary, "x");
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].id, "1");
  EXPECT_EQ(recs[1].id, "2");
}

TEST(DatasetTest, FormatGuessing) {
  EXPECT_EQ(GuessDatasetFormat("a/b.csv"), DatasetFormat::kCsv);
  EXPECT_EQ(GuessDatasetFormat("a/b.jsonl"), DatasetFormat::kJsonl);
  EXPECT_THROW(GuessDatasetFormat("a/b.txt"), ConfigError);
  EXPECT_EQ(ParseDatasetFormat(DatasetFormatName(DatasetFormat::kJsonl)), DatasetFormat::kJsonl);
}

TEST(SampleIndicesTest, DeterministicSortedUnique) {
  const auto a = SampleIndices(1000, 50, 7);
  EXPECT_EQ(a, SampleIndices(1000, 50, 7));
  EXPECT_NE(a, SampleIndices(1000, 50, 8));
  ASSERT_EQ(a.size(), 50u);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  EXPECT_EQ(std::set<std::size_t>(a.begin(), a.end()).size(), 50u);
  EXPECT_LT(a.back(), 1000u);
  EXPECT_EQ(SampleIndices(5, 10, 1), (std::vector<std::size_t>{0, 1, 2, 3, 4}));
  EXPECT_TRUE(SampleIndices(0, 10, 1).empty());
}

// Every index should be drawn with roughly equal frequency.
TEST(SampleIndicesTest, RoughlyUniform) {
  std::vector<int> hits(20, 0);
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    for (auto i : SampleIndices(20, 5, seed)) ++hits[i];
  }
  for (int h : hits) {
    EXPECT_GT(h, 400);
    EXPECT_LT(h, 600);
  }
}

// --- Config ----------------------------------------------------------------

TEST(ConfigTest, LoadsFixtureWithRelativePaths) {
  const auto c = LoadConfig(testing::Fixture("campaign.toml"), NoEnv());
  EXPECT_EQ(c.dataset, testing::Fixture("sentiment.csv"));
  EXPECT_EQ(c.labels, kBinary);
  ASSERT_TRUE(c.mock_weights.has_value());
  EXPECT_EQ(*c.mock_weights, testing::Fixture("mock_sentiment.tsv"));
  EXPECT_EQ(c.variant, SearchVariant::kAbs);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.max_change_rate, 1.0);
  EXPECT_EQ(c.out_dir, testing::Fixture("out"));
  EXPECT_NO_THROW(c.Validate());
}

TEST(ConfigTest, EnvironmentOverridesFile) {
  const auto c = LoadConfig(testing::Fixture("campaign.toml"),
                            MapEnv({{"TEXTPROBE_CAMPAIGN_SEED", "9"},
                                    {"TEXTPROBE_SEARCH_VARIANT", "standard"},
                                    {"TEXTPROBE_DATASET_LABELS", "negative,positive"},
                                    {"TEXTPROBE_SEARCH_MAX_QUERIES", "500"}}));
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.variant, SearchVariant::kStandard);
  EXPECT_EQ(c.labels, (LabelSet{"negative", "positive"}));
  EXPECT_EQ(c.max_queries, 500u);
  EXPECT_THROW(LoadConfig(testing::Fixture("campaign.toml"),
                          MapEnv({{"TEXTPROBE_CAMPAIGN_SEED", "nine"}})),
               ConfigError);
}

TEST(ConfigTest, UnknownKeysAndSections) {
  EXPECT_THROW(ParseConfig("[search]\nbeam = 3\n", ".", "x.toml", NoEnv()), ConfigError);
  EXPECT_THROW(ParseConfig("[searching]\n", ".", "x.toml", NoEnv()), ConfigError);
  EXPECT_THROW(ParseConfig("[search]\nb_min = \"one\"\n", ".", "x.toml", NoEnv()), ConfigError);
  EXPECT_THROW(ParseConfig("[search]\nvariant = \"greedy\"\n", ".", "x.toml", NoEnv()),
               ConfigError);
}

TEST(ConfigTest, SyntaxErrorHasLine) {
  try {
    ParseConfig("[search]\nb_min = 1\nb_max = = 2\n", ".", "x.toml", NoEnv());
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(ConfigTest, Defaults) {
  const auto c = ConfigFromEnvironment(NoEnv());
  EXPECT_EQ(c.b_min, 1);
  EXPECT_EQ(c.b_max, 6);
  EXPECT_TRUE(c.cache);
  EXPECT_TRUE(c.stop_words);
  EXPECT_EQ(c.max_change_rate, 0.25);
  EXPECT_EQ(c.edit_kinds, (std::vector<EditKind>{EditKind::kSynonym}));
  EXPECT_EQ(c.c_rate_scope, ChangeRateScope::kJoint);
}

TEST(ConfigTest, ValidationAndSearchConfig) {
  CampaignConfig c = ConfigFromEnvironment(NoEnv());
  c.dataset = "d.csv";
  c.labels = kBinary;
  c.mock_weights = "m.tsv";
  c.lexicon = "l.tsv";
  EXPECT_NO_THROW(c.Validate());
  c.beam_width = 3;
  EXPECT_THROW(c.ToSearchConfig(), ConfigError);
  c.variant = SearchVariant::kNoAw;
  EXPECT_EQ(c.ToSearchConfig().fixed_width, 3);
  c.endpoint = "http://localhost:1/v1";
  EXPECT_THROW(c.Validate(), ConfigError);  // both backends
  c.endpoint.reset();
  c.mock_weights.reset();
  EXPECT_THROW(c.Validate(), ConfigError);  // no backend
}

TEST(ConfigTest, ResolvedJsonHasNoSecret) {
  CampaignConfig c = ConfigFromEnvironment(NoEnv());
  c.api_key_env = "MY_KEY";
  c.endpoint = "http://localhost:1/v1";
  const auto j = nlohmann::json::parse(ResolvedConfigJson(c));
  EXPECT_EQ(j["model"]["api_key_env"], "MY_KEY");
  EXPECT_EQ(ResolvedConfigJson(c).find("sk-"), std::string::npos);
}

TEST(ConfigTest, ModeNames) {
  for (auto m : {PerplexityMode::kNone, PerplexityMode::kUniform, PerplexityMode::kNgram,
                 PerplexityMode::kRemote}) {
    EXPECT_EQ(ParsePerplexityMode(PerplexityModeName(m)), m);
  }
}

}  // namespace
}  // namespace textprobe
