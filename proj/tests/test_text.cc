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

#include <string>
#include <vector>

#include "textprobe/errors.h"
#include "textprobe/text.h"

namespace textprobe {
namespace {

constexpr char kPromptedExample[] =
    "Net sales in 2007 are expected to be 10% up on 2006.";

TEST(TokenizeTest, WhitespaceSplit) {
  const TextSequence seq = Tokenize("the cat sat");
  EXPECT_EQ(seq.tokens(), (std::vector<std::string>{"the", "cat", "sat"}));
  EXPECT_EQ(seq.separators().size(), 4u);
}

TEST(TokenizeTest, EmptyInput) {
  const TextSequence seq = Tokenize("");
  EXPECT_TRUE(seq.empty());
  EXPECT_EQ(seq.Detokenize(), "");
}

TEST(TokenizeTest, PromptedExampleRoundTrips) {
  const TextSequence seq = Tokenize(kPromptedExample);
  // "10%" splits into the word "10" and a trailing "%" separator.
  EXPECT_EQ(seq.size(), 12u);
  EXPECT_EQ(seq.token(8), "10");
  EXPECT_EQ(seq.token(11), "2006");
  EXPECT_EQ(seq.separators().back(), ".");
  EXPECT_EQ(seq.Detokenize(), kPromptedExample);
}

TEST(TokenizeTest, PunctuationDetached) {
  const TextSequence seq = Tokenize("\"Hello,\" she said... (quietly)");
  EXPECT_EQ(seq.tokens(),
            (std::vector<std::string>{"Hello", "she", "said", "quietly"}));
  EXPECT_EQ(seq.separators()[0], "\"");
  EXPECT_EQ(seq.separators()[1], ",\" ");
}

TEST(TokenizeTest, InnerPunctuationStays) {
  const TextSequence seq = Tokenize("don't over-react e.g.");
  EXPECT_EQ(seq.tokens(), (std::vector<std::string>{"don't", "over-react", "e.g"}));
}

TEST(TokenizeTest, PunctuationOnlyChunkIsSeparator) {
  const TextSequence seq = Tokenize("wait -- what ?!");
  EXPECT_EQ(seq.tokens(), (std::vector<std::string>{"wait", "what"}));
  EXPECT_EQ(seq.Detokenize(), "wait -- what ?!");
}

TEST(TokenizeTest, UnicodeWhitespace) {
  const std::string text = "caf\xC3\xA9\xE2\x80\x83na\xC3\xAFve\xC2\xA0" "end";
  const TextSequence seq = Tokenize(text);
  ASSERT_EQ(seq.size(), 3u);
  EXPECT_EQ(seq.token(0), "caf\xC3\xA9");
  EXPECT_EQ(seq.token(1), "na\xC3\xAFve");
  EXPECT_EQ(seq.Detokenize(), text);
}

TEST(TokenizeTest, RoundTripCorpus) {
  const std::vector<std::string> corpus = {
      "  leading and trailing  ",
      "tabs\tand\nnewlines\r\n",
      "!!!",
      "a,b,c",
      "Mr. Smith's car (red) costs $5,000.00!",
      "emoji \xF0\x9F\x98\x80 here",
      "invalid \xFF byte",
      kPromptedExample,
  };
  for (const auto& text : corpus) {
    EXPECT_EQ(Tokenize(text).Detokenize(), text) << text;
  }
}

TEST(JoinPromptExampleTest, CountsPromptTokens) {
  const TextSequence seq = JoinPromptExample("Classify:", "good movie");
  EXPECT_EQ(seq.size(), 3u);
  EXPECT_EQ(seq.prompt_len(), 1u);
  EXPECT_EQ(seq.Detokenize(), "Classify: good movie");
}

TEST(JoinPromptExampleTest, EmptyPrompt) {
  const TextSequence seq = JoinPromptExample("", "good movie");
  EXPECT_EQ(seq.prompt_len(), 0u);
  EXPECT_EQ(seq.size(), 2u);
  EXPECT_EQ(seq.Detokenize(), "good movie");
}

TEST(JoinPromptExampleTest, ProtectsFormatSpan) {
  const std::string prompt =
      "Please only output the label and the confidence score to three decimal "
      "places, in the format '[negative]+[confidence score for "
      "negative],[positive]+[confidence score for positive]', and nothing "
      "else. My first text is:";
  const std::string span =
      "'[negative]+[confidence score for negative],[positive]+[confidence "
      "score for positive]'";
  const TextSequence seq = JoinPromptExample(prompt, "a good movie", {span});
  const TextSequence prompt_only = Tokenize(prompt);
  EXPECT_EQ(seq.prompt_len(), prompt_only.size());
  EXPECT_EQ(seq.size(), prompt_only.size() + 3);
  for (std::size_t i = 0; i < seq.prompt_len(); ++i) {
    EXPECT_EQ(seq.token(i), prompt_only.token(i));
  }
  // Tokens from "negative]+[confidence" to "positive]'" are protected.
  const auto prot = seq.protected_positions();
  ASSERT_FALSE(prot.empty());
  for (std::size_t p : prot) EXPECT_LT(p, seq.prompt_len());
  EXPECT_EQ(seq.token(prot.front()), "negative]+[confidence");
  EXPECT_EQ(seq.token(prot.back()), "positive");
  EXPECT_FALSE(seq.is_protected(seq.prompt_len()));
  EXPECT_EQ(seq.perturbable_count(), seq.size() - prot.size());
}

TEST(JoinPromptExampleTest, MissingSpanIgnored) {
  const TextSequence seq = JoinPromptExample("Classify:", "x", {"absent"});
  EXPECT_TRUE(seq.protected_positions().empty());
}

TEST(ApplyEditsTest, SingleSubstitution) {
  const TextSequence seq = Tokenize("good");
  const TextSequence out =
      ApplyEdits(seq, {Edit{0, "good", "fine", EditKind::kSynonym}});
  EXPECT_EQ(out.tokens(), std::vector<std::string>{"fine"});
}

TEST(ApplyEditsTest, EmptyEditListIsIdentity) {
  const TextSequence seq = Tokenize("a b c");
  EXPECT_EQ(ApplyEdits(seq, {}), seq);
}

TEST(ApplyEditsTest, PromptedEdits) {
  const std::string text =
      "I want to see the debates before I decide how to vote.";
  const TextSequence seq = Tokenize(text);
  const EditList edits = {Edit{1, "want", "hope", EditKind::kSynonym},
                          Edit{5, "debates", "discussions", EditKind::kSynonym}};
  const TextSequence out = ApplyEdits(seq, edits);
  EXPECT_EQ(out.Detokenize(),
            "I hope to see the discussions before I decide how to vote.");
  EXPECT_EQ(ChangeCount(seq, out), 2u);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i != 1 && i != 5) EXPECT_EQ(seq.token(i), out.token(i));
  }
  EXPECT_EQ(out.separators(), seq.separators());
}

TEST(ApplyEditsTest, Errors) {
  const TextSequence seq = JoinPromptExample("keep this", "a b", {"keep"});
  EXPECT_THROW(ApplyEdits(seq, {Edit{9, "x", "y", EditKind::kSynonym}}),
               PositionOutOfRangeError);
  EXPECT_THROW(ApplyEdits(seq, {Edit{0, "keep", "y", EditKind::kSynonym}}),
               EditOnProtectedError);
  EXPECT_THROW(ApplyEdits(seq, {Edit{2, "a", "y", EditKind::kSynonym},
                                Edit{2, "a", "z", EditKind::kSynonym}}),
               InvalidEditError);
  EXPECT_THROW(ApplyEdits(seq, {Edit{2, "wrong", "y", EditKind::kSynonym}}),
               InvalidEditError);
}

TEST(ApplyEditsTest, ProtectionPreserved) {
  const TextSequence seq = JoinPromptExample("keep this", "a b", {"keep"});
  const TextSequence out = ApplyEdits(seq, {Edit{3, "b", "c", EditKind::kSynonym}});
  EXPECT_EQ(out.protected_positions(), seq.protected_positions());
  EXPECT_EQ(out.prompt_len(), 2u);
}

TEST(ApplyEditsTest, EditLocalityProperty) {
  const TextSequence seq = Tokenize("one two three four five six seven eight");
  for (std::size_t mask = 0; mask < (1u << seq.size()); ++mask) {
    EditList edits;
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (mask & (1u << i)) {
        edits.push_back(Edit{i, seq.token(i), "X" + std::to_string(i),
                             EditKind::kSynonym});
      }
    }
    const TextSequence out = ApplyEdits(seq, edits);
    EXPECT_EQ(ChangeCount(seq, out), edits.size());
  }
}

TEST(DetokenizeTest, DeletedTokenLeavesSingleGap) {
  const TextSequence seq = Tokenize("a very good movie");
  EXPECT_EQ(seq.WithToken(1, "").Detokenize(), "a good movie");
  EXPECT_EQ(seq.WithToken(0, "").Detokenize(), "very good movie");
}

TEST(EditKindTest, NamesRoundTrip) {
  for (EditKind k : {EditKind::kSynonym, EditKind::kCharInsert,
                     EditKind::kCharDelete, EditKind::kCharSwap,
                     EditKind::kWordInsert, EditKind::kWordDelete,
                     EditKind::kWordSwap}) {
    EXPECT_EQ(ParseEditKind(EditKindName(k)), k);
  }
  EXPECT_FALSE(ParseEditKind("bogus"));
}

TEST(Utf8Test, CharsAndLowercase) {
  EXPECT_EQ(Utf8Chars("a\xC3\xA9z").size(), 3u);
  EXPECT_EQ(ToLowerAscii("MiXeD"), "mixed");
}

}  // namespace
}  // namespace textprobe
