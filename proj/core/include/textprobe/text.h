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

// Word-level text representation shared by every other module.
//
// A TextSequence stores the word tokens of a string together with the exact
// inter-token material (whitespace and detached punctuation);
// Detokenize(Tokenize(s)) == s for any input. Sequences are immutable values;
// edits produce new sequences that share the separator and protection storage
// of their parent.

#ifndef TEXTPROBE_TEXT_H_
#define TEXTPROBE_TEXT_H_

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace textprobe {

enum class EditKind {
  kSynonym,
  kCharInsert,
  kCharDelete,
  kCharSwap,
  kWordInsert,
  kWordDelete,
  kWordSwap,
};

std::string_view EditKindName(EditKind kind);
std::optional<EditKind> ParseEditKind(std::string_view name);

struct Edit {
  std::size_t position = 0;
  std::string original;
  std::string replacement;
  EditKind kind = EditKind::kSynonym;

  bool operator==(const Edit&) const = default;
};

// Ordered edits, at most one per position.
using EditList = std::vector<Edit>;

class TextSequence {
 public:
  TextSequence();

  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::string& token(std::size_t i) const { return tokens_.at(i); }
  // separators()[i] precedes token i; the last entry trails the final token.
  // Always tokens().size() + 1 entries.
  const std::vector<std::string>& separators() const { return *separators_; }

  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  std::size_t prompt_len() const { return prompt_len_; }

  bool is_protected(std::size_t position) const;
  std::vector<std::size_t> protected_positions() const;
  // Number of positions that may be perturbed.
  std::size_t perturbable_count() const;

  std::string Detokenize() const;

  // Returns a copy whose token at `position` is `replacement`. Does not check
  // protection; ApplyEdits is the validated entry point.
  TextSequence WithToken(std::size_t position, std::string replacement) const;

  // Tokens and layout equal; protection is ignored.
  bool SameText(const TextSequence& other) const {
    return tokens_ == other.tokens_;
  }
  bool operator==(const TextSequence& other) const;

 private:
  friend TextSequence Tokenize(std::string_view text);
  friend TextSequence JoinPromptExample(
      std::string_view prompt, std::string_view example,
      const std::vector<std::string>& protected_spans);

  std::vector<std::string> tokens_;
  std::shared_ptr<const std::vector<std::string>> separators_;
  std::shared_ptr<const std::vector<bool>> protected_;
  std::size_t prompt_len_ = 0;
};

// Splits on unicode whitespace; leading and trailing ASCII punctuation of each
// whitespace-delimited chunk is detached into the separators.
TextSequence Tokenize(std::string_view text);

// Tokenizes "prompt example" and records the prompt's token count. Every token
// overlapping a literal occurrence of one of `protected_spans` inside the
// prompt is marked protected. Spans that do not occur are ignored.
TextSequence JoinPromptExample(
    std::string_view prompt, std::string_view example,
    const std::vector<std::string>& protected_spans = {});

// Checks the EditList invariants against `seq`: positions in range, unique,
// unprotected, and `original` matching the current token.
void ValidateEdits(const TextSequence& seq, const EditList& edits);

// Throws EditOnProtectedError, PositionOutOfRangeError, or InvalidEditError.
TextSequence ApplyEdits(const TextSequence& seq, const EditList& edits);

// Number of positions whose tokens differ. Sequences must have equal length.
std::size_t ChangeCount(const TextSequence& original,
                        const TextSequence& perturbed);

// UTF-8 helpers. Invalid bytes pass through as single-byte characters.
std::vector<std::string> Utf8Chars(std::string_view text);
bool IsUnicodeSpace(std::string_view text, std::size_t offset,
                    std::size_t* length);
std::string ToLowerAscii(std::string_view text);

}  // namespace textprobe

#endif  // TEXTPROBE_TEXT_H_
