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

#include "textprobe/text.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <set>
#include <utility>

#include "textprobe/errors.h"

namespace textprobe {
namespace {

constexpr std::array<std::pair<EditKind, std::string_view>, 7> kEditKindNames{{
    {EditKind::kSynonym, "synonym"},
    {EditKind::kCharInsert, "char-insert"},
    {EditKind::kCharDelete, "char-delete"},
    {EditKind::kCharSwap, "char-swap"},
    {EditKind::kWordInsert, "word-insert"},
    {EditKind::kWordDelete, "word-delete"},
    {EditKind::kWordSwap, "word-swap"},
}};

bool IsAsciiPunct(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

// Decodes one UTF-8 sequence starting at `offset`. Returns the code point and
// stores its byte length; malformed input decodes as the raw byte.
std::uint32_t DecodeUtf8(std::string_view text, std::size_t offset,
                         std::size_t* length) {
  const auto lead = static_cast<unsigned char>(text[offset]);
  std::size_t len = 1;
  std::uint32_t cp = lead;
  if (lead >= 0xF0 && lead < 0xF8) {
    len = 4;
    cp = lead & 0x07;
  } else if (lead >= 0xE0) {
    len = 3;
    cp = lead & 0x0F;
  } else if (lead >= 0xC0) {
    len = 2;
    cp = lead & 0x1F;
  } else {
    *length = 1;
    return lead;
  }
  if (offset + len > text.size()) {
    *length = 1;
    return lead;
  }
  for (std::size_t k = 1; k < len; ++k) {
    const auto cont = static_cast<unsigned char>(text[offset + k]);
    if ((cont & 0xC0) != 0x80) {
      *length = 1;
      return lead;
    }
    cp = (cp << 6) | (cont & 0x3F);
  }
  *length = len;
  return cp;
}

bool IsSpaceCodePoint(std::uint32_t cp) {
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

bool EndsWithSpace(const std::string& s) {
  if (s.empty()) return false;
  // Only ASCII whitespace is produced by trimming, which is all we look for.
  return std::isspace(static_cast<unsigned char>(s.back())) != 0;
}

std::string_view TrimLeadingSpace(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t len = 0;
    if (!IsUnicodeSpace(s, i, &len)) break;
    i += len;
  }
  return s.substr(i);
}

}  // namespace

std::string_view EditKindName(EditKind kind) {
  for (const auto& [k, name] : kEditKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<EditKind> ParseEditKind(std::string_view name) {
  for (const auto& [k, n] : kEditKindNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

bool IsUnicodeSpace(std::string_view text, std::size_t offset,
                    std::size_t* length) {
  std::size_t len = 0;
  const std::uint32_t cp = DecodeUtf8(text, offset, &len);
  if (length != nullptr) *length = len;
  return IsSpaceCodePoint(cp);
}

std::vector<std::string> Utf8Chars(std::string_view text) {
  std::vector<std::string> chars;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t len = 0;
    DecodeUtf8(text, i, &len);
    chars.emplace_back(text.substr(i, len));
    i += len;
  }
  return chars;
}

std::string ToLowerAscii(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

TextSequence::TextSequence()
    : separators_(std::make_shared<const std::vector<std::string>>(
          std::vector<std::string>{""})),
      protected_(std::make_shared<const std::vector<bool>>()) {}

bool TextSequence::is_protected(std::size_t position) const {
  return position < protected_->size() && (*protected_)[position];
}

std::vector<std::size_t> TextSequence::protected_positions() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < protected_->size(); ++i) {
    if ((*protected_)[i]) out.push_back(i);
  }
  return out;
}

std::size_t TextSequence::perturbable_count() const {
  return size() - protected_positions().size();
}

std::string TextSequence::Detokenize() const {
  const auto& seps = *separators_;
  std::string out;
  bool after_deleted = false;
  for (std::size_t i = 0; i <= tokens_.size(); ++i) {
    std::string_view sep = seps[i];
    // A deleted (empty) token must not leave a doubled gap behind.
    if (after_deleted && (out.empty() || EndsWithSpace(out))) {
      sep = TrimLeadingSpace(sep);
    }
    out.append(sep);
    if (i < tokens_.size()) {
      out.append(tokens_[i]);
      after_deleted = tokens_[i].empty();
    }
  }
  return out;
}

TextSequence TextSequence::WithToken(std::size_t position,
                                     std::string replacement) const {
  if (position >= tokens_.size()) {
    throw PositionOutOfRangeError("position " + std::to_string(position) +
                                  " out of range for " +
                                  std::to_string(tokens_.size()) + " tokens");
  }
  TextSequence copy = *this;
  copy.tokens_[position] = std::move(replacement);
  return copy;
}

bool TextSequence::operator==(const TextSequence& other) const {
  return tokens_ == other.tokens_ && *separators_ == *other.separators_ &&
         prompt_len_ == other.prompt_len_ &&
         protected_positions() == other.protected_positions();
}

TextSequence Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::vector<std::string> seps;
  std::string pending;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t len = 0;
    if (IsUnicodeSpace(text, i, &len)) {
      pending.append(text.substr(i, len));
      i += len;
      continue;
    }
    std::size_t j = i;
    while (j < text.size()) {
      std::size_t l = 0;
      if (IsUnicodeSpace(text, j, &l)) break;
      j += l;
    }
    const std::string_view chunk = text.substr(i, j - i);
    std::size_t a = 0;
    while (a < chunk.size() && IsAsciiPunct(chunk[a])) ++a;
    std::size_t b = chunk.size();
    while (b > a && IsAsciiPunct(chunk[b - 1])) --b;
    if (a == b) {
      pending.append(chunk);
    } else {
      pending.append(chunk.substr(0, a));
      seps.push_back(std::move(pending));
      tokens.emplace_back(chunk.substr(a, b - a));
      pending.assign(chunk.substr(b));
    }
    i = j;
  }
  seps.push_back(std::move(pending));

  TextSequence seq;
  seq.protected_ = std::make_shared<const std::vector<bool>>(tokens.size(),
                                                             false);
  seq.tokens_ = std::move(tokens);
  seq.separators_ =
      std::make_shared<const std::vector<std::string>>(std::move(seps));
  return seq;
}

TextSequence JoinPromptExample(std::string_view prompt,
                               std::string_view example,
                               const std::vector<std::string>& protected_spans) {
  const TextSequence prompt_seq = Tokenize(prompt);

  // Byte ranges of prompt tokens.
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  std::size_t offset = 0;
  for (std::size_t t = 0; t < prompt_seq.size(); ++t) {
    offset += prompt_seq.separators()[t].size();
    ranges.emplace_back(offset, offset + prompt_seq.token(t).size());
    offset += prompt_seq.token(t).size();
  }

  std::set<std::size_t> marked;
  for (const std::string& span : protected_spans) {
    if (span.empty()) continue;
    for (std::size_t pos = prompt.find(span); pos != std::string_view::npos;
         pos = prompt.find(span, pos + 1)) {
      const std::size_t end = pos + span.size();
      for (std::size_t t = 0; t < ranges.size(); ++t) {
        if (ranges[t].first < end && pos < ranges[t].second) marked.insert(t);
      }
    }
  }

  std::string joined(prompt);
  if (!prompt.empty() && !example.empty()) joined.push_back(' ');
  joined.append(example);

  TextSequence seq = Tokenize(joined);
  std::vector<bool> mask(seq.size(), false);
  for (std::size_t t : marked) mask[t] = true;
  seq.protected_ = std::make_shared<const std::vector<bool>>(std::move(mask));
  seq.prompt_len_ = prompt_seq.size();
  return seq;
}

void ValidateEdits(const TextSequence& seq, const EditList& edits) {
  std::set<std::size_t> seen;
  for (const Edit& e : edits) {
    if (e.position >= seq.size()) {
      throw PositionOutOfRangeError(
          "edit position " + std::to_string(e.position) + " out of range for " +
          std::to_string(seq.size()) + " tokens");
    }
    if (seq.is_protected(e.position)) {
      throw EditOnProtectedError("edit targets protected position " +
                                 std::to_string(e.position));
    }
    if (!seen.insert(e.position).second) {
      throw InvalidEditError("more than one edit at position " +
                             std::to_string(e.position));
    }
    if (seq.token(e.position) != e.original) {
      throw InvalidEditError("edit at position " + std::to_string(e.position) +
                             " expects '" + e.original + "' but found '" +
                             seq.token(e.position) + "'");
    }
  }
}

TextSequence ApplyEdits(const TextSequence& seq, const EditList& edits) {
  ValidateEdits(seq, edits);
  TextSequence out = seq;
  for (const Edit& e : edits) out = out.WithToken(e.position, e.replacement);
  return out;
}

std::size_t ChangeCount(const TextSequence& original,
                        const TextSequence& perturbed) {
  if (original.size() != perturbed.size()) {
    throw InvalidEditError("change count requires equal-length sequences");
  }
  std::size_t n = 0;
  for (std::size_t i = 0; i < original.size(); ++i) {
    if (original.token(i) != perturbed.token(i)) ++n;
  }
  return n;
}

}  // namespace textprobe
