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

#include "textprobe/transforms.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "textprobe/errors.h"

namespace textprobe {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string Join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += p;
  return out;
}

// Appends `s` unless it equals `token` or is already present.
void PushUnique(std::vector<std::string>& out, std::string s,
                const std::string& token) {
  if (s == token) return;
  if (std::find(out.begin(), out.end(), s) != out.end()) return;
  out.push_back(std::move(s));
}

std::vector<std::size_t> ChangedPositions(const TextSequence& original,
                                          const TextSequence& candidate) {
  if (original.size() != candidate.size()) {
    throw InvalidEditError("candidate length differs from original");
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < original.size(); ++i) {
    if (original.token(i) != candidate.token(i)) out.push_back(i);
  }
  return out;
}

std::string FormatRate(double r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

}  // namespace

GoalScore EvaluateGoal(const GoalFunction& goal, const Prediction& prediction) {
  GoalScore s;
  s.value = prediction.score(goal.ground_truth);
  s.label = goal.ground_truth;
  double top = s.value;
  for (const auto& [label, score] : prediction.scores) {
    if (label != goal.ground_truth && score > top) {
      s.succeeded = true;
      s.label = label;
      top = score;
    }
  }
  return s;
}

std::string ConstraintName(const Constraint& constraint) {
  return std::visit(
      Overloaded{
          [](const StopWordConstraint&) { return std::string("stop-word-filter"); },
          [](const MaxChangeRateConstraint& c) {
            return "max-change-rate(" + FormatRate(c.rate) + ")";
          },
          [](const PosMatchConstraint&) { return std::string("pos-match"); },
          [](const BlacklistConstraint&) { return std::string("blacklist"); },
          [](const MaxEditsConstraint& c) {
            return "max-edits(" + std::to_string(c.max_edits) + ")";
          },
      },
      constraint);
}

void ValidateConstraint(const Constraint& constraint) {
  std::visit(
      Overloaded{
          [](const StopWordConstraint& c) {
            if (!c.words || c.words->empty()) {
              throw ConfigError("stop-word filter needs a non-empty list");
            }
          },
          [](const MaxChangeRateConstraint& c) {
            if (!(c.rate > 0.0 && c.rate <= 1.0)) {
              throw ConfigError("max-change-rate must be in (0, 1]");
            }
          },
          [](const PosMatchConstraint& c) {
            if (!c.lexicon) throw ConfigError("pos-match needs a POS lexicon");
          },
          [](const BlacklistConstraint&) {},
          [](const MaxEditsConstraint& c) {
            if (c.max_edits < 1) throw ConfigError("max-edits must be >= 1");
          },
      },
      constraint);
}

ConstraintCheck CheckConstraints(const std::vector<Constraint>& constraints,
                                 const TextSequence& original,
                                 const TextSequence& candidate) {
  const std::vector<std::size_t> changed = ChangedPositions(original, candidate);
  ConstraintCheck check;
  auto fail = [&](const Constraint& c, const std::string& detail) {
    check.ok = false;
    check.violations.push_back(ConstraintName(c) + ": " + detail);
  };
  for (const Constraint& c : constraints) {
    std::visit(
        Overloaded{
            [&](const StopWordConstraint& sw) {
              for (std::size_t i : changed) {
                if (sw.words->Contains(original.token(i))) {
                  fail(c, "stop word '" + original.token(i) + "' at " +
                              std::to_string(i));
                  return;
                }
              }
            },
            [&](const MaxChangeRateConstraint& mc) {
              if (changed.empty()) return;
              const std::size_t scope = original.perturbable_count();
              const double limit = mc.rate * static_cast<double>(scope);
              if (scope == 0 || static_cast<double>(changed.size()) > limit) {
                fail(c, std::to_string(changed.size()) + "/" +
                            std::to_string(scope) + " positions changed");
              }
            },
            [&](const PosMatchConstraint& pm) {
              for (std::size_t i : changed) {
                const PosTagSet a = pm.lexicon->Tags(original.token(i));
                const PosTagSet b = pm.lexicon->Tags(candidate.token(i));
                if (a != 0 && b != 0 && (a & b) == 0) {
                  fail(c, "'" + original.token(i) + "' (" + PosTagSetToString(a) +
                              ") vs '" + candidate.token(i) + "' (" +
                              PosTagSetToString(b) + ")");
                  return;
                }
              }
            },
            [&](const BlacklistConstraint& bl) {
              for (std::size_t i : changed) {
                const TextSequence words = Tokenize(candidate.token(i));
                for (const auto& w : words.tokens()) {
                  if (bl.words.count(ToLowerAscii(w)) > 0) {
                    fail(c, "replacement introduces '" + w + "'");
                    return;
                  }
                }
              }
            },
            [&](const MaxEditsConstraint& me) {
              if (changed.size() > me.max_edits) {
                fail(c, std::to_string(changed.size()) + " edits");
              }
            },
        },
        c);
  }
  return check;
}

Perturbation::Perturbation(std::vector<EditKind> kinds,
                           std::shared_ptr<const SynonymLexicon> lexicon,
                           PerturbationOptions options)
    : kinds_(std::move(kinds)),
      lexicon_(std::move(lexicon)),
      options_(std::move(options)) {
  if (kinds_.empty()) throw ConfigError("perturbation needs at least one kind");
  for (EditKind k : kinds_) {
    if ((k == EditKind::kSynonym || k == EditKind::kWordInsert) && !lexicon_) {
      throw ConfigError(std::string(EditKindName(k)) + " requires a lexicon");
    }
  }
}

std::vector<std::string> Perturbation::Replacements(
    EditKind kind, const std::string& token, const TextSequence& seq) const {
  std::vector<std::string> out;
  if (token.empty()) return out;
  const std::vector<std::string> chars = Utf8Chars(token);
  switch (kind) {
    case EditKind::kSynonym:
      for (auto& s : lexicon_->Synonyms(token)) PushUnique(out, std::move(s), token);
      break;
    case EditKind::kCharInsert: {
      const std::vector<std::string> alphabet = Utf8Chars(options_.insert_alphabet);
      for (std::size_t k = 1; k < chars.size(); ++k) {
        for (const auto& a : alphabet) {
          std::vector<std::string> c = chars;
          c.insert(c.begin() + static_cast<std::ptrdiff_t>(k), a);
          PushUnique(out, Join(c), token);
        }
      }
      break;
    }
    case EditKind::kCharDelete:
      if (chars.size() < 2) break;
      for (std::size_t k = 0; k < chars.size(); ++k) {
        std::vector<std::string> c = chars;
        c.erase(c.begin() + static_cast<std::ptrdiff_t>(k));
        PushUnique(out, Join(c), token);
      }
      break;
    case EditKind::kCharSwap:
      for (std::size_t k = 0; k + 1 < chars.size(); ++k) {
        std::vector<std::string> c = chars;
        std::swap(c[k], c[k + 1]);
        PushUnique(out, Join(c), token);
      }
      break;
    case EditKind::kWordInsert:
      for (const auto& s : lexicon_->Synonyms(ToLowerAscii(token))) {
        PushUnique(out, token + " " + s, token);
      }
      break;
    case EditKind::kWordDelete:
      out.emplace_back();
      break;
    case EditKind::kWordSwap:
      for (const auto& other : seq.tokens()) {
        if (!other.empty()) PushUnique(out, other, token);
      }
      break;
  }
  return out;
}

std::vector<Neighbor> Neighbors(const Perturbation& perturbation,
                                const TextSequence& seq, std::size_t position,
                                const StopWordList* stop_words) {
  std::vector<Neighbor> out;
  out.push_back(Neighbor{seq, std::nullopt});
  if (position >= seq.size() || seq.is_protected(position)) return out;
  const std::string& token = seq.token(position);
  if (stop_words != nullptr && stop_words->Contains(token)) return out;

  std::vector<std::string> seen;
  for (EditKind kind : perturbation.kinds()) {
    for (auto& r : perturbation.Replacements(kind, token, seq)) {
      if (std::find(seen.begin(), seen.end(), r) != seen.end()) continue;
      seen.push_back(r);
      Edit e{position, token, r, kind};
      out.push_back(Neighbor{seq.WithToken(position, std::move(r)), std::move(e)});
    }
  }
  return out;
}

}  // namespace textprobe
