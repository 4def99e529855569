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

// Goal function, perturbations and constraints: the three pluggable pieces a
// search method combines.

#ifndef TEXTPROBE_TRANSFORMS_H_
#define TEXTPROBE_TRANSFORMS_H_

#include <cstddef>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "textprobe/lexical.h"
#include "textprobe/text.h"
#include "textprobe/threat_model.h"

namespace textprobe {

// Untargeted: any label other than the ground truth counts as success.
struct GoalFunction {
  std::string ground_truth;
};

struct GoalScore {
  // Confidence of the ground-truth label; lower is better for the search.
  double value = 1.0;
  bool succeeded = false;
  // Predicted label: the ground truth unless succeeded, otherwise the
  // highest-scoring other label.
  std::string label;
};

// succeeded iff some other label scores strictly higher than the ground
// truth. Throws LabelMismatchError when the ground truth is not scored.
GoalScore EvaluateGoal(const GoalFunction& goal, const Prediction& prediction);

// --- Constraints -----------------------------------------------------------

// Rejects edits at positions holding a stop word.
struct StopWordConstraint {
  std::shared_ptr<const StopWordList> words;
};
// Changed positions / perturbable positions must not exceed `rate`.
struct MaxChangeRateConstraint {
  double rate = 0.25;
};
// Original and replacement must share a POS tag. Words the lexicon does not
// know are not judged.
struct PosMatchConstraint {
  std::shared_ptr<const PosLexicon> lexicon;
};
// No replacement may introduce one of these (lowercase) words.
struct BlacklistConstraint {
  std::set<std::string> words;
};
struct MaxEditsConstraint {
  std::size_t max_edits = 1;
};

using Constraint =
    std::variant<StopWordConstraint, MaxChangeRateConstraint,
                 PosMatchConstraint, BlacklistConstraint, MaxEditsConstraint>;

std::string ConstraintName(const Constraint& constraint);
// Throws ConfigError for out-of-range parameters or missing resources.
void ValidateConstraint(const Constraint& constraint);

struct ConstraintCheck {
  bool ok = true;
  std::vector<std::string> violations;
};

// `candidate` must be derived from `original` by single-position edits, so
// both have the same length.
ConstraintCheck CheckConstraints(const std::vector<Constraint>& constraints,
                                 const TextSequence& original,
                                 const TextSequence& candidate);

// --- Perturbations ---------------------------------------------------------

struct PerturbationOptions {
  // Characters tried by char-insert at every interior boundary.
  std::string insert_alphabet = "aeiou";
};

class Perturbation {
 public:
  // Throws ConfigError when a lexicon-backed kind has no lexicon.
  Perturbation(std::vector<EditKind> kinds,
               std::shared_ptr<const SynonymLexicon> lexicon = nullptr,
               PerturbationOptions options = {});

  static Perturbation Synonym(std::shared_ptr<const SynonymLexicon> lexicon) {
    return Perturbation({EditKind::kSynonym}, std::move(lexicon));
  }

  const std::vector<EditKind>& kinds() const { return kinds_; }
  const SynonymLexicon* lexicon() const { return lexicon_.get(); }
  const PerturbationOptions& options() const { return options_; }

  // Candidate replacement tokens for `token`, for one edit kind, in a fixed
  // order, without duplicates and without `token` itself.
  std::vector<std::string> Replacements(EditKind kind, const std::string& token,
                                        const TextSequence& seq) const;

 private:
  std::vector<EditKind> kinds_;
  std::shared_ptr<const SynonymLexicon> lexicon_;
  PerturbationOptions options_;
};

struct Neighbor {
  TextSequence seq;
  // Empty for the unchanged parent.
  std::optional<Edit> edit;
};

// The unchanged parent first, then every single edit at `position`. Protected
// positions, out-of-range positions and (when `stop_words` is given) stop-word
// positions yield the parent only.
std::vector<Neighbor> Neighbors(const Perturbation& perturbation,
                                const TextSequence& seq, std::size_t position,
                                const StopWordList* stop_words = nullptr);

}  // namespace textprobe

#endif  // TEXTPROBE_TRANSFORMS_H_
