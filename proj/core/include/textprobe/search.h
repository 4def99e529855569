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

// Word importance ranking and the adaptive backtracking beam search.
//
// The search visits positions once each, in importance order. Every
// iteration expands each beam member at the current position (the unchanged
// member is always one of its own children), scores the survivors of the
// constraint check, and stops as soon as one of them flips the label. The
// next beam is the top-b children by ground-truth confidence, where b adapts
// to the fraction of beam members that improved on their parent, and the best
// candidate ever scored is swapped back in for the worst beam member when it
// beats it.

#ifndef TEXTPROBE_SEARCH_H_
#define TEXTPROBE_SEARCH_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "textprobe/lexical.h"
#include "textprobe/text.h"
#include "textprobe/threat_model.h"
#include "textprobe/transforms.h"

namespace textprobe {

// Literal mask used for importance ranking, independent of the backend.
inline constexpr std::string_view kMaskToken = "[UNK]";

enum class WirMode {
  // importance_i = softmax(d)_i * d_i over all rankable positions.
  kSoftmax,
  // importance_i = d_i.
  kRawDelta,
};

struct RankedPosition {
  std::size_t position = 0;
  double importance = 0.0;
  // f(y | text) - f(y | text with this position masked).
  double delta = 0.0;
};

// Unprotected positions, minus stop words when a list is given.
std::vector<std::size_t> RankablePositions(const TextSequence& seq,
                                           const StopWordList* stop_words);

// Sorted by importance descending, ties by ascending position. Issues one
// query for the unmasked text and one per rankable position.
std::vector<RankedPosition> ComputeWir(const TextSequence& seq,
                                       const GoalFunction& goal,
                                       ModelClient& client,
                                       const StopWordList* stop_words = nullptr,
                                       WirMode mode = WirMode::kSoftmax);

// Scoring the same inputs the ranking would need; used for budget checks.
std::vector<std::string> WirQueries(const TextSequence& seq,
                                    const StopWordList* stop_words);

struct BeamCandidate {
  TextSequence seq;
  EditList edits;
  GoalScore score;
  // Score of the beam member this candidate was expanded from.
  GoalScore parent_score;
};

// round_half_up(((b_max - b_min) / n) * improved + b_min), clamped to
// [b_min, b_max]. Exact integer arithmetic.
int AdaptiveBeamWidth(std::size_t n, std::size_t improved, int b_min,
                      int b_max);
// Counts members whose score is strictly below their parent's.
std::size_t ImprovedCount(std::span<const BeamCandidate> beam);
int AdaptiveBeamWidth(std::span<const BeamCandidate> beam, int b_min,
                      int b_max);

// Lowest ground-truth confidence among `current` and `beam`; ties keep the
// incumbent, then the earliest beam member.
BeamCandidate UpdateHistoricalBest(const BeamCandidate& current,
                                   std::span<const BeamCandidate> beam);

// Replaces the highest-confidence member (last on ties) by `historical_best`
// when the latter is strictly better. Size is preserved.
std::vector<BeamCandidate> BacktrackRefill(std::vector<BeamCandidate> beam,
                                           const BeamCandidate& historical_best);

enum class SearchVariant {
  kAbs,       // adaptive width + backtracking
  kNoAw,      // fixed width + backtracking
  kNoBt,      // adaptive width, no backtracking
  kStandard,  // fixed width, no backtracking
};

std::string_view SearchVariantName(SearchVariant variant);
std::optional<SearchVariant> ParseSearchVariant(std::string_view name);

struct SearchConfig {
  int b_min = 1;
  int b_max = 6;
  bool adaptive_width = true;
  bool backtracking = true;
  // Required when adaptive_width is off, forbidden when it is on.
  std::optional<int> fixed_width;
  // Cap on real model invocations for one case, ranking included.
  std::optional<std::uint64_t> max_queries;
  std::uint64_t rng_seed = 0;
  WirMode wir_mode = WirMode::kSoftmax;

  // Throws ConfigError.
  void Validate() const;

  // Fixed-width variants use `fixed_width`, defaulting to b_min.
  static SearchConfig ForVariant(SearchVariant variant, int b_min, int b_max,
                                 std::optional<int> fixed_width = std::nullopt);
};

struct IterationRecord {
  std::size_t iteration = 0;
  std::size_t position = 0;
  // Scored children this iteration.
  std::size_t expanded = 0;
  // Width used to select the next beam (0 when the iteration ended early).
  int width = 0;
  std::size_t indicator_sum = 0;
  double beam_best = 1.0;
  double historical_best = 1.0;
  bool refilled = false;
  std::uint64_t queries = 0;
};

struct SearchTrace {
  std::vector<IterationRecord> records;
};

enum class SearchStatus {
  kSucceeded,
  kExhausted,
  kBudgetExceeded,
  // The unperturbed input is already misclassified.
  kAlreadyMisclassified,
};

std::string_view SearchStatusName(SearchStatus status);

struct SearchOutcome {
  SearchStatus status = SearchStatus::kExhausted;
  BeamCandidate root;
  BeamCandidate best;
  std::vector<RankedPosition> ranking;
  SearchTrace trace;
  std::uint64_t candidates_scored = 0;

  bool succeeded() const { return status == SearchStatus::kSucceeded; }
};

struct SearchProblem {
  TextSequence original;
  GoalFunction goal;
  const Perturbation* perturbation = nullptr;
  std::vector<Constraint> constraints;
  // Gates both ranking and neighbor generation when set.
  const StopWordList* stop_words = nullptr;
  // Already-obtained prediction for `original`; spares the root query.
  std::optional<Prediction> original_prediction;
};

// Called for every candidate after it is scored, in generation order.
using ScoredObserver = std::function<void(const BeamCandidate&)>;

SearchOutcome AbsSearch(const SearchProblem& problem, ModelClient& client,
                        const SearchConfig& config,
                        const ScoredObserver& observer = nullptr);

}  // namespace textprobe

#endif  // TEXTPROBE_SEARCH_H_
