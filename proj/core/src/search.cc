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

#include "textprobe/search.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "textprobe/errors.h"

namespace textprobe {
namespace {

std::vector<double> SoftmaxOf(const std::vector<double>& v) {
  if (v.empty()) return {};
  const double top = *std::max_element(v.begin(), v.end());
  std::vector<double> out(v.size());
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - top);
    total += out[i];
  }
  for (double& x : out) x /= total;
  return out;
}

// Indices of `candidates` ordered by ascending confidence, stable on
// generation order.
std::vector<std::size_t> AscendingOrder(
    const std::vector<BeamCandidate>& candidates) {
  std::vector<std::size_t> idx(candidates.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return candidates[a].score.value < candidates[b].score.value;
  });
  return idx;
}

}  // namespace

std::vector<std::size_t> RankablePositions(const TextSequence& seq,
                                           const StopWordList* stop_words) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq.is_protected(i)) continue;
    if (stop_words != nullptr && stop_words->Contains(seq.token(i))) continue;
    out.push_back(i);
  }
  return out;
}

std::vector<std::string> WirQueries(const TextSequence& seq,
                                    const StopWordList* stop_words) {
  std::vector<std::string> texts{seq.Detokenize()};
  for (std::size_t pos : RankablePositions(seq, stop_words)) {
    texts.push_back(seq.WithToken(pos, std::string(kMaskToken)).Detokenize());
  }
  return texts;
}

std::vector<RankedPosition> ComputeWir(const TextSequence& seq,
                                       const GoalFunction& goal,
                                       ModelClient& client,
                                       const StopWordList* stop_words,
                                       WirMode mode) {
  if (seq.empty()) throw EmptyTextError("cannot rank an empty sequence");
  const std::vector<std::size_t> positions = RankablePositions(seq, stop_words);
  if (positions.empty()) return {};

  const std::vector<Prediction> preds =
      client.PredictBatch(WirQueries(seq, stop_words));
  const double base = preds[0].score(goal.ground_truth);
  std::vector<double> deltas(positions.size());
  for (std::size_t k = 0; k < positions.size(); ++k) {
    deltas[k] = base - preds[k + 1].score(goal.ground_truth);
  }
  const std::vector<double> weights =
      mode == WirMode::kSoftmax ? SoftmaxOf(deltas)
                                : std::vector<double>(deltas.size(), 1.0);

  std::vector<RankedPosition> ranking(positions.size());
  for (std::size_t k = 0; k < positions.size(); ++k) {
    ranking[k] = RankedPosition{positions[k], weights[k] * deltas[k], deltas[k]};
  }
  std::stable_sort(ranking.begin(), ranking.end(),
                   [](const RankedPosition& a, const RankedPosition& b) {
                     return a.importance > b.importance;
                   });
  return ranking;
}

int AdaptiveBeamWidth(std::size_t n, std::size_t improved, int b_min,
                      int b_max) {
  if (n == 0) return b_min;
  const auto span = static_cast<std::int64_t>(b_max - b_min);
  const auto num = span * static_cast<std::int64_t>(std::min(improved, n));
  const auto den = static_cast<std::int64_t>(n);
  // floor(num / den + 1/2)
  const std::int64_t step = (2 * num + den) / (2 * den);
  const std::int64_t b = b_min + step;
  return static_cast<int>(std::clamp<std::int64_t>(b, b_min, b_max));
}

std::size_t ImprovedCount(std::span<const BeamCandidate> beam) {
  return static_cast<std::size_t>(
      std::count_if(beam.begin(), beam.end(), [](const BeamCandidate& c) {
        return c.score.value < c.parent_score.value;
      }));
}

int AdaptiveBeamWidth(std::span<const BeamCandidate> beam, int b_min,
                      int b_max) {
  return AdaptiveBeamWidth(beam.size(), ImprovedCount(beam), b_min, b_max);
}

BeamCandidate UpdateHistoricalBest(const BeamCandidate& current,
                                   std::span<const BeamCandidate> beam) {
  const BeamCandidate* best = &current;
  for (const BeamCandidate& c : beam) {
    if (c.score.value < best->score.value) best = &c;
  }
  return *best;
}

std::vector<BeamCandidate> BacktrackRefill(
    std::vector<BeamCandidate> beam, const BeamCandidate& historical_best) {
  if (beam.empty()) return beam;
  std::size_t worst = 0;
  for (std::size_t i = 1; i < beam.size(); ++i) {
    if (beam[i].score.value >= beam[worst].score.value) worst = i;
  }
  if (historical_best.score.value < beam[worst].score.value) {
    beam[worst] = historical_best;
  }
  return beam;
}

std::string_view SearchVariantName(SearchVariant variant) {
  switch (variant) {
    case SearchVariant::kAbs: return "abs";
    case SearchVariant::kNoAw: return "no-aw";
    case SearchVariant::kNoBt: return "no-bt";
    case SearchVariant::kStandard: return "standard";
  }
  return "abs";
}

std::optional<SearchVariant> ParseSearchVariant(std::string_view name) {
  for (SearchVariant v : {SearchVariant::kAbs, SearchVariant::kNoAw,
                          SearchVariant::kNoBt, SearchVariant::kStandard}) {
    if (SearchVariantName(v) == name) return v;
  }
  return std::nullopt;
}

std::string_view SearchStatusName(SearchStatus status) {
  switch (status) {
    case SearchStatus::kSucceeded: return "succeeded";
    case SearchStatus::kExhausted: return "exhausted";
    case SearchStatus::kBudgetExceeded: return "budget-exceeded";
    case SearchStatus::kAlreadyMisclassified: return "already-misclassified";
  }
  return "exhausted";
}

void SearchConfig::Validate() const {
  if (b_min < 1) throw ConfigError("b_min must be >= 1");
  if (b_max < b_min) throw ConfigError("b_max must be >= b_min");
  if (adaptive_width && fixed_width) {
    throw ConfigError("fixed beam width conflicts with adaptive width");
  }
  if (!adaptive_width) {
    if (!fixed_width) throw ConfigError("fixed beam width required when adaptive width is off");
    if (*fixed_width < b_min || *fixed_width > b_max) {
      throw ConfigError("fixed beam width must lie in [b_min, b_max]");
    }
  }
  if (max_queries && *max_queries == 0) {
    throw ConfigError("query budget must be positive");
  }
}

SearchConfig SearchConfig::ForVariant(SearchVariant variant, int b_min,
                                      int b_max, std::optional<int> fixed_width) {
  SearchConfig c;
  c.b_min = b_min;
  c.b_max = b_max;
  c.adaptive_width =
      variant == SearchVariant::kAbs || variant == SearchVariant::kNoBt;
  c.backtracking =
      variant == SearchVariant::kAbs || variant == SearchVariant::kNoAw;
  if (!c.adaptive_width) c.fixed_width = fixed_width.value_or(b_min);
  return c;
}

SearchOutcome AbsSearch(const SearchProblem& problem, ModelClient& client,
                        const SearchConfig& config,
                        const ScoredObserver& observer) {
  config.Validate();
  if (problem.perturbation == nullptr) {
    throw ConfigError("search needs a perturbation");
  }
  const GoalFunction& goal = problem.goal;
  const StopWordList* stop_words = problem.stop_words;

  auto within_budget = [&](const std::vector<std::string>& texts) {
    if (!config.max_queries) return true;
    return client.ledger().issued + client.CountUncached(texts) <=
           *config.max_queries;
  };

  SearchOutcome out;
  const std::string original_text = problem.original.Detokenize();
  if (!problem.original_prediction && !within_budget({original_text})) {
    out.status = SearchStatus::kBudgetExceeded;
    return out;
  }
  BeamCandidate root;
  root.seq = problem.original;
  root.score = EvaluateGoal(goal, problem.original_prediction
                                      ? *problem.original_prediction
                                      : client.Predict(original_text));
  root.parent_score = root.score;
  out.root = root;
  out.best = root;
  ++out.candidates_scored;
  if (observer) observer(root);
  if (root.score.succeeded) {
    out.status = SearchStatus::kAlreadyMisclassified;
    return out;
  }

  if (!within_budget(WirQueries(problem.original, stop_words))) {
    out.status = SearchStatus::kBudgetExceeded;
    return out;
  }
  out.ranking = ComputeWir(problem.original, goal, client, stop_words,
                           config.wir_mode);

  std::vector<BeamCandidate> beam{root};
  BeamCandidate historical_best = root;
  out.status = SearchStatus::kExhausted;

  for (std::size_t iter = 0; iter < out.ranking.size(); ++iter) {
    const std::size_t position = out.ranking[iter].position;
    IterationRecord rec;
    rec.iteration = iter;
    rec.position = position;

    std::vector<BeamCandidate> next;
    std::vector<std::string> texts;
    std::unordered_set<std::string> seen;
    for (const BeamCandidate& member : beam) {
      for (Neighbor& nb :
           Neighbors(*problem.perturbation, member.seq, position, stop_words)) {
        if (nb.edit &&
            !CheckConstraints(problem.constraints, problem.original, nb.seq).ok) {
          continue;
        }
        std::string text = nb.seq.Detokenize();
        if (text.empty() || !seen.insert(text).second) continue;
        BeamCandidate child;
        child.seq = std::move(nb.seq);
        child.edits = member.edits;
        if (nb.edit) child.edits.push_back(std::move(*nb.edit));
        child.parent_score = member.score;
        next.push_back(std::move(child));
        texts.push_back(std::move(text));
      }
    }

    if (!within_budget(texts)) {
      out.status = SearchStatus::kBudgetExceeded;
      break;
    }
    const std::vector<Prediction> preds = client.PredictBatch(texts);
    bool any_success = false;
    for (std::size_t i = 0; i < next.size(); ++i) {
      next[i].score = EvaluateGoal(goal, preds[i]);
      any_success = any_success || next[i].score.succeeded;
      ++out.candidates_scored;
      if (observer) observer(next[i]);
    }
    historical_best = UpdateHistoricalBest(historical_best, next);

    rec.expanded = next.size();
    rec.historical_best = historical_best.score.value;
    rec.queries = client.ledger().issued;
    for (const BeamCandidate& c : next) {
      rec.beam_best = std::min(rec.beam_best, c.score.value);
    }

    if (any_success) {
      out.status = SearchStatus::kSucceeded;
      if (historical_best.score.succeeded) {
        out.best = historical_best;
      } else {
        // Multi-class corner: the lowest ground-truth confidence need not be
        // the one that flipped the argmax.
        const BeamCandidate* pick = nullptr;
        for (const BeamCandidate& c : next) {
          if (c.score.succeeded &&
              (pick == nullptr || c.score.value < pick->score.value)) {
            pick = &c;
          }
        }
        out.best = *pick;
      }
      out.trace.records.push_back(rec);
      return out;
    }

    int width = 0;
    if (iter == 0) {
      width = config.adaptive_width ? config.b_max : *config.fixed_width;
    } else if (config.adaptive_width) {
      rec.indicator_sum = ImprovedCount(beam);
      width = AdaptiveBeamWidth(beam.size(), rec.indicator_sum, config.b_min,
                                config.b_max);
    } else {
      rec.indicator_sum = ImprovedCount(beam);
      width = *config.fixed_width;
    }
    rec.width = width;

    const std::vector<std::size_t> order = AscendingOrder(next);
    std::vector<BeamCandidate> selected;
    for (std::size_t k = 0; k < order.size() && k < static_cast<std::size_t>(width);
         ++k) {
      selected.push_back(next[order[k]]);
    }
    if (config.backtracking) {
      const double worst_before =
          selected.empty() ? 0.0
                           : std::max_element(selected.begin(), selected.end(),
                                              [](const BeamCandidate& a,
                                                 const BeamCandidate& b) {
                                                return a.score.value < b.score.value;
                                              })->score.value;
      selected = BacktrackRefill(std::move(selected), historical_best);
      rec.refilled = historical_best.score.value < worst_before;
    }
    beam = std::move(selected);
    out.trace.records.push_back(rec);
  }

  out.best = historical_best;
  return out;
}

}  // namespace textprobe
