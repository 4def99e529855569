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

// Per-case results and campaign indicators.
//
//   S-rate  100 * succeeded / attempted      (skipped cases excluded)
//   C-rate  mean over successes of 100 * edits / scope tokens
//   PPL     mean perplexity of successful adversarial texts
//   G-E     mean grammar-checker matches on successful adversarial texts
//   T-O     mean search wall time of successful cases
//   Q-N     mean issued model queries of successful cases
//
// Every mean runs over successful cases only; an indicator with an empty
// range is absent (std::nullopt). Count-based indicators are computed with
// exact rational arithmetic and rounded once.

#ifndef TEXTPROBE_METRICS_H_
#define TEXTPROBE_METRICS_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "textprobe/text.h"

namespace textprobe {

enum class CaseStatus {
  kSucceeded,
  kFailed,
  // Exhausted the query budget without success; counts as attempted.
  kBudgetExhausted,
  // Original already misclassified; excluded from every indicator.
  kSkipped,
};

std::string_view CaseStatusName(CaseStatus status);
std::optional<CaseStatus> ParseCaseStatus(std::string_view name);

struct TestResult {
  std::string case_id;
  std::string ground_truth;
  CaseStatus status = CaseStatus::kFailed;
  std::string original_text;
  std::string adversarial_text;
  std::string original_label;
  std::string adversarial_label;
  EditList edits;
  double confidence_before = 0.0;
  double confidence_after = 0.0;
  // Perturbable tokens of the joint input, and of the example alone.
  std::size_t scope_tokens = 0;
  std::size_t example_tokens = 0;
  // Edits that fall inside the example.
  std::size_t example_edits = 0;
  std::uint64_t queries_issued = 0;
  std::uint64_t cache_hits = 0;
  bool degraded = false;
  std::optional<double> perplexity;
  std::optional<int> grammar_errors;
  std::string trace_file;
  // Wall clock; excluded from determinism comparisons.
  double wall_seconds = 0.0;

  bool succeeded() const { return status == CaseStatus::kSucceeded; }
  bool skipped() const { return status == CaseStatus::kSkipped; }
};

enum class ChangeRateScope {
  kJoint,        // prompt + example, minus protected positions
  kExampleOnly,  // example tokens only
};

std::optional<double> SuccessRate(std::span<const TestResult> results);
std::optional<double> ChangeRate(std::span<const TestResult> results,
                                 ChangeRateScope scope = ChangeRateScope::kJoint);

struct CampaignStats {
  std::size_t total = 0;
  std::size_t attempted = 0;
  std::size_t succeeded = 0;
  std::size_t skipped = 0;
  std::size_t failed = 0;
  std::optional<double> s_rate;
  std::optional<double> c_rate;
  std::optional<double> mean_ppl;
  std::optional<double> mean_ge;
  std::optional<double> mean_time;
  std::optional<double> mean_queries;
  std::uint64_t total_queries = 0;
};

CampaignStats Aggregate(std::span<const TestResult> results,
                        ChangeRateScope scope = ChangeRateScope::kJoint);

// --- Perplexity ------------------------------------------------------------

class PerplexityScorer {
 public:
  virtual ~PerplexityScorer() = default;
  // Natural-log probability of each token given its predecessors.
  virtual std::vector<double> TokenLogProbs(std::string_view text) const = 0;
};

// exp(-(1/n) * sum log p). Throws EmptyTextError when the scorer yields no
// tokens.
double Perplexity(std::string_view text, const PerplexityScorer& scorer);

// Every token has probability 1 / vocabulary_size.
class UniformScorer final : public PerplexityScorer {
 public:
  explicit UniformScorer(std::size_t vocabulary_size);
  std::vector<double> TokenLogProbs(std::string_view text) const override;

 private:
  std::size_t vocabulary_size_;
};

// Add-one smoothed n-gram model over lowercased word tokens. Each sentence is
// left-padded with order-1 "<s>" symbols; words unseen in training map to a
// single "<unk>" type that is part of the vocabulary.
class NgramScorer final : public PerplexityScorer {
 public:
  // One sentence per line.
  static NgramScorer Train(std::istream& corpus, int order = 2);
  static NgramScorer Load(const std::filesystem::path& corpus, int order = 2);

  std::vector<double> TokenLogProbs(std::string_view text) const override;

  int order() const { return order_; }
  // Distinct training types plus "<unk>".
  std::size_t vocabulary_size() const { return vocab_.size() + 1; }

 private:
  explicit NgramScorer(int order) : order_(order) {}

  int order_;
  std::map<std::string, std::size_t> vocab_;
  // history (space-joined) -> (next word -> count)
  std::map<std::string, std::map<std::string, std::uint64_t>> counts_;
  std::map<std::string, std::uint64_t> history_totals_;
};

// Remote scorer: POST {"text": ...} to `url`, expecting
// {"token_logprobs": [ ... ]} in natural log.
class RemoteScorer final : public PerplexityScorer {
 public:
  RemoteScorer(std::string url, double timeout_seconds = 30.0);
  std::vector<double> TokenLogProbs(std::string_view text) const override;

 private:
  std::string url_;
  double timeout_seconds_;
};

// --- Grammar checking ------------------------------------------------------

// Client for a LanguageTool-compatible server (POST /v2/check).
class GrammarChecker {
 public:
  explicit GrammarChecker(std::string base_url, double timeout_seconds = 10.0,
                          std::string language = "en-US");

  // Number of matches. Empty text is 0 without a request. Throws
  // CheckerUnavailableError when the server cannot be used.
  int CountErrors(std::string_view text) const;

 private:
  std::string base_url_;
  double timeout_seconds_;
  std::string language_;
};

}  // namespace textprobe

#endif  // TEXTPROBE_METRICS_H_
