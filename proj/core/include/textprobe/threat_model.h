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

// The black-box classifier under test.
//
// A ThreatModel is a backend that turns one input string into one Prediction
// per call. ModelClient sits in front of a backend and adds the response
// cache, the retry / degraded-scoring policy and the query ledger; search and
// campaign code only ever talk to a ModelClient.

#ifndef TEXTPROBE_THREAT_MODEL_H_
#define TEXTPROBE_THREAT_MODEL_H_

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "textprobe/text.h"

namespace textprobe {

// Ordered, unique class labels; at least two.
using LabelSet = std::vector<std::string>;

// Throws ConfigError when the set has fewer than two or duplicate labels.
void ValidateLabelSet(const LabelSet& labels);

// Tolerance on the sum of confidences; models round to three decimals.
inline constexpr double kConfidenceSumTolerance = 0.02;

struct Prediction {
  std::map<std::string, double> scores;
  std::string raw;
  // Set when the response could not be parsed after all retries and the
  // uniform distribution was substituted.
  bool degraded = false;

  // Throws LabelMismatchError for labels not present.
  double score(const std::string& label) const;
  // Highest-scoring label; ties resolve to the first label in `order`.
  std::string Argmax(const LabelSet& order) const;
};

Prediction UniformPrediction(const LabelSet& labels);

// Parses "[label]+score,[label]+score,..." in any order, tolerating
// whitespace, bracketed scores and a trailing period. Labels match
// case-insensitively and are reported with the configured spelling.
// Throws MalformedResponseError on unknown, missing or duplicate labels,
// non-numeric or out-of-range scores, and sums outside 1 +/- tolerance.
Prediction ParseStructuredConfidence(std::string_view raw,
                                     const LabelSet& labels);

std::string FormatStructuredConfidence(const Prediction& prediction,
                                       const LabelSet& labels,
                                       int decimals = 3);

class ThreatModel {
 public:
  virtual ~ThreatModel() = default;

  virtual const LabelSet& labels() const = 0;
  // One real model invocation. Must be safe to call concurrently.
  virtual Prediction Invoke(const std::string& input) = 0;
};

// Deterministic bag-of-words classifier: score(label) is the softmax over
// labels of the summed weights of the input's tokens. Words are matched
// case-insensitively; unknown words weigh zero.
class MockModel final : public ThreatModel {
 public:
  // Keyed by (label, lowercase word).
  using WeightTable = std::map<std::pair<std::string, std::string>, double>;

  MockModel(LabelSet labels, const WeightTable& weights);

  // TSV rows `label<TAB>word<TAB>weight`. With no explicit label set, labels
  // are taken in order of first appearance.
  static std::shared_ptr<MockModel> LoadTsv(
      const std::filesystem::path& path,
      const std::optional<LabelSet>& labels = std::nullopt);

  const LabelSet& labels() const override { return labels_; }
  Prediction Invoke(const std::string& input) override;

  // Summed weight per label, in label order.
  std::vector<double> Logits(const std::string& input) const;

  std::uint64_t invocations() const { return invocations_.load(); }

 private:
  LabelSet labels_;
  // word -> weight per label index
  std::map<std::string, std::vector<double>> weights_;
  std::atomic<std::uint64_t> invocations_{0};
};

std::shared_ptr<MockModel> MakeMock(const MockModel::WeightTable& weights,
                                    LabelSet labels);

// Settings for an OpenAI-compatible chat-completions endpoint.
struct EndpointConfig {
  std::string base_url;
  // Name of the environment variable that holds the bearer token.
  std::string api_key_env;
  std::string model;
  LabelSet labels;
  // User message; must contain "{example}" exactly once.
  std::string prompt_template = "{example}";
  double timeout_seconds = 60.0;
  int retries = 2;
  double temperature = 0.0;

  void Validate() const;
};

std::string RenderPromptTemplate(std::string_view prompt_template,
                                 std::string_view example);

// Remote LLM classifier. The joint prompt+example text is substituted into
// the template and sent as the single user message of a chat-completions
// request. Throws TimeoutError, EndpointUnreachableError, EndpointError or
// MalformedResponseError; retrying is the ModelClient's job.
class RemoteModel final : public ThreatModel {
 public:
  explicit RemoteModel(EndpointConfig config);

  const LabelSet& labels() const override { return config_.labels; }
  Prediction Invoke(const std::string& input) override;

  // JSON request body for `input`; exposed for tests.
  std::string BuildRequestBody(const std::string& input) const;

 private:
  EndpointConfig config_;
  std::string api_key_;
};

struct QueryLedger {
  std::uint64_t issued = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t degraded = 0;
  double wall_seconds = 0.0;

  std::uint64_t lookups() const { return issued + cache_hits; }
  QueryLedger& operator+=(const QueryLedger& other);
};

struct ClientOptions {
  bool cache = true;
  // Additional attempts after the first failed one.
  int retries = 2;
  double backoff_seconds = 0.0;
  // When false, malformed responses propagate after retries instead of
  // degrading to the uniform distribution.
  bool degrade_on_malformed = true;
  // Concurrent invocations within one batch.
  int parallelism = 1;
};

class ModelClient {
 public:
  ModelClient(std::shared_ptr<ThreatModel> model, ClientOptions options = {});

  ModelClient(const ModelClient&) = delete;
  ModelClient& operator=(const ModelClient&) = delete;

  const LabelSet& labels() const { return model_->labels(); }
  const ClientOptions& options() const { return options_; }

  // Throws EmptyTextError for empty input.
  Prediction Predict(const TextSequence& seq);
  Prediction Predict(const std::string& text);

  // Results align with `texts`. Duplicates within the batch are issued once.
  std::vector<Prediction> PredictBatch(const std::vector<std::string>& texts);

  // Real invocations PredictBatch(texts) would issue right now.
  std::size_t CountUncached(const std::vector<std::string>& texts) const;

  QueryLedger ledger() const;

 private:
  Prediction InvokeWithRetry(const std::string& text, QueryLedger* local);

  std::shared_ptr<ThreatModel> model_;
  ClientOptions options_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, Prediction> cache_;
  QueryLedger ledger_;
};

}  // namespace textprobe

#endif  // TEXTPROBE_THREAT_MODEL_H_
