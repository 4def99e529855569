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

#include "textprobe/threat_model.h"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

#include "http.h"
#include "json.hpp"
#include "textprobe/errors.h"

namespace textprobe {
namespace {

std::string TrimView(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<double> Softmax(const std::vector<double>& logits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - top);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

void CheckLabels(const Prediction& p, const LabelSet& labels) {
  if (p.scores.size() != labels.size()) {
    throw LabelMismatchError("prediction has " +
                             std::to_string(p.scores.size()) +
                             " labels, expected " +
                             std::to_string(labels.size()));
  }
  for (const auto& label : labels) {
    if (p.scores.count(label) == 0) {
      throw LabelMismatchError("prediction lacks label '" + label + "'");
    }
  }
}

}  // namespace

void ValidateLabelSet(const LabelSet& labels) {
  if (labels.size() < 2) {
    throw ConfigError("label set needs at least two labels");
  }
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (l.empty()) throw ConfigError("empty label in label set");
    if (!seen.insert(ToLowerAscii(l)).second) {
      throw ConfigError("duplicate label '" + l + "'");
    }
  }
}

double Prediction::score(const std::string& label) const {
  const auto it = scores.find(label);
  if (it == scores.end()) {
    throw LabelMismatchError("no score for label '" + label + "'");
  }
  return it->second;
}

std::string Prediction::Argmax(const LabelSet& order) const {
  std::string best;
  double best_score = -1.0;
  for (const auto& label : order) {
    const double s = score(label);
    if (s > best_score) {
      best = label;
      best_score = s;
    }
  }
  return best;
}

Prediction UniformPrediction(const LabelSet& labels) {
  Prediction p;
  for (const auto& l : labels) p.scores[l] = 1.0 / static_cast<double>(labels.size());
  return p;
}

Prediction ParseStructuredConfidence(std::string_view raw,
                                     const LabelSet& labels) {
  static const std::regex kItem(
      R"(^\[\s*([^\]]+?)\s*\]\s*\+\s*\[?\s*([-+]?(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][-+]?[0-9]+)?)\s*\]?$)");

  std::string body = TrimView(raw);
  // Models sometimes quote the whole answer or end it with a period.
  while (!body.empty() && (body.front() == '`' || body.front() == '"' ||
                           body.front() == '\'')) {
    body.erase(body.begin());
  }
  while (!body.empty() && (body.back() == '`' || body.back() == '"' ||
                           body.back() == '\'' || body.back() == '.')) {
    body.pop_back();
  }
  if (body.empty()) throw MalformedResponseError("empty response");

  std::map<std::string, std::string> canonical;
  for (const auto& l : labels) canonical[ToLowerAscii(l)] = l;

  Prediction p;
  p.raw = std::string(raw);
  std::stringstream items(body);
  std::string item;
  double total = 0.0;
  while (std::getline(items, item, ',')) {
    item = TrimView(item);
    std::smatch m;
    if (!std::regex_match(item, m, kItem)) {
      throw MalformedResponseError("cannot parse '" + item + "' in response '" +
                                   std::string(raw) + "'");
    }
    const auto it = canonical.find(ToLowerAscii(m[1].str()));
    if (it == canonical.end()) {
      throw MalformedResponseError("unknown label '" + m[1].str() + "'");
    }
    const double value = std::strtod(m[2].str().c_str(), nullptr);
    if (!(value >= 0.0 && value <= 1.0)) {
      throw MalformedResponseError("confidence " + m[2].str() +
                                   " outside [0,1]");
    }
    if (!p.scores.emplace(it->second, value).second) {
      throw MalformedResponseError("duplicate label '" + it->second + "'");
    }
    total += value;
  }
  for (const auto& l : labels) {
    if (p.scores.count(l) == 0) {
      throw MalformedResponseError("response lacks label '" + l + "'");
    }
  }
  if (std::fabs(total - 1.0) > kConfidenceSumTolerance) {
    throw MalformedResponseError("confidences sum to " + std::to_string(total));
  }
  return p;
}

std::string FormatStructuredConfidence(const Prediction& prediction,
                                       const LabelSet& labels, int decimals) {
  std::string out;
  char buf[64];
  for (const auto& label : labels) {
    if (!out.empty()) out += ',';
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, prediction.score(label));
    out += "[" + label + "]+" + buf;
  }
  return out;
}

// ---------------------------------------------------------------------------
// MockModel

MockModel::MockModel(LabelSet labels, const WeightTable& weights)
    : labels_(std::move(labels)) {
  ValidateLabelSet(labels_);
  for (const auto& [key, weight] : weights) {
    const auto& [label, word] = key;
    const auto pos = std::find(labels_.begin(), labels_.end(), label);
    if (pos == labels_.end()) {
      throw ConfigError("weight references unknown label '" + label + "'");
    }
    auto& row = weights_[ToLowerAscii(word)];
    row.resize(labels_.size(), 0.0);
    row[static_cast<std::size_t>(pos - labels_.begin())] += weight;
  }
}

std::shared_ptr<MockModel> MockModel::LoadTsv(
    const std::filesystem::path& path, const std::optional<LabelSet>& labels) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  WeightTable table;
  LabelSet seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string trimmed = TrimView(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, '\t')) cols.push_back(TrimView(col));
    if (cols.size() != 3) {
      throw ParseError(path.string(), lineno, "expected label<TAB>word<TAB>weight");
    }
    char* end = nullptr;
    const double w = std::strtod(cols[2].c_str(), &end);
    if (cols[2].empty() || *end != '\0' || !std::isfinite(w)) {
      throw ParseError(path.string(), lineno, "bad weight '" + cols[2] + "'");
    }
    if (std::find(seen.begin(), seen.end(), cols[0]) == seen.end()) {
      seen.push_back(cols[0]);
    }
    table[{cols[0], ToLowerAscii(cols[1])}] += w;
  }
  return std::make_shared<MockModel>(labels.value_or(seen), table);
}

std::vector<double> MockModel::Logits(const std::string& input) const {
  // Summed in sorted word order; equal multisets give identical logits.
  std::map<std::string, int> counts;
  const TextSequence seq = Tokenize(input);
  for (const auto& tok : seq.tokens()) ++counts[ToLowerAscii(tok)];
  std::vector<double> logits(labels_.size(), 0.0);
  for (const auto& [word, n] : counts) {
    const auto it = weights_.find(word);
    if (it == weights_.end()) continue;
    for (std::size_t l = 0; l < labels_.size(); ++l) {
      logits[l] += static_cast<double>(n) * it->second[l];
    }
  }
  return logits;
}

Prediction MockModel::Invoke(const std::string& input) {
  invocations_.fetch_add(1);
  const std::vector<double> probs = Softmax(Logits(input));
  Prediction p;
  for (std::size_t l = 0; l < labels_.size(); ++l) p.scores[labels_[l]] = probs[l];
  p.raw = FormatStructuredConfidence(p, labels_);
  return p;
}

std::shared_ptr<MockModel> MakeMock(const MockModel::WeightTable& weights,
                                    LabelSet labels) {
  return std::make_shared<MockModel>(std::move(labels), weights);
}

// ---------------------------------------------------------------------------
// RemoteModel

void EndpointConfig::Validate() const {
  ValidateLabelSet(labels);
  internal::ParseUrl(base_url);
  if (model.empty()) throw ConfigError("endpoint model name is empty");
  const std::string_view placeholder = "{example}";
  const std::size_t first = prompt_template.find(placeholder);
  if (first == std::string::npos ||
      prompt_template.find(placeholder, first + 1) != std::string::npos) {
    throw ConfigError("prompt template must contain {example} exactly once");
  }
  if (timeout_seconds <= 0) throw ConfigError("timeout must be positive");
  if (retries < 0) throw ConfigError("retry count must be non-negative");
}

std::string RenderPromptTemplate(std::string_view prompt_template,
                                 std::string_view example) {
  std::string out(prompt_template);
  const std::size_t at = out.find("{example}");
  if (at != std::string::npos) out.replace(at, 9, example);
  return out;
}

RemoteModel::RemoteModel(EndpointConfig config) : config_(std::move(config)) {
  config_.Validate();
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str())) api_key_ = key;
  }
}

std::string RemoteModel::BuildRequestBody(const std::string& input) const {
  nlohmann::json body = {
      {"model", config_.model},
      {"messages",
       nlohmann::json::array(
           {{{"role", "user"},
             {"content", RenderPromptTemplate(config_.prompt_template, input)}}})},
      {"temperature", config_.temperature},
  };
  return body.dump();
}

Prediction RemoteModel::Invoke(const std::string& input) {
  std::string url = config_.base_url;
  while (!url.empty() && url.back() == '/') url.pop_back();
  url += "/chat/completions";

  std::vector<std::pair<std::string, std::string>> headers;
  if (!api_key_.empty()) headers.emplace_back("Authorization", "Bearer " + api_key_);

  const internal::HttpResponse resp =
      internal::HttpPost(url, BuildRequestBody(input), "application/json",
                         headers, config_.timeout_seconds);
  if (resp.status == 429 || resp.status >= 500) {
    throw EndpointUnreachableError(url + ": HTTP " + std::to_string(resp.status));
  }
  if (resp.status != 200) {
    throw EndpointError(url + ": HTTP " + std::to_string(resp.status) + ": " +
                        resp.body.substr(0, 200));
  }
  std::string content;
  try {
    const auto json = nlohmann::json::parse(resp.body);
    content = json.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw MalformedResponseError(std::string("unexpected completion payload: ") +
                                 e.what());
  }
  return ParseStructuredConfidence(content, config_.labels);
}

// ---------------------------------------------------------------------------
// ModelClient

QueryLedger& QueryLedger::operator+=(const QueryLedger& other) {
  issued += other.issued;
  cache_hits += other.cache_hits;
  degraded += other.degraded;
  wall_seconds += other.wall_seconds;
  return *this;
}

ModelClient::ModelClient(std::shared_ptr<ThreatModel> model,
                         ClientOptions options)
    : model_(std::move(model)), options_(options) {
  if (!model_) throw ConfigError("model client needs a model");
  if (options_.retries < 0) throw ConfigError("retries must be non-negative");
  if (options_.parallelism < 1) options_.parallelism = 1;
}

Prediction ModelClient::InvokeWithRetry(const std::string& text,
                                        QueryLedger* local) {
  const int attempts = 1 + options_.retries;
  std::exception_ptr last;
  bool malformed = false;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0 && options_.backoff_seconds > 0) {
      std::this_thread::sleep_for(std::chrono::duration<double>(
          options_.backoff_seconds * std::pow(2.0, attempt - 1)));
    }
    const auto start = std::chrono::steady_clock::now();
    try {
      Prediction p = model_->Invoke(text);
      local->wall_seconds += std::chrono::duration<double>(
                                 std::chrono::steady_clock::now() - start)
                                 .count();
      CheckLabels(p, labels());
      return p;
    } catch (const MalformedResponseError&) {
      malformed = true;
      last = std::current_exception();
    } catch (const TimeoutError&) {
      malformed = false;
      last = std::current_exception();
    } catch (const EndpointUnreachableError&) {
      malformed = false;
      last = std::current_exception();
    }
    local->wall_seconds +=
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
  }
  if (malformed && options_.degrade_on_malformed) {
    ++local->degraded;
    Prediction p = UniformPrediction(labels());
    p.degraded = true;
    return p;
  }
  std::rethrow_exception(last);
}

Prediction ModelClient::Predict(const TextSequence& seq) {
  return Predict(seq.Detokenize());
}

Prediction ModelClient::Predict(const std::string& text) {
  return PredictBatch({text}).front();
}

std::size_t ModelClient::CountUncached(
    const std::vector<std::string>& texts) const {
  if (!options_.cache) return texts.size();
  std::lock_guard<std::mutex> lock(mu_);
  std::set<std::string_view> pending;
  std::size_t n = 0;
  for (const auto& t : texts) {
    if (cache_.count(t) == 0 && pending.insert(t).second) ++n;
  }
  return n;
}

std::vector<Prediction> ModelClient::PredictBatch(
    const std::vector<std::string>& texts) {
  for (const auto& t : texts) {
    if (t.empty()) throw EmptyTextError("cannot query the model with empty text");
  }
  std::vector<Prediction> results(texts.size());
  std::vector<char> filled(texts.size(), 0);
  // Unique texts needing a real call, and which result slot each serves.
  std::vector<std::size_t> issue;
  std::vector<std::size_t> source_of(texts.size(), SIZE_MAX);
  std::uint64_t hits = 0;
  {
    std::lock_guard<std::mutex> lock(mu_);
    std::unordered_map<std::string_view, std::size_t> first;
    for (std::size_t i = 0; i < texts.size(); ++i) {
      if (options_.cache) {
        if (auto it = cache_.find(texts[i]); it != cache_.end()) {
          results[i] = it->second;
          filled[i] = 1;
          ++hits;
          continue;
        }
        if (auto it = first.find(texts[i]); it != first.end()) {
          source_of[i] = it->second;
          ++hits;
          continue;
        }
        first.emplace(texts[i], i);
      }
      issue.push_back(i);
    }
  }

  std::vector<QueryLedger> locals(issue.size());
  std::vector<std::exception_ptr> errors(issue.size());
  auto run = [&](std::size_t k) {
    try {
      results[issue[k]] = InvokeWithRetry(texts[issue[k]], &locals[k]);
      filled[issue[k]] = 1;
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  const auto workers = static_cast<std::size_t>(options_.parallelism);
  if (workers <= 1 || issue.size() <= 1) {
    for (std::size_t k = 0; k < issue.size(); ++k) run(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, issue.size()); ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next.fetch_add(1); k < issue.size();
             k = next.fetch_add(1)) {
          run(k);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  {
    std::lock_guard<std::mutex> lock(mu_);
    for (std::size_t k = 0; k < issue.size(); ++k) {
      if (errors[k]) continue;
      ++ledger_.issued;
      ledger_ += locals[k];
      const Prediction& p = results[issue[k]];
      if (options_.cache && !p.degraded) cache_.emplace(texts[issue[k]], p);
    }
    for (std::size_t k = 0; k < issue.size(); ++k) {
      if (errors[k]) ledger_.wall_seconds += locals[k].wall_seconds;
    }
    ledger_.cache_hits += hits;
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (!filled[i]) results[i] = results[source_of[i]];
  }
  return results;
}

QueryLedger ModelClient::ledger() const {
  std::lock_guard<std::mutex> lock(mu_);
  return ledger_;
}

}  // namespace textprobe
