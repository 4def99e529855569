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

#include "textprobe/metrics.h"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "http.h"
#include "json.hpp"
#include "textprobe/errors.h"

namespace textprobe {
namespace {

using Rational = boost::multiprecision::cpp_rational;

double ToDouble(const Rational& r) {
  using Wide = boost::multiprecision::cpp_bin_float_100;
  const Wide n(boost::multiprecision::numerator(r));
  const Wide d(boost::multiprecision::denominator(r));
  return static_cast<double>(n / d);
}

std::string PercentEncode(std::string_view s) {
  std::string out;
  char buf[4];
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      std::snprintf(buf, sizeof(buf), "%%%02X", c);
      out += buf;
    }
  }
  return out;
}

std::string JoinHistory(const std::vector<std::string>& words, std::size_t end,
                        int order) {
  std::string h;
  const std::size_t n = static_cast<std::size_t>(order - 1);
  for (std::size_t k = end - n; k < end; ++k) {
    if (!h.empty()) h.push_back(' ');
    h += words[k];
  }
  return h;
}

std::vector<std::string> LowerTokens(std::string_view text) {
  std::vector<std::string> out;
  const TextSequence seq = Tokenize(text);
  for (const auto& t : seq.tokens()) out.push_back(ToLowerAscii(t));
  return out;
}

}  // namespace

std::string_view CaseStatusName(CaseStatus status) {
  switch (status) {
    case CaseStatus::kSucceeded: return "succeeded";
    case CaseStatus::kFailed: return "failed";
    case CaseStatus::kBudgetExhausted: return "budget-exhausted";
    case CaseStatus::kSkipped: return "skipped";
  }
  return "failed";
}

std::optional<CaseStatus> ParseCaseStatus(std::string_view name) {
  for (CaseStatus s : {CaseStatus::kSucceeded, CaseStatus::kFailed,
                       CaseStatus::kBudgetExhausted, CaseStatus::kSkipped}) {
    if (CaseStatusName(s) == name) return s;
  }
  return std::nullopt;
}

std::optional<double> SuccessRate(std::span<const TestResult> results) {
  std::size_t attempted = 0;
  std::size_t succeeded = 0;
  for (const auto& r : results) {
    if (r.skipped()) continue;
    ++attempted;
    if (r.succeeded()) ++succeeded;
  }
  if (attempted == 0) return std::nullopt;
  return ToDouble(Rational(100 * succeeded) / attempted);
}

std::optional<double> ChangeRate(std::span<const TestResult> results,
                                 ChangeRateScope scope) {
  Rational total = 0;
  std::size_t n = 0;
  for (const auto& r : results) {
    if (!r.succeeded()) continue;
    const std::size_t edits =
        scope == ChangeRateScope::kJoint ? r.edits.size() : r.example_edits;
    const std::size_t len =
        scope == ChangeRateScope::kJoint ? r.scope_tokens : r.example_tokens;
    if (len == 0) continue;
    total += Rational(edits) / len;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return ToDouble(total * 100 / n);
}

CampaignStats Aggregate(std::span<const TestResult> results,
                        ChangeRateScope scope) {
  CampaignStats s;
  s.total = results.size();
  Rational queries = 0;
  double time = 0.0;
  double ppl = 0.0;
  std::size_t ppl_n = 0;
  Rational ge = 0;
  std::size_t ge_n = 0;
  for (const auto& r : results) {
    s.total_queries += r.queries_issued;
    if (r.skipped()) {
      ++s.skipped;
      continue;
    }
    ++s.attempted;
    if (!r.succeeded()) {
      ++s.failed;
      continue;
    }
    ++s.succeeded;
    queries += r.queries_issued;
    time += r.wall_seconds;
    if (r.perplexity) {
      ppl += *r.perplexity;
      ++ppl_n;
    }
    if (r.grammar_errors) {
      ge += *r.grammar_errors;
      ++ge_n;
    }
  }
  s.s_rate = SuccessRate(results);
  s.c_rate = ChangeRate(results, scope);
  if (s.succeeded > 0) {
    s.mean_time = time / static_cast<double>(s.succeeded);
    s.mean_queries = ToDouble(queries / s.succeeded);
  }
  if (ppl_n > 0) s.mean_ppl = ppl / static_cast<double>(ppl_n);
  if (ge_n > 0) s.mean_ge = ToDouble(ge / ge_n);
  return s;
}

// --- Perplexity ------------------------------------------------------------

double Perplexity(std::string_view text, const PerplexityScorer& scorer) {
  const std::vector<double> logps = scorer.TokenLogProbs(text);
  if (logps.empty()) throw EmptyTextError("perplexity of empty text");
  double sum = 0.0;
  for (double lp : logps) sum += lp;
  return std::exp(-sum / static_cast<double>(logps.size()));
}

UniformScorer::UniformScorer(std::size_t vocabulary_size)
    : vocabulary_size_(vocabulary_size) {
  if (vocabulary_size_ == 0) throw ConfigError("vocabulary size must be positive");
}

std::vector<double> UniformScorer::TokenLogProbs(std::string_view text) const {
  const std::size_t n = Tokenize(text).size();
  return std::vector<double>(n, -std::log(static_cast<double>(vocabulary_size_)));
}

NgramScorer NgramScorer::Train(std::istream& corpus, int order) {
  if (order < 1) throw ConfigError("n-gram order must be >= 1");
  NgramScorer model(order);
  std::string line;
  while (std::getline(corpus, line)) {
    std::vector<std::string> words(static_cast<std::size_t>(order - 1), "<s>");
    for (auto& w : LowerTokens(line)) {
      model.vocab_.emplace(w, model.vocab_.size());
      words.push_back(std::move(w));
    }
    for (std::size_t i = static_cast<std::size_t>(order - 1); i < words.size(); ++i) {
      const std::string h = JoinHistory(words, i, order);
      ++model.counts_[h][words[i]];
      ++model.history_totals_[h];
    }
  }
  return model;
}

NgramScorer NgramScorer::Load(const std::filesystem::path& corpus, int order) {
  std::ifstream in(corpus);
  if (!in) throw IoError("cannot open " + corpus.string());
  return Train(in, order);
}

std::vector<double> NgramScorer::TokenLogProbs(std::string_view text) const {
  std::vector<std::string> words(static_cast<std::size_t>(order_ - 1), "<s>");
  for (auto& w : LowerTokens(text)) {
    words.push_back(vocab_.count(w) ? std::move(w) : std::string("<unk>"));
  }
  const double v = static_cast<double>(vocabulary_size());
  std::vector<double> out;
  for (std::size_t i = static_cast<std::size_t>(order_ - 1); i < words.size(); ++i) {
    const std::string h = JoinHistory(words, i, order_);
    double c_hw = 0.0;
    double c_h = 0.0;
    if (auto it = counts_.find(h); it != counts_.end()) {
      if (auto jt = it->second.find(words[i]); jt != it->second.end()) {
        c_hw = static_cast<double>(jt->second);
      }
      c_h = static_cast<double>(history_totals_.at(h));
    }
    out.push_back(std::log((c_hw + 1.0) / (c_h + v)));
  }
  return out;
}

RemoteScorer::RemoteScorer(std::string url, double timeout_seconds)
    : url_(std::move(url)), timeout_seconds_(timeout_seconds) {
  internal::ParseUrl(url_);
}

std::vector<double> RemoteScorer::TokenLogProbs(std::string_view text) const {
  const nlohmann::json req = {{"text", std::string(text)}};
  const auto resp = internal::HttpPost(url_, req.dump(), "application/json", {},
                                       timeout_seconds_);
  if (resp.status != 200) {
    throw EndpointError(url_ + ": HTTP " + std::to_string(resp.status));
  }
  try {
    return nlohmann::json::parse(resp.body).at("token_logprobs").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw MalformedResponseError(std::string("perplexity scorer: ") + e.what());
  }
}

// --- Grammar checking ------------------------------------------------------

GrammarChecker::GrammarChecker(std::string base_url, double timeout_seconds,
                               std::string language)
    : base_url_(std::move(base_url)),
      timeout_seconds_(timeout_seconds),
      language_(std::move(language)) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
  internal::ParseUrl(base_url_);
}

int GrammarChecker::CountErrors(std::string_view text) const {
  if (text.empty()) return 0;
  const std::string body =
      "text=" + PercentEncode(text) + "&language=" + PercentEncode(language_);
  internal::HttpResponse resp;
  try {
    resp = internal::HttpPost(base_url_ + "/v2/check", body,
                              "application/x-www-form-urlencoded", {},
                              timeout_seconds_);
  } catch (const Error& e) {
    throw CheckerUnavailableError(e.what());
  }
  if (resp.status != 200) {
    throw CheckerUnavailableError(base_url_ + ": HTTP " +
                                  std::to_string(resp.status));
  }
  try {
    return static_cast<int>(nlohmann::json::parse(resp.body).at("matches").size());
  } catch (const nlohmann::json::exception& e) {
    throw CheckerUnavailableError(std::string("grammar checker: ") + e.what());
  }
}

}  // namespace textprobe
