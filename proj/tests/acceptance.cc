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


// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "test_util.h"
#include "textprobe/campaign.h"
#include "textprobe/config.h"
#include "textprobe/errors.h"
#include "textprobe/metrics.h"
#include "textprobe/search.h"
#include "textprobe/text.h"
#include "textprobe/threat_model.h"
#include "textprobe/transforms.h"

namespace textprobe {
namespace {

// Pinned tolerances and limits.
constexpr double kBruteForceTolerance = 1e-9;
constexpr double kPerplexityTolerance = 1e-9;
constexpr double kBruteForceSeconds = 1.0;
constexpr double kInvariantSeconds = 10.0;
constexpr double kAblationSeconds = 30.0;
constexpr int kInvariantSearches = 120;
constexpr int kDeceptiveFixtures = 24;

const LabelSet kBinary = {"positive", "negative"};

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Portable uniform double in [lo, hi).
double Uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t Pick(std::mt19937_64& rng, std::size_t n) { return rng() % n; }

double Logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void Report(int id, const std::string& name, const Outcome& o) {
  std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(),
              o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

template <typename F>
Outcome Guard(F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    return {false, std::string("exception: ") + e.what()};
  }
}

// Binary bag-of-words instance: every word has a (positive, negative) weight.
struct BowInstance {
  std::vector<std::string> tokens;
  std::map<std::string, std::vector<std::string>> synonyms;
  std::map<std::string, std::pair<double, double>> weights;

  double PositiveConfidence(const std::vector<std::string>& words) const {
    double pos = 0.0, neg = 0.0;
    for (const auto& w : words) {
      auto it = weights.find(w);
      if (it == weights.end()) continue;
      pos += it->second.first;
      neg += it->second.second;
    }
    return Logistic(pos - neg);
  }

  std::shared_ptr<MockModel> Mock() const {
    MockModel::WeightTable t;
    for (const auto& [w, pn] : weights) {
      t[{"positive", w}] = pn.first;
      t[{"negative", w}] = pn.second;
    }
    return MakeMock(t, kBinary);
  }

  std::vector<std::string> Options(std::size_t i) const {
    std::vector<std::string> o = {tokens[i]};
    auto it = synonyms.find(tokens[i]);
    if (it != synonyms.end()) o.insert(o.end(), it->second.begin(), it->second.end());
    return o;
  }

  std::string Text() const {
    std::string s;
    for (const auto& t : tokens) s += (s.empty() ? "" : " ") + t;
    return s;
  }
};

// --- 1 ---------------------------------------------------------------------

Outcome BruteForceEquivalence() {
  std::mt19937_64 rng(11);
  const auto start = Clock::now();
  double worst = 0.0;
  int fixtures = 0;
  for (int f = 0; f < 8; ++f) {
    BowInstance inst;
    for (int i = 0; i < 6; ++i) {
      const std::string w = "t" + std::to_string(f) + "_" + std::to_string(i);
      inst.tokens.push_back(w);
      inst.weights[w] = {Uniform(rng, 0.1, 1.0), Uniform(rng, 0.0, 0.05)};
      for (int j = 0; j < 3; ++j) {
        const std::string s = w + "_s" + std::to_string(j);
        inst.synonyms[w].push_back(s);
        inst.weights[s] = {Uniform(rng, 0.1, 1.0), Uniform(rng, 0.0, 0.05)};
      }
    }
    // Exhaustive enumeration over the per-position product space.
    double oracle = std::numeric_limits<double>::infinity();
    std::size_t combos = 1;
    for (std::size_t i = 0; i < inst.tokens.size(); ++i) combos *= inst.Options(i).size();
    for (std::size_t code = 0; code < combos; ++code) {
      std::vector<std::string> words;
      std::size_t c = code;
      for (std::size_t i = 0; i < inst.tokens.size(); ++i) {
        const auto opts = inst.Options(i);
        words.push_back(opts[c % opts.size()]);
        c /= opts.size();
      }
      oracle = std::min(oracle, inst.PositiveConfidence(words));
    }

    auto lexicon = std::make_shared<const SynonymLexicon>(inst.synonyms, "fixture");
    const Perturbation perturbation = Perturbation::Synonym(lexicon);
    SearchProblem problem;
    problem.original = Tokenize(inst.Text());
    problem.goal = {"positive"};
    problem.perturbation = &perturbation;
    const int width = static_cast<int>(combos);
    ModelClient client(inst.Mock());
    const auto out = AbsSearch(problem, client, SearchConfig::ForVariant(SearchVariant::kAbs, width, width));
    if (out.status != SearchStatus::kExhausted) {
      return {false, "fixture " + std::to_string(f) + " ended with " +
                         std::string(SearchStatusName(out.status))};
    }
    worst = std::max(worst, std::abs(out.best.score.value - oracle));
    ++fixtures;
  }
  const double secs = Seconds(start);
  std::ostringstream d;
  d << fixtures << " fixtures of 6 tokens x 4 options, max |abs - enumeration| = " << worst
    << " (tol " << kBruteForceTolerance << "), " << secs << " s (limit " << kBruteForceSeconds
    << " s)";
  return {worst <= kBruteForceTolerance && secs < kBruteForceSeconds, d.str()};
}

// --- 2 ---------------------------------------------------------------------

Outcome WidthBoundaries() {
  int checked = 0;
  for (auto [b_min, b_max] : std::vector<std::pair<int, int>>{{1, 6}, {1, 10}, {2, 8}}) {
    for (int n = 1; n <= 16; ++n) {
      if (AdaptiveBeamWidth(n, n, b_min, b_max) != b_max ||
          AdaptiveBeamWidth(n, 0, b_min, b_max) != b_min) {
        return {false, "boundary mismatch at n=" + std::to_string(n)};
      }
      for (int k = 0; k <= n; ++k) {
        // round_half_up(x) = floor(x + 1/2), evaluated over the integers.
        const int expected = (2 * (b_max - b_min) * k + 2 * b_min * n + n) / (2 * n);
        std::vector<BeamCandidate> beam(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
          beam[static_cast<std::size_t>(i)].parent_score.value = 0.5;
          beam[static_cast<std::size_t>(i)].score.value = i < k ? 0.4 : 0.5;
        }
        if (AdaptiveBeamWidth(n, k, b_min, b_max) != expected ||
            AdaptiveBeamWidth(beam, b_min, b_max) != expected) {
          return {false, "mismatch at (" + std::to_string(b_min) + "," + std::to_string(b_max) +
                             ") n=" + std::to_string(n) + " k=" + std::to_string(k)};
        }
        ++checked;
      }
    }
  }
  return {true, std::to_string(checked) + " (n, improved) cases over (1,6), (1,10), (2,8) exact"};
}

// --- 3 ---------------------------------------------------------------------

Outcome BacktrackingInvariants() {
  std::mt19937_64 rng(3);
  const auto start = Clock::now();
  int searches = 0;
  int succeeded = 0;
  std::size_t iterations = 0;
  const SearchVariant variants[] = {SearchVariant::kAbs, SearchVariant::kNoAw};
  for (int trial = 0; searches < kInvariantSearches; ++trial) {
    BowInstance inst;
    std::vector<std::string> vocab;
    for (int i = 0; i < 14; ++i) vocab.push_back("v" + std::to_string(i));
    for (const auto& w : vocab) {
      inst.weights[w] = {Uniform(rng, 0.0, 1.0), Uniform(rng, -0.6, 0.6)};
      const std::size_t n = 1 + Pick(rng, 3);
      for (std::size_t j = 0; j < n; ++j) inst.synonyms[w].push_back(vocab[Pick(rng, vocab.size())]);
    }
    const std::size_t len = 4 + Pick(rng, 5);
    for (std::size_t i = 0; i < len; ++i) inst.tokens.push_back(vocab[Pick(rng, vocab.size())]);

    auto lexicon = std::make_shared<const SynonymLexicon>(inst.synonyms, "random");
    const Perturbation perturbation = Perturbation::Synonym(lexicon);
    SearchProblem problem;
    problem.original = Tokenize(inst.Text());
    // Ground truth is whatever the mock predicts, so no case is skipped.
    problem.goal = {inst.PositiveConfidence(inst.tokens) >= 0.5 ? "positive" : "negative"};
    problem.perturbation = &perturbation;
    const int b_min = 1 + static_cast<int>(Pick(rng, 2));
    const int b_max = b_min + 1 + static_cast<int>(Pick(rng, 5));
    SearchConfig cfg = SearchConfig::ForVariant(variants[trial % 2], b_min, b_max);

    ModelClient client(inst.Mock());
    std::vector<double> scored;
    const auto out = AbsSearch(problem, client, cfg,
                               [&](const BeamCandidate& c) { scored.push_back(c.score.value); });
    if (out.status == SearchStatus::kAlreadyMisclassified) continue;
    ++searches;
    if (out.succeeded()) ++succeeded;

    double prev = out.root.score.value;
    std::size_t seen = 1;
    double running = scored[0];
    for (const auto& rec : out.trace.records) {
      for (std::size_t i = 0; i < rec.expanded; ++i) running = std::min(running, scored[seen + i]);
      seen += rec.expanded;
      if (rec.historical_best > prev) {
        return {false, "historical best rose in search " + std::to_string(searches)};
      }
      if (rec.historical_best != running) {
        return {false, "historical best is not the running minimum in search " +
                           std::to_string(searches)};
      }
      prev = rec.historical_best;
      ++iterations;
    }
    const double min_scored = *std::min_element(scored.begin(), scored.end());
    if (out.best.score.value != min_scored) {
      return {false, "returned score differs from minimum scored in search " +
                         std::to_string(searches)};
    }
  }
  const double secs = Seconds(start);
  std::ostringstream d;
  d << searches << " searches (" << succeeded << " flipped, " << iterations
    << " iterations): historical best non-increasing and returned score == min scored; "
    << secs << " s (limit " << kInvariantSeconds << " s)";
  return {secs < kInvariantSeconds, d.str()};
}

// --- 4 ---------------------------------------------------------------------

struct Deceptive {
  BowInstance inst;
  std::size_t decoy = 0;
  std::size_t decisive = 0;
};

// A high-weight decoy whose substitutes lower confidence without flipping,
// and a lower-weight decisive word with a substitute that flips on its own.
Deceptive MakeDeceptive(std::mt19937_64& rng, int f) {
  Deceptive d;
  const std::size_t len = 3 + Pick(rng, 4);
  d.decoy = Pick(rng, len);
  do d.decisive = Pick(rng, len); while (d.decisive == d.decoy);
  const std::string p = "x" + std::to_string(f) + "_";
  double sum = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    const std::string w = p + std::to_string(i);
    d.inst.tokens.push_back(w);
    double weight = Uniform(rng, 0.0, 0.3);
    if (i == d.decoy) weight = Uniform(rng, 2.0, 3.0);
    if (i == d.decisive) weight = Uniform(rng, 0.5, 1.5);
    d.inst.weights[w] = {weight, 0.0};
    sum += weight;
  }
  for (std::size_t i = 0; i < len; ++i) {
    const std::string& w = d.inst.tokens[i];
    const std::size_t n = i == d.decoy || i == d.decisive ? 1 + Pick(rng, 3) : Pick(rng, 3);
    for (std::size_t j = 0; j < n; ++j) {
      const std::string s = w + "s" + std::to_string(j);
      d.inst.synonyms[w].push_back(s);
      if (i == d.decisive && j == n - 1) {
        // Enough negative mass to flip by itself.
        d.inst.weights[s] = {0.0, sum - d.inst.weights[w].first + Uniform(rng, 0.5, 1.5)};
      } else {
        d.inst.weights[s] = {Uniform(rng, 0.0, 0.2), 0.0};
      }
    }
  }
  if (f % 2 == 0) {
    // Every other fixture also gets a stronger decoy substitute.
    const std::string& w = d.inst.tokens[d.decoy];
    const std::string s = w + "s" + std::to_string(d.inst.synonyms[w].size());
    d.inst.synonyms[w].push_back(s);
    d.inst.weights[s] = {d.inst.weights[w].first + Uniform(rng, 0.2, 0.8), 0.0};
  }
  return d;
}

// Closed-form softmax-weighted ranking, ties by position.
std::vector<std::size_t> OracleRanking(const BowInstance& inst) {
  const double full = inst.PositiveConfidence(inst.tokens);
  std::vector<double> delta;
  for (std::size_t i = 0; i < inst.tokens.size(); ++i) {
    auto masked = inst.tokens;
    masked[i] = "UNK";
    delta.push_back(full - inst.PositiveConfidence(masked));
  }
  double z = 0.0;
  for (double x : delta) z += std::exp(x);
  std::vector<std::size_t> order(delta.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::exp(delta[a]) / z * delta[a] > std::exp(delta[b]) / z * delta[b];
  });
  return order;
}

// Width-1 greedy with at most one edit; true if it flips the label.
bool GreedyOracleSucceeds(const BowInstance& inst) {
  std::vector<std::string> cur = inst.tokens;
  for (std::size_t pos : OracleRanking(inst)) {
    std::vector<std::string> best = cur;
    double best_conf = inst.PositiveConfidence(cur);
    for (const auto& opt : inst.Options(pos)) {
      auto cand = cur;
      cand[pos] = opt;
      std::size_t edits = 0;
      for (std::size_t i = 0; i < cand.size(); ++i) edits += cand[i] != inst.tokens[i];
      if (edits > 1) continue;
      const double conf = inst.PositiveConfidence(cand);
      if (conf < 0.5) return true;
      if (conf < best_conf) {
        best_conf = conf;
        best = cand;
      }
    }
    cur = best;
  }
  return false;
}

bool SingleEditFlipExists(const BowInstance& inst) {
  for (std::size_t i = 0; i < inst.tokens.size(); ++i) {
    for (const auto& opt : inst.Options(i)) {
      auto cand = inst.tokens;
      cand[i] = opt;
      if (inst.PositiveConfidence(cand) < 0.5) return true;
    }
  }
  return false;
}

Outcome AblationDifferential() {
  std::mt19937_64 rng(4);
  const auto start = Clock::now();
  std::map<SearchVariant, int> wins;
  for (int f = 0; f < kDeceptiveFixtures; ++f) {
    const Deceptive d = MakeDeceptive(rng, f);
    const auto ranking = OracleRanking(d.inst);
    if (ranking[0] != d.decoy || ranking[1] != d.decisive) {
      return {false, "fixture " + std::to_string(f) + ": oracle ranking is not decoy, decisive"};
    }
    if (GreedyOracleSucceeds(d.inst)) {
      return {false, "fixture " + std::to_string(f) + ": greedy width-1 oracle succeeds"};
    }
    if (!SingleEditFlipExists(d.inst)) {
      return {false, "fixture " + std::to_string(f) + ": no single-edit flip exists"};
    }
    auto lexicon = std::make_shared<const SynonymLexicon>(d.inst.synonyms, "deceptive");
    const Perturbation perturbation = Perturbation::Synonym(lexicon);
    SearchProblem problem;
    problem.original = Tokenize(d.inst.Text());
    problem.goal = {"positive"};
    problem.perturbation = &perturbation;
    problem.constraints = {MaxEditsConstraint{1}};
    {
      ModelClient client(d.inst.Mock());
      const auto r = ComputeWir(problem.original, problem.goal, client);
      if (r[0].position != d.decoy || r[1].position != d.decisive) {
        return {false, "fixture " + std::to_string(f) + ": library ranking disagrees with oracle"};
      }
    }
    for (auto v : {SearchVariant::kAbs, SearchVariant::kNoAw, SearchVariant::kNoBt,
                   SearchVariant::kStandard}) {
      ModelClient client(d.inst.Mock());
      const auto out = AbsSearch(problem, client, SearchConfig::ForVariant(v, 1, 6));
      if (out.succeeded()) ++wins[v];
    }
  }
  const double secs = Seconds(start);
  std::ostringstream d;
  d << kDeceptiveFixtures << " verified deceptive fixtures (half with a stronger decoy substitute), successes: abs " << wins[SearchVariant::kAbs]
    << ", no-aw " << wins[SearchVariant::kNoAw] << ", no-bt " << wins[SearchVariant::kNoBt]
    << ", standard(width 1) " << wins[SearchVariant::kStandard] << "; " << secs << " s (limit "
    << kAblationSeconds << " s)";
  return {wins[SearchVariant::kAbs] > wins[SearchVariant::kStandard] && secs < kAblationSeconds,
          d.str()};
}

// --- 5 ---------------------------------------------------------------------

TestResult Case(CaseStatus status, std::size_t edits, std::size_t scope, std::uint64_t queries,
                double seconds) {
  TestResult r;
  r.status = status;
  for (std::size_t i = 0; i < edits; ++i) r.edits.push_back(Edit{i, "a", "b", EditKind::kSynonym});
  r.scope_tokens = scope;
  r.queries_issued = queries;
  r.wall_seconds = seconds;
  return r;
}

Outcome MetricExactness() {
  // Succeeded: 1/10, 2/8, 3/12 edits; 40, 50, 90 queries; 1.5, 2.5, 2.0 s.
  const std::vector<TestResult> rs = {
      Case(CaseStatus::kSucceeded, 1, 10, 40, 1.5),
      Case(CaseStatus::kSucceeded, 2, 8, 50, 2.5),
      Case(CaseStatus::kSucceeded, 3, 12, 90, 2.0),
      Case(CaseStatus::kFailed, 0, 10, 300, 9.0),
      Case(CaseStatus::kBudgetExhausted, 0, 10, 500, 9.0),
      Case(CaseStatus::kSkipped, 0, 10, 1, 0.0),
  };
  const CampaignStats s = Aggregate(rs);
  // 3/5, mean(10%, 25%, 25%), mean(1.5, 2.5, 2.0), mean(40, 50, 90)
  const bool exact = s.s_rate == 60.0 && s.c_rate == 20.0 && s.mean_time == 2.0 &&
                     s.mean_queries == 60.0 && s.attempted == 5;
  const double ppl = Perplexity("w1 w2 w3 w4 w5 w6 w7", UniformScorer(100));
  const bool ppl_ok = std::abs(ppl - 100.0) <= kPerplexityTolerance;

  // Skip rule end to end: a mock that already gets the label wrong.
  CampaignConfig config;
  config.labels = kBinary;
  config.max_change_rate.reset();
  CampaignResources res;
  res.model = MakeMock({{{"negative", "dreadful"}, 2.0}, {{"positive", "good"}, 1.0}}, kBinary);
  res.lexicon = std::make_shared<const SynonymLexicon>(
      std::map<std::string, std::vector<std::string>>{{"good", {"fine"}}}, "x");
  res.perturbation = std::make_unique<Perturbation>(Perturbation::Synonym(res.lexicon));
  const TestResult skipped = RunCase({"s", "a dreadful film", "positive"}, config, res, nullptr, nullptr);
  const TestResult attempted = RunCase({"a", "a good film", "positive"}, config, res, nullptr, nullptr);
  const std::vector<TestResult> pair = {skipped, attempted};
  const auto rate = SuccessRate(pair);
  const bool skip_ok = skipped.status == CaseStatus::kSkipped &&
                       attempted.status == CaseStatus::kFailed && rate == 0.0 &&
                       Aggregate(pair).attempted == 1;

  std::ostringstream d;
  d << "S-rate " << *s.s_rate << ", C-rate " << *s.c_rate << ", T-O " << *s.mean_time
    << ", Q-N " << *s.mean_queries << " (expected 60, 20, 2, 60 exactly); uniform PPL " << ppl
    << " (tol " << kPerplexityTolerance << "); skip rule "
    << (skip_ok ? "excludes misclassified original" : "violated");
  return {exact && ppl_ok && skip_ok, d.str()};
}

// --- 6 ---------------------------------------------------------------------

// Answers with fixed free text, the way a chatty model does.
class FreeTextModel final : public ThreatModel {
 public:
  const LabelSet& labels() const override { return kBinary; }
  Prediction Invoke(const std::string&) override {
    ++calls;
    return ParseStructuredConfidence("I think it's positive", kBinary);
  }
  int calls = 0;
};

Outcome ParserConformance() {
  const LabelSet order = {"negative", "positive"};
  const std::string before_raw = "[negative]+0.910,[positive]+0.090";
  const std::string after_raw = "[negative]+0.040,[positive]+0.960";
  const Prediction before = ParseStructuredConfidence(before_raw, order);
  const Prediction after = ParseStructuredConfidence(after_raw, order);
  const GoalFunction goal{"negative"};
  const bool flip_ok = FormatStructuredConfidence(before, order) == before_raw &&
                      FormatStructuredConfidence(after, order) == after_raw &&
                      before.score("negative") == 0.91 && after.score("positive") == 0.96 &&
                      !EvaluateGoal(goal, before).succeeded && EvaluateGoal(goal, after).succeeded &&
                      EvaluateGoal(goal, after).label == "positive";

  // Random three-decimal distributions round-trip exactly.
  std::mt19937_64 rng(6);
  const LabelSet four = {"World", "Sports", "Business", "Sci/Tech"};
  int round_trips = 0;
  for (int t = 0; t < 500; ++t) {
    int left = 1000;
    Prediction p;
    for (std::size_t i = 0; i < four.size(); ++i) {
      const int k = i + 1 == four.size() ? left : static_cast<int>(Pick(rng, static_cast<std::size_t>(left) + 1));
      p.scores[four[i]] = k / 1000.0;
      left -= k;
    }
    const std::string raw = FormatStructuredConfidence(p, four);
    const Prediction q = ParseStructuredConfidence(raw, four);
    if (q.scores != p.scores || FormatStructuredConfidence(q, four) != raw) {
      return {false, "round trip failed for " + raw};
    }
    ++round_trips;
  }

  bool raised = false;
  try {
    ParseStructuredConfidence("I think it's positive", kBinary);
  } catch (const MalformedResponseError&) {
    raised = true;
  }
  auto model = std::make_shared<FreeTextModel>();
  ClientOptions opts;
  opts.retries = 2;
  ModelClient client(model, opts);
  const Prediction degraded = client.Predict("a film");
  const bool degrade_ok = raised && degraded.degraded && model->calls == 3 &&
                          degraded.score("positive") == 0.5 && client.ledger().degraded == 1;

  std::ostringstream d;
  d << "0.91 -> 0.96 example " << (flip_ok ? "parses and flip is a success" : "wrong") << ", " << round_trips
    << " random round trips, free text " << (raised ? "raises MalformedResponse" : "accepted")
    << " and degrades after " << model->calls << " attempts";
  return {flip_ok && degrade_ok, d.str()};
}

// --- 7 ---------------------------------------------------------------------

Outcome QueryAccounting() {
  CampaignConfig config;
  config.labels = kBinary;
  config.max_change_rate.reset();
  CampaignResources res;
  auto mock = MakeMock({{{"positive", "good"}, 2.0}, {{"positive", "movie"}, 0.3},
                        {{"negative", "poor"}, 1.5}, {{"positive", "fine"}, 0.4}},
                       kBinary);
  res.model = mock;
  res.lexicon = std::make_shared<const SynonymLexicon>(
      std::map<std::string, std::vector<std::string>>{{"good", {"fine", "decent"}},
                                                      {"movie", {"film", "poor"}}},
      "x");
  res.perturbation = std::make_unique<Perturbation>(Perturbation::Synonym(res.lexicon));
  QueryLedger ledger;
  const TestResult r = RunCase({"q", "a good movie", "positive"}, config, res, nullptr, &ledger);
  const std::vector<TestResult> one = {r};
  const auto stats = Aggregate(one);
  const bool qn_ok = r.succeeded() && stats.mean_queries &&
                     *stats.mean_queries == static_cast<double>(mock->invocations()) &&
                     ledger.issued == mock->invocations();
  const std::uint64_t search_calls = mock->invocations();

  ModelClient client(mock);
  client.Predict("a fine film");
  const auto issued = client.ledger().issued;
  client.Predict("a fine film");
  client.PredictBatch({"a fine film", "a fine film"});
  const bool cache_ok = client.ledger().issued == issued && client.ledger().cache_hits == 3;

  std::ostringstream d;
  d << "Q-N " << (stats.mean_queries ? *stats.mean_queries : -1) << " vs mock invocations "
    << search_calls << "; re-scoring a cached candidate issued "
    << client.ledger().issued - issued << " extra queries";
  return {qn_ok && cache_ok, d.str()};
}

// --- 8 ---------------------------------------------------------------------

Outcome EndToEndDeterminism() {
  testing::TempDir a("accept-a");
  testing::TempDir b("accept-b");
  const EnvLookup none = [](const std::string&) -> std::optional<std::string> { return std::nullopt; };
  auto run = [&](const std::filesystem::path& out) {
    CampaignConfig c = LoadConfig(testing::Fixture("campaign.toml"), none);
    c.out_dir = out;
    c.omit_timing = true;
    RunCampaign(c, BuildResources(c));
  };
  run(a.path());
  run(b.path());
  bool same = true;
  std::string sizes;
  for (const char* f : {"results.jsonl", "stats.json"}) {
    const std::string x = testing::ReadFile(a.path() / f);
    const std::string y = testing::ReadFile(b.path() / f);
    same = same && !x.empty() && x == y;
    sizes += std::string(sizes.empty() ? "" : ", ") + f + " " + std::to_string(x.size()) + " bytes";
  }
  return {same, std::string(same ? "byte-identical" : "differ") + " across two runs (" + sizes + ")"};
}

}  // namespace
}  // namespace textprobe

int main() {
  using namespace textprobe;
  Report(1, "brute-force equivalence", Guard(BruteForceEquivalence));
  Report(2, "adaptive width boundaries", Guard(WidthBoundaries));
  Report(3, "backtracking invariants", Guard(BacktrackingInvariants));
  Report(4, "ablation differential", Guard(AblationDifferential));
  Report(5, "metric exactness", Guard(MetricExactness));
  Report(6, "parser conformance", Guard(ParserConformance));
  Report(7, "query accounting", Guard(QueryAccounting));
  Report(8, "end-to-end determinism", Guard(EndToEndDeterminism));
  std::printf("%d of 8 criteria passed\n", 8 - failures);
  return failures == 0 ? 0 : 1;
}
