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

#include "textprobe/campaign.h"

#include <atomic>
#include <chrono>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include "json.hpp"
#include "textprobe/errors.h"
#include "textprobe/report.h"

namespace textprobe {
namespace {

namespace fs = std::filesystem;

CaseStatus StatusOf(SearchStatus s) {
  switch (s) {
    case SearchStatus::kSucceeded: return CaseStatus::kSucceeded;
    case SearchStatus::kExhausted: return CaseStatus::kFailed;
    case SearchStatus::kBudgetExceeded: return CaseStatus::kBudgetExhausted;
    case SearchStatus::kAlreadyMisclassified: return CaseStatus::kSkipped;
  }
  return CaseStatus::kFailed;
}

// The example part of the adversarial input, rebuilt from the edits that fall
// inside it.
std::string AdversarialExample(const DatasetRecord& record,
                               const TextSequence& joint, const EditList& edits,
                               const std::string& fallback) {
  const TextSequence example = Tokenize(record.text);
  if (example.size() + joint.prompt_len() != joint.size()) return fallback;
  EditList shifted;
  for (const Edit& e : edits) {
    if (e.position < joint.prompt_len()) continue;
    Edit s = e;
    s.position -= joint.prompt_len();
    shifted.push_back(std::move(s));
  }
  try {
    return ApplyEdits(example, shifted).Detokenize();
  } catch (const Error&) {
    return fallback;
  }
}

void WriteFile(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
}

bool IsFatal(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kEndpointUnreachable:
    case ErrorCode::kTimeout:
    case ErrorCode::kEndpoint:
    case ErrorCode::kMalformedResponse:
      return true;
    default:
      return false;
  }
}

}  // namespace

std::string SanitizeId(const std::string& id) {
  std::string out;
  for (unsigned char c : id) {
    out.push_back(std::isalnum(c) || c == '-' || c == '_' || c == '.'
                      ? static_cast<char>(c)
                      : '_');
  }
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

CampaignResources BuildResources(const CampaignConfig& config) {
  config.Validate();
  CampaignResources res;

  if (config.mock_weights) {
    res.model = MockModel::LoadTsv(*config.mock_weights, config.labels);
  } else {
    EndpointConfig ep;
    ep.base_url = *config.endpoint;
    ep.api_key_env = config.api_key_env;
    ep.model = config.model_name;
    ep.labels = config.labels;
    ep.prompt_template = config.prompt_template;
    ep.timeout_seconds = config.timeout_seconds;
    ep.retries = config.retries;
    ep.Validate();
    res.model = std::make_shared<RemoteModel>(ep);
  }

  if (config.lexicon) {
    res.lexicon = std::make_shared<const SynonymLexicon>(
        LoadLexicon(*config.lexicon, config.lexicon_format));
  }
  PerturbationOptions popts;
  popts.insert_alphabet = config.insert_alphabet;
  res.perturbation =
      std::make_unique<Perturbation>(config.edit_kinds, res.lexicon, popts);

  if (config.stop_words) {
    res.stop_words = config.stop_word_file
                         ? std::make_shared<const StopWordList>(
                               StopWordList::Load(*config.stop_word_file))
                         : std::make_shared<const StopWordList>(
                               StopWordList::Default());
  }

  if (config.max_change_rate) {
    res.constraints.push_back(MaxChangeRateConstraint{*config.max_change_rate});
  }
  if (config.max_edits) {
    res.constraints.push_back(MaxEditsConstraint{*config.max_edits});
  }
  if (config.pos_lexicon) {
    std::shared_ptr<const PosLexicon> pos;
    if (config.pos_format == LexiconFormat::kTsv) {
      pos = std::make_shared<const PosLexicon>(PosLexicon::Load(*config.pos_lexicon));
    } else {
      std::ifstream in(*config.pos_lexicon);
      if (!in) throw IoError("cannot open " + config.pos_lexicon->string());
      pos = std::make_shared<const PosLexicon>(
          PosLexicon::FromWordNet(in, config.pos_lexicon->string()));
    }
    res.constraints.push_back(PosMatchConstraint{pos});
  }
  if (!config.blacklist.empty()) {
    BlacklistConstraint b;
    for (const auto& w : config.blacklist) b.words.insert(ToLowerAscii(w));
    res.constraints.push_back(std::move(b));
  }
  for (const auto& c : res.constraints) ValidateConstraint(c);

  switch (config.perplexity) {
    case PerplexityMode::kNone:
      break;
    case PerplexityMode::kUniform:
      res.scorer = std::make_shared<UniformScorer>(config.ppl_vocab);
      break;
    case PerplexityMode::kNgram:
      res.scorer = std::make_shared<NgramScorer>(
          NgramScorer::Load(*config.ppl_corpus, config.ppl_order));
      break;
    case PerplexityMode::kRemote:
      res.scorer = std::make_shared<RemoteScorer>(*config.ppl_url,
                                                  config.timeout_seconds);
      break;
  }
  if (config.grammar_url) {
    res.grammar = std::make_shared<GrammarChecker>(*config.grammar_url);
  }

  const DatasetFormat format =
      config.dataset_format.value_or(GuessDatasetFormat(config.dataset));
  res.records = LoadDataset(config.dataset, format, config.labels);
  return res;
}

TestResult RunCase(const DatasetRecord& record, const CampaignConfig& config,
                   const CampaignResources& resources, SearchTrace* trace,
                   QueryLedger* ledger) {
  const TextSequence joint =
      JoinPromptExample(config.prompt, record.text, config.protected_spans);

  ClientOptions copts;
  copts.cache = config.cache;
  copts.retries = config.retries;
  copts.backoff_seconds = config.backoff_seconds;
  copts.parallelism = config.parallelism;
  ModelClient client(resources.model, copts);

  TestResult r;
  r.case_id = record.id;
  r.ground_truth = record.label;
  r.original_text = joint.Detokenize();
  r.scope_tokens = joint.perturbable_count();
  for (std::size_t i = joint.prompt_len(); i < joint.size(); ++i) {
    if (!joint.is_protected(i)) ++r.example_tokens;
  }

  const GoalFunction goal{record.label};
  const Prediction original = client.Predict(r.original_text);
  const GoalScore root = EvaluateGoal(goal, original);
  r.original_label = root.label;
  r.confidence_before = root.value;

  if (root.succeeded) {
    r.status = CaseStatus::kSkipped;
    r.adversarial_text = r.original_text;
    r.adversarial_label = root.label;
    r.confidence_after = root.value;
  } else {
    SearchProblem problem;
    problem.original = joint;
    problem.goal = goal;
    problem.perturbation = resources.perturbation.get();
    problem.constraints = resources.constraints;
    problem.stop_words = resources.stop_words.get();
    problem.original_prediction = original;

    const auto t0 = std::chrono::steady_clock::now();
    SearchOutcome outcome = AbsSearch(problem, client, config.ToSearchConfig());
    r.wall_seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - t0)
                         .count();

    r.status = StatusOf(outcome.status);
    r.edits = outcome.best.edits;
    r.adversarial_text = outcome.best.seq.Detokenize();
    r.adversarial_label = outcome.best.score.label;
    r.confidence_after = outcome.best.score.value;
    for (const Edit& e : r.edits) {
      if (e.position >= joint.prompt_len()) ++r.example_edits;
    }
    if (trace != nullptr) *trace = std::move(outcome.trace);
  }

  const QueryLedger l = client.ledger();
  r.queries_issued = l.issued;
  r.cache_hits = l.cache_hits;
  r.degraded = l.degraded > 0;
  if (ledger != nullptr) *ledger = l;

  if (r.succeeded() && (resources.scorer || resources.grammar)) {
    const std::string example =
        AdversarialExample(record, joint, r.edits, r.adversarial_text);
    if (resources.scorer) r.perplexity = Perplexity(example, *resources.scorer);
    if (resources.grammar) {
      try {
        r.grammar_errors = resources.grammar->CountErrors(example);
      } catch (const CheckerUnavailableError&) {
        // Reported once by the caller through the missing value.
      }
    }
  }
  return r;
}

CampaignRun RunCampaign(const CampaignConfig& config,
                        const CampaignResources& resources, std::ostream* log) {
  const std::vector<std::size_t> sample =
      SampleIndices(resources.records.size(), config.sample_size, config.seed);
  const bool timing = !config.omit_timing;

  fs::create_directories(config.out_dir / "traces");
  WriteFile(config.out_dir / "run-config.resolved.json", ResolvedConfigJson(config));
  std::ofstream jsonl(config.out_dir / "results.jsonl",
                      std::ios::binary | std::ios::trunc);
  if (!jsonl) throw IoError("cannot write results.jsonl");

  std::vector<std::optional<TestResult>> slots(sample.size());
  std::vector<QueryLedger> ledgers(sample.size());
  std::size_t next_write = 0;
  std::size_t done = 0;
  std::mutex mu;
  std::atomic<std::size_t> next_case{0};
  std::atomic<bool> abort{false};
  std::optional<std::string> abort_reason;
  bool grammar_warned = false;

  auto flush_prefix = [&] {
    while (next_write < slots.size() && slots[next_write]) {
      jsonl << ResultToJsonLine(*slots[next_write], timing) << '\n';
      ++next_write;
    }
    jsonl.flush();
  };

  auto worker = [&] {
    while (!abort.load()) {
      const std::size_t k = next_case.fetch_add(1);
      if (k >= sample.size()) return;
      const DatasetRecord& record = resources.records[sample[k]];
      SearchTrace trace;
      QueryLedger ledger;
      TestResult result;
      try {
        result = RunCase(record, config, resources, &trace, &ledger);
      } catch (const Error& e) {
        std::lock_guard<std::mutex> lock(mu);
        if (!abort_reason) {
          abort_reason = "case " + record.id + ": " + e.what();
          if (!IsFatal(e)) *abort_reason += " (" + std::string(ErrorCodeName(e.code())) + ")";
        }
        abort.store(true);
        return;
      }
      const std::string trace_name = "traces/" + SanitizeId(record.id) + ".jsonl";
      WriteFile(config.out_dir / trace_name, TraceToJsonl(trace));
      result.trace_file = trace_name;

      std::lock_guard<std::mutex> lock(mu);
      if (result.succeeded() && resources.grammar && !result.grammar_errors &&
          !grammar_warned && log != nullptr) {
        *log << "warning: grammar checker unavailable; G-E omitted for some cases\n";
        grammar_warned = true;
      }
      ledgers[k] = ledger;
      slots[k] = std::move(result);
      ++done;
      if (log != nullptr) {
        *log << "[" << done << "/" << sample.size() << "] " << record.id << " "
             << CaseStatusName(slots[k]->status) << "\n";
      }
      flush_prefix();
    }
  };

  const int n_workers = std::max(1, std::min<int>(config.workers,
                                                  static_cast<int>(sample.size())));
  std::vector<std::thread> threads;
  for (int i = 0; i < n_workers; ++i) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  CampaignRun run;
  // After an abort, completed cases behind a gap are still written.
  for (std::size_t k = next_write; k < slots.size(); ++k) {
    if (slots[k]) jsonl << ResultToJsonLine(*slots[k], timing) << '\n';
  }
  jsonl.flush();
  for (std::size_t k = 0; k < slots.size(); ++k) {
    if (!slots[k]) continue;
    run.ledger += ledgers[k];
    run.results.push_back(std::move(*slots[k]));
  }
  run.abort_reason = abort_reason;
  run.stats = Aggregate(run.results, config.c_rate_scope);

  StatsContext ctx;
  ctx.c_rate_scope = config.c_rate_scope;
  ctx.variant = std::string(SearchVariantName(config.variant));
  ctx.seed = config.seed;
  ctx.cache_hits = run.ledger.cache_hits;
  ctx.include_timing = timing;
  WriteFile(config.out_dir / "stats.json", StatsToJson(run.stats, ctx));

  std::string csv = CsvHeader(timing) + "\n";
  for (const auto& r : run.results) csv += ResultToCsvRow(r, timing) + "\n";
  WriteFile(config.out_dir / "results.csv", csv);
  return run;
}

std::vector<CampaignRun> RunRepeated(const CampaignConfig& config,
                                     const CampaignResources& resources,
                                     std::ostream* log) {
  if (config.repeat <= 1) return {RunCampaign(config, resources, log)};

  std::vector<CampaignRun> runs;
  nlohmann::ordered_json reps = nlohmann::ordered_json::array();
  for (int i = 0; i < config.repeat; ++i) {
    CampaignConfig c = config;
    c.seed = config.seed + static_cast<std::uint64_t>(i);
    c.out_dir = config.out_dir / ("rep-" + std::to_string(i));
    c.repeat = 1;
    if (log != nullptr) *log << "repetition " << i << " (seed " << c.seed << ")\n";
    runs.push_back(RunCampaign(c, resources, log));
    const CampaignStats& s = runs.back().stats;
    auto opt = [](const std::optional<double>& v) {
      return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
    };
    nlohmann::ordered_json rep = {
        {"seed", c.seed},         {"out", c.out_dir.filename().string()},
        {"s_rate", opt(s.s_rate)}, {"c_rate", opt(s.c_rate)},
        {"mean_ppl", opt(s.mean_ppl)}, {"mean_ge", opt(s.mean_ge)},
        {"mean_queries", opt(s.mean_queries)},
    };
    if (!config.omit_timing) rep["timing"] = {{"mean_time_seconds", opt(s.mean_time)}};
    reps.push_back(rep);
    if (runs.back().abort_reason) break;
  }

  nlohmann::ordered_json mean;
  for (const char* key : {"s_rate", "c_rate", "mean_ppl", "mean_ge", "mean_queries"}) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& rep : reps) {
      if (!rep[key].is_null()) {
        sum += rep[key].get<double>();
        ++n;
      }
    }
    mean[key] = n > 0 ? nlohmann::ordered_json(sum / static_cast<double>(n))
                      : nlohmann::ordered_json(nullptr);
  }
  const nlohmann::ordered_json summary = {
      {"schema_version", kSchemaVersion},
      {"repetitions", reps},
      {"mean", mean},
  };
  fs::create_directories(config.out_dir);
  WriteFile(config.out_dir / "summary.json", summary.dump(2) + "\n");
  return runs;
}

}  // namespace textprobe
