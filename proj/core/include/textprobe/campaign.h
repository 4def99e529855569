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

// Campaign orchestration: sample the dataset, run one search per case on a
// bounded worker pool, and write
//
//   <out>/results.jsonl              one line per case, in sample order
//   <out>/results.csv
//   <out>/stats.json
//   <out>/run-config.resolved.json
//   <out>/traces/<case>.jsonl        one line per search iteration
//
// Every case gets its own ModelClient, so results do not depend on the
// number of workers.

#ifndef TEXTPROBE_CAMPAIGN_H_
#define TEXTPROBE_CAMPAIGN_H_

#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "textprobe/config.h"
#include "textprobe/dataset.h"
#include "textprobe/metrics.h"
#include "textprobe/search.h"
#include "textprobe/threat_model.h"
#include "textprobe/transforms.h"

namespace textprobe {

// Everything a campaign needs besides the configuration itself. Built once
// and shared read-only between workers.
struct CampaignResources {
  std::shared_ptr<ThreatModel> model;
  std::shared_ptr<const SynonymLexicon> lexicon;
  std::shared_ptr<const StopWordList> stop_words;
  std::unique_ptr<Perturbation> perturbation;
  std::vector<Constraint> constraints;
  std::shared_ptr<const PerplexityScorer> scorer;
  std::shared_ptr<const GrammarChecker> grammar;
  std::vector<DatasetRecord> records;
};

// Loads every file the configuration names and validates it. Throws
// ConfigError, ParseError, IoError, EmptyLexiconError, UnknownLabelError.
CampaignResources BuildResources(const CampaignConfig& config);

struct CampaignRun {
  std::vector<TestResult> results;
  CampaignStats stats;
  QueryLedger ledger;
  // Set when a fatal endpoint error stopped the run; completed results are
  // still written.
  std::optional<std::string> abort_reason;
};

// Runs one test case. Exposed for tests and the `wir` subcommand.
TestResult RunCase(const DatasetRecord& record, const CampaignConfig& config,
                   const CampaignResources& resources, SearchTrace* trace,
                   QueryLedger* ledger);

// Progress and warnings go to `log` when given.
CampaignRun RunCampaign(const CampaignConfig& config,
                        const CampaignResources& resources,
                        std::ostream* log = nullptr);

// Runs config.repeat campaigns with seeds seed, seed+1, ... into
// <out>/rep-<i> when repeat > 1, plus <out>/summary.json.
std::vector<CampaignRun> RunRepeated(const CampaignConfig& config,
                                     const CampaignResources& resources,
                                     std::ostream* log = nullptr);

// File-system safe version of a case id.
std::string SanitizeId(const std::string& id);

}  // namespace textprobe

#endif  // TEXTPROBE_CAMPAIGN_H_
