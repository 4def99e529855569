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

// textprobe: robustness campaigns against text classifiers.
//
// Exit status: 0 success, 1 usage error, 2 configuration error, 3 runtime
// failure (including aborted campaigns).

#include <cstdio>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "textprobe/campaign.h"
#include "textprobe/config.h"
#include "textprobe/errors.h"
#include "textprobe/report.h"
#include "textprobe/search.h"

namespace {

using textprobe::CampaignConfig;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

// Flags shared by run, validate and wir. Unset flags leave the file and
// environment layers alone.
struct Overrides {
  std::string config;
  std::string dataset;
  std::string dataset_format;
  std::vector<std::string> labels;
  std::optional<std::string> prompt;
  std::vector<std::string> protected_spans;
  std::string mock_weights;
  std::string endpoint;
  std::string model;
  std::string lexicon;
  std::string lexicon_format;
  std::vector<std::string> kinds;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> sample_size;
  std::string variant;
  std::optional<int> b_min;
  std::optional<int> b_max;
  std::optional<int> beam_width;
  std::optional<std::uint64_t> max_queries;
  std::optional<int> workers;
  std::string out;
  std::optional<int> repeat;
  bool omit_timing = false;
  bool no_cache = false;
  bool no_stop_words = false;
  std::optional<double> max_change_rate;
  std::optional<std::size_t> max_edits;
};

void AddCommonFlags(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "TOML configuration file");
  app->add_option("--dataset", o.dataset, "Dataset file (.csv or .jsonl)");
  app->add_option("--dataset-format", o.dataset_format, "csv or jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  app->add_option("--labels", o.labels, "Label set, in order")->delimiter(',');
  app->add_option("--prompt", o.prompt, "Instruction prompt prepended to each example");
  app->add_option("--protect", o.protected_spans, "Protected prompt span")
      ->delimiter(',');
  app->add_option("--mock-weights", o.mock_weights, "Mock model weight table (TSV)");
  app->add_option("--endpoint", o.endpoint, "Chat-completions base URL");
  app->add_option("--model", o.model, "Model name sent to the endpoint");
  app->add_option("--lexicon", o.lexicon, "Synonym lexicon");
  app->add_option("--lexicon-format", o.lexicon_format, "tsv or wordnet")
      ->check(CLI::IsMember({"tsv", "wordnet"}));
  app->add_option("--edits", o.kinds, "Edit kinds")->delimiter(',');
  app->add_option("--seed", o.seed, "Sampling seed");
  app->add_option("--sample-size", o.sample_size, "Cases to sample");
  app->add_option("--search-variant", o.variant, "abs, no-aw, no-bt or standard")
      ->check(CLI::IsMember({"abs", "no-aw", "no-bt", "standard"}));
  app->add_option("--b-min", o.b_min, "Minimum beam width");
  app->add_option("--b-max", o.b_max, "Maximum beam width");
  app->add_option("--beam-width", o.beam_width, "Width for fixed-width variants");
  app->add_option("--max-queries", o.max_queries, "Per-case query budget");
  app->add_option("--workers", o.workers, "Concurrent cases");
  app->add_option("--out", o.out, "Output directory");
  app->add_option("--repeat", o.repeat, "Repetitions with seeds seed, seed+1, ...");
  app->add_flag("--omit-timing", o.omit_timing, "Leave wall-clock fields out of outputs");
  app->add_flag("--no-cache", o.no_cache, "Disable the per-case query cache");
  app->add_flag("--no-stop-words", o.no_stop_words, "Allow edits on stop words");
  app->add_option("--max-change-rate", o.max_change_rate,
                  "Change-rate ceiling; 0 disables");
  app->add_option("--max-edits", o.max_edits, "Edit-count ceiling");
}

CampaignConfig ResolveConfig(const Overrides& o) {
  const auto env = textprobe::ProcessEnvironment();
  CampaignConfig c = o.config.empty() ? textprobe::ConfigFromEnvironment(env)
                                      : textprobe::LoadConfig(o.config, env);
  if (!o.dataset.empty()) c.dataset = o.dataset;
  if (!o.dataset_format.empty()) c.dataset_format = textprobe::ParseDatasetFormat(o.dataset_format);
  if (!o.labels.empty()) c.labels = o.labels;
  if (o.prompt) c.prompt = *o.prompt;
  if (!o.protected_spans.empty()) c.protected_spans = o.protected_spans;
  if (!o.mock_weights.empty()) {
    c.mock_weights = o.mock_weights;
    c.endpoint.reset();
  }
  if (!o.endpoint.empty()) {
    c.endpoint = o.endpoint;
    c.mock_weights.reset();
  }
  if (!o.model.empty()) c.model_name = o.model;
  if (!o.lexicon.empty()) c.lexicon = o.lexicon;
  if (o.lexicon_format == "tsv") c.lexicon_format = textprobe::LexiconFormat::kTsv;
  if (o.lexicon_format == "wordnet") c.lexicon_format = textprobe::LexiconFormat::kWordNetDb;
  if (!o.kinds.empty()) {
    c.edit_kinds.clear();
    for (const auto& k : o.kinds) {
      const auto kind = textprobe::ParseEditKind(k);
      if (!kind) throw textprobe::ConfigError("unknown edit kind '" + k + "'");
      c.edit_kinds.push_back(*kind);
    }
  }
  if (o.seed) c.seed = *o.seed;
  if (o.sample_size) c.sample_size = *o.sample_size;
  if (!o.variant.empty()) {
    c.variant = *textprobe::ParseSearchVariant(o.variant);
    // A width given for another variant in the file does not carry over.
    if (c.variant == textprobe::SearchVariant::kAbs ||
        c.variant == textprobe::SearchVariant::kNoBt) {
      c.beam_width.reset();
    }
  }
  if (o.b_min) c.b_min = *o.b_min;
  if (o.b_max) c.b_max = *o.b_max;
  if (o.beam_width) c.beam_width = *o.beam_width;
  if (o.max_queries) c.max_queries = *o.max_queries;
  if (o.workers) c.workers = *o.workers;
  if (!o.out.empty()) c.out_dir = o.out;
  if (o.repeat) c.repeat = *o.repeat;
  if (o.omit_timing) c.omit_timing = true;
  if (o.no_cache) c.cache = false;
  if (o.no_stop_words) c.stop_words = false;
  if (o.max_change_rate) {
    c.max_change_rate = *o.max_change_rate > 0
                            ? std::optional<double>(*o.max_change_rate)
                            : std::nullopt;
  }
  if (o.max_edits) c.max_edits = *o.max_edits;
  return c;
}

bool IsConfigError(const textprobe::Error& e) {
  switch (e.code()) {
    case textprobe::ErrorCode::kConfig:
    case textprobe::ErrorCode::kParse:
    case textprobe::ErrorCode::kIo:
    case textprobe::ErrorCode::kUnknownLabel:
    case textprobe::ErrorCode::kEmptyLexicon:
    case textprobe::ErrorCode::kEmptyText:
      return true;
    default:
      return false;
  }
}

std::string Fmt(const std::optional<double>& v, int precision = 2) {
  if (!v) return "n/a";
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(precision) << *v;
  return ss.str();
}

void PrintStats(const textprobe::CampaignStats& s, bool timing) {
  std::cout << "cases      " << s.total << " (attempted " << s.attempted
            << ", succeeded " << s.succeeded << ", failed " << s.failed
            << ", skipped " << s.skipped << ")\n"
            << "S-rate     " << Fmt(s.s_rate) << " %\n"
            << "C-rate     " << Fmt(s.c_rate) << " %\n"
            << "PPL        " << Fmt(s.mean_ppl) << "\n"
            << "G-E        " << Fmt(s.mean_ge) << "\n";
  if (timing) std::cout << "T-O        " << Fmt(s.mean_time, 3) << " s\n";
  std::cout << "Q-N        " << Fmt(s.mean_queries) << "\n";
}

// Returns the process exit status; configuration problems surface as
// exceptions.
int Run(const Overrides& o) {
  const CampaignConfig config = ResolveConfig(o);
  const textprobe::CampaignResources resources = textprobe::BuildResources(config);
  int status = kExitOk;
  try {
    const auto runs = textprobe::RunRepeated(config, resources, &std::cerr);
    for (std::size_t i = 0; i < runs.size(); ++i) {
      if (runs.size() > 1) std::cout << "-- repetition " << i << "\n";
      PrintStats(runs[i].stats, !config.omit_timing);
      if (runs[i].abort_reason) {
        std::cerr << "error: campaign aborted: " << *runs[i].abort_reason << "\n";
        status = kExitRuntime;
      }
    }
  } catch (const textprobe::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  std::cout << "outputs in " << config.out_dir.string() << "\n";
  return status;
}

int Validate(const Overrides& o) {
  const CampaignConfig config = ResolveConfig(o);
  const textprobe::CampaignResources resources = textprobe::BuildResources(config);
  std::cout << "configuration ok: " << resources.records.size() << " records, "
            << config.labels.size() << " labels, variant "
            << textprobe::SearchVariantName(config.variant) << "\n";
  std::cout << textprobe::ResolvedConfigJson(config);
  return kExitOk;
}

int Report(const std::string& results, const std::string& scope,
           const std::string& csv_out) {
  const auto rs = textprobe::ReadResultsJsonl(results);
  const auto sc = scope == "example-only" ? textprobe::ChangeRateScope::kExampleOnly
                                          : textprobe::ChangeRateScope::kJoint;
  const auto stats = textprobe::Aggregate(rs, sc);
  bool timing = false;
  for (const auto& r : rs) timing = timing || r.wall_seconds > 0;
  PrintStats(stats, timing);
  if (!csv_out.empty()) {
    std::FILE* f = std::fopen(csv_out.c_str(), "wb");
    if (f == nullptr) throw textprobe::IoError("cannot write " + csv_out);
    std::string csv = textprobe::CsvHeader(timing) + "\n";
    for (const auto& r : rs) csv += textprobe::ResultToCsvRow(r, timing) + "\n";
    std::fwrite(csv.data(), 1, csv.size(), f);
    std::fclose(f);
  }
  return kExitOk;
}

int Wir(const Overrides& o, const std::string& case_id) {
  const CampaignConfig config = ResolveConfig(o);
  const textprobe::CampaignResources resources = textprobe::BuildResources(config);
  const textprobe::DatasetRecord* record = nullptr;
  for (const auto& r : resources.records) {
    if (case_id.empty() || r.id == case_id) {
      record = &r;
      break;
    }
  }
  if (record == nullptr) throw textprobe::ConfigError("no case with id '" + case_id + "'");
  const auto joint =
      textprobe::JoinPromptExample(config.prompt, record->text, config.protected_spans);
  textprobe::ModelClient client(resources.model);
  const auto ranking =
      textprobe::ComputeWir(joint, textprobe::GoalFunction{record->label}, client,
                            resources.stop_words.get(), config.wir_mode);
  std::cout << "case " << record->id << " (" << record->label << "), "
            << client.ledger().issued << " queries\n";
  for (const auto& r : ranking) {
    std::cout << std::setw(4) << r.position << "  " << std::setw(12)
              << std::setprecision(6) << r.importance << "  " << std::setw(12)
              << r.delta << "  " << joint.token(r.position) << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"textprobe: robustness testing for text classifiers"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "textprobe 0.1.0");

  Overrides run_o;
  CLI::App* run = app.add_subcommand("run", "Run a campaign");
  AddCommonFlags(run, run_o);

  Overrides val_o;
  CLI::App* validate = app.add_subcommand("validate", "Check a configuration without querying");
  AddCommonFlags(validate, val_o);

  std::string results;
  std::string scope = "joint";
  std::string csv_out;
  CLI::App* report = app.add_subcommand("report", "Aggregate an existing results.jsonl");
  report->add_option("results", results, "results.jsonl")->required();
  report->add_option("--c-rate-scope", scope, "joint or example-only")
      ->check(CLI::IsMember({"joint", "example-only"}));
  report->add_option("--csv", csv_out, "Also write a CSV report");

  Overrides wir_o;
  std::string case_id;
  CLI::App* wir = app.add_subcommand("wir", "Print the word importance ranking of a case");
  AddCommonFlags(wir, wir_o);
  wir->add_option("--case", case_id, "Case id (default: first record)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) return Run(run_o);
    if (*validate) return Validate(val_o);
    if (*report) return Report(results, scope, csv_out);
    if (*wir) return Wir(wir_o, case_id);
  } catch (const textprobe::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return IsConfigError(e) ? kExitConfig : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
