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

#include "textprobe/report.h"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "textprobe/errors.h"

namespace textprobe {
namespace {

using nlohmann::ordered_json;

ordered_json Optional(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::string FormatDouble(double v) {
  // Same shortest round-trip form the JSON writer uses.
  return ordered_json(v).dump();
}

std::string EditsCompact(const EditList& edits) {
  std::string out;
  for (const Edit& e : edits) {
    if (!out.empty()) out += ';';
    out += std::to_string(e.position) + ":" + e.original + "->" + e.replacement;
  }
  return out;
}

}  // namespace

std::string ResultToJsonLine(const TestResult& r, bool include_timing) {
  ordered_json edits = ordered_json::array();
  for (const Edit& e : r.edits) {
    edits.push_back({{"position", e.position},
                     {"original", e.original},
                     {"replacement", e.replacement},
                     {"kind", std::string(EditKindName(e.kind))}});
  }
  ordered_json j = {
      {"schema_version", kSchemaVersion},
      {"case_id", r.case_id},
      {"status", std::string(CaseStatusName(r.status))},
      {"ground_truth", r.ground_truth},
      {"original_label", r.original_label},
      {"adversarial_label", r.adversarial_label},
      {"confidence_before", r.confidence_before},
      {"confidence_after", r.confidence_after},
      {"original_text", r.original_text},
      {"adversarial_text", r.adversarial_text},
      {"edits", edits},
      {"scope_tokens", r.scope_tokens},
      {"example_tokens", r.example_tokens},
      {"example_edits", r.example_edits},
      {"queries_issued", r.queries_issued},
      {"cache_hits", r.cache_hits},
      {"degraded", r.degraded},
      {"perplexity", Optional(r.perplexity)},
      {"grammar_errors", r.grammar_errors ? ordered_json(*r.grammar_errors)
                                          : ordered_json(nullptr)},
      {"trace_file", r.trace_file},
  };
  if (include_timing) j["timing"] = {{"wall_seconds", r.wall_seconds}};
  return j.dump();
}

TestResult ResultFromJson(std::string_view line, const std::string& source,
                          std::size_t lineno) {
  try {
    const auto j = nlohmann::json::parse(line);
    TestResult r;
    r.case_id = j.at("case_id").get<std::string>();
    const auto status = ParseCaseStatus(j.at("status").get<std::string>());
    if (!status) throw ParseError(source, lineno, "unknown status");
    r.status = *status;
    r.ground_truth = j.at("ground_truth").get<std::string>();
    r.original_label = j.value("original_label", "");
    r.adversarial_label = j.value("adversarial_label", "");
    r.confidence_before = j.value("confidence_before", 0.0);
    r.confidence_after = j.value("confidence_after", 0.0);
    r.original_text = j.value("original_text", "");
    r.adversarial_text = j.value("adversarial_text", "");
    for (const auto& e : j.at("edits")) {
      const auto kind = ParseEditKind(e.at("kind").get<std::string>());
      if (!kind) throw ParseError(source, lineno, "unknown edit kind");
      r.edits.push_back(Edit{e.at("position").get<std::size_t>(),
                             e.at("original").get<std::string>(),
                             e.at("replacement").get<std::string>(), *kind});
    }
    r.scope_tokens = j.at("scope_tokens").get<std::size_t>();
    r.example_tokens = j.value("example_tokens", std::size_t{0});
    r.example_edits = j.value("example_edits", std::size_t{0});
    r.queries_issued = j.at("queries_issued").get<std::uint64_t>();
    r.cache_hits = j.value("cache_hits", std::uint64_t{0});
    r.degraded = j.value("degraded", false);
    if (j.contains("perplexity") && !j["perplexity"].is_null()) {
      r.perplexity = j["perplexity"].get<double>();
    }
    if (j.contains("grammar_errors") && !j["grammar_errors"].is_null()) {
      r.grammar_errors = j["grammar_errors"].get<int>();
    }
    r.trace_file = j.value("trace_file", "");
    if (j.contains("timing")) {
      r.wall_seconds = j["timing"].value("wall_seconds", 0.0);
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source, lineno, e.what());
  }
}

std::vector<TestResult> ReadResultsJsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<TestResult> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    out.push_back(ResultFromJson(line, path.string(), lineno));
  }
  return out;
}

std::string CsvEscape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string CsvHeader(bool include_timing) {
  std::string h =
      "case_id,status,ground_truth,original_label,adversarial_label,"
      "confidence_before,confidence_after,num_edits,scope_tokens,"
      "queries_issued,perplexity,grammar_errors,edits,original_text,"
      "adversarial_text";
  if (include_timing) h += ",wall_seconds";
  return h;
}

std::string ResultToCsvRow(const TestResult& r, bool include_timing) {
  std::vector<std::string> f = {
      CsvEscape(r.case_id),
      std::string(CaseStatusName(r.status)),
      CsvEscape(r.ground_truth),
      CsvEscape(r.original_label),
      CsvEscape(r.adversarial_label),
      FormatDouble(r.confidence_before),
      FormatDouble(r.confidence_after),
      std::to_string(r.edits.size()),
      std::to_string(r.scope_tokens),
      std::to_string(r.queries_issued),
      r.perplexity ? FormatDouble(*r.perplexity) : std::string(),
      r.grammar_errors ? std::to_string(*r.grammar_errors) : std::string(),
      CsvEscape(EditsCompact(r.edits)),
      CsvEscape(r.original_text),
      CsvEscape(r.adversarial_text),
  };
  if (include_timing) f.push_back(FormatDouble(r.wall_seconds));
  std::string row;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i > 0) row += ',';
    row += f[i];
  }
  return row;
}

std::string StatsToJson(const CampaignStats& s, const StatsContext& ctx) {
  ordered_json j = {
      {"schema_version", kSchemaVersion},
      {"variant", ctx.variant},
      {"seed", ctx.seed},
      {"c_rate_scope",
       ctx.c_rate_scope == ChangeRateScope::kJoint ? "joint" : "example-only"},
      {"total", s.total},
      {"attempted", s.attempted},
      {"succeeded", s.succeeded},
      {"failed", s.failed},
      {"skipped", s.skipped},
      {"s_rate", Optional(s.s_rate)},
      {"c_rate", Optional(s.c_rate)},
      {"mean_ppl", Optional(s.mean_ppl)},
      {"mean_ge", Optional(s.mean_ge)},
      {"mean_queries", Optional(s.mean_queries)},
      {"total_queries", s.total_queries},
      {"cache_hits", ctx.cache_hits},
  };
  if (ctx.include_timing) j["timing"] = {{"mean_time_seconds", Optional(s.mean_time)}};
  return j.dump(2) + "\n";
}

std::string TraceRecordToJsonLine(const IterationRecord& r) {
  const ordered_json j = {
      {"iteration", r.iteration},
      {"position", r.position},
      {"expanded", r.expanded},
      {"width", r.width},
      {"indicator_sum", r.indicator_sum},
      {"beam_best", r.beam_best},
      {"historical_best", r.historical_best},
      {"refilled", r.refilled},
      {"queries", r.queries},
  };
  return j.dump();
}

std::string TraceToJsonl(const SearchTrace& trace) {
  std::string out;
  for (const auto& r : trace.records) out += TraceRecordToJsonLine(r) + "\n";
  return out;
}

}  // namespace textprobe
