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

// Persisted formats: results.jsonl (one TestResult per line), results.csv,
// stats.json and per-case trace files (one IterationRecord per line).
// Wall-clock values live under a separate "timing" object, which
// --omit-timing leaves out.

#ifndef TEXTPROBE_REPORT_H_
#define TEXTPROBE_REPORT_H_

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "textprobe/metrics.h"
#include "textprobe/search.h"

namespace textprobe {

inline constexpr int kSchemaVersion = 1;

std::string ResultToJsonLine(const TestResult& result, bool include_timing);
// Throws ParseError.
TestResult ResultFromJson(std::string_view line, const std::string& source,
                          std::size_t lineno);
std::vector<TestResult> ReadResultsJsonl(const std::filesystem::path& path);

std::string CsvHeader(bool include_timing);
std::string ResultToCsvRow(const TestResult& result, bool include_timing);
// RFC 4180 quoting when needed.
std::string CsvEscape(std::string_view field);

struct StatsContext {
  ChangeRateScope c_rate_scope = ChangeRateScope::kJoint;
  std::string variant;
  std::uint64_t seed = 0;
  std::uint64_t cache_hits = 0;
  bool include_timing = true;
};

std::string StatsToJson(const CampaignStats& stats, const StatsContext& context);

std::string TraceRecordToJsonLine(const IterationRecord& record);
std::string TraceToJsonl(const SearchTrace& trace);

}  // namespace textprobe

#endif  // TEXTPROBE_REPORT_H_
