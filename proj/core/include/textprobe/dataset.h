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

// Labelled example datasets.
//
// CSV: RFC 4180, header row naming at least `text` and `label`; an `id`
// column is optional. JSONL: one object per line with "text", "label" and
// optional "id". Missing ids become the 1-based record number.

#ifndef TEXTPROBE_DATASET_H_
#define TEXTPROBE_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "textprobe/threat_model.h"

namespace textprobe {

enum class DatasetFormat { kCsv, kJsonl };

std::string_view DatasetFormatName(DatasetFormat format);
std::optional<DatasetFormat> ParseDatasetFormat(std::string_view name);
// By extension: .csv or .jsonl/.json. Throws ConfigError otherwise.
DatasetFormat GuessDatasetFormat(const std::filesystem::path& path);

struct DatasetRecord {
  std::string id;
  std::string text;
  std::string label;
};

// Throws ParseError (with line numbers), UnknownLabelError for labels outside
// `labels`, EmptyTextError for empty text.
std::vector<DatasetRecord> ParseDataset(std::istream& in, DatasetFormat format,
                                        const LabelSet& labels,
                                        const std::string& source);
std::vector<DatasetRecord> LoadDataset(const std::filesystem::path& path,
                                       DatasetFormat format,
                                       const LabelSet& labels);

// Rows of an RFC 4180 document, each with its starting line number.
struct CsvRow {
  std::size_t line = 0;
  std::vector<std::string> fields;
};
std::vector<CsvRow> ParseCsv(std::istream& in, const std::string& source);

// Indices of a seeded sample without replacement, ascending. All indices
// when `sample_size` >= `population`.
std::vector<std::size_t> SampleIndices(std::size_t population,
                                       std::size_t sample_size,
                                       std::uint64_t seed);

}  // namespace textprobe

#endif  // TEXTPROBE_DATASET_H_
