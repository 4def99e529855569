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

#include "textprobe/dataset.h"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <numeric>
#include <set>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include "json.hpp"
#include "textprobe/errors.h"
#include "textprobe/text.h"

namespace textprobe {
namespace {

std::string ResolveLabel(const std::string& label, const LabelSet& labels,
                         const std::string& source, std::size_t line) {
  const std::string lower = ToLowerAscii(label);
  for (const auto& l : labels) {
    if (ToLowerAscii(l) == lower) return l;
  }
  throw UnknownLabelError(source + ":" + std::to_string(line) +
                          ": unknown label '" + label + "'");
}

void Finish(std::vector<DatasetRecord>& records, const std::string& source) {
  std::set<std::string> ids;
  for (const auto& r : records) {
    if (!ids.insert(r.id).second) {
      throw ParseError(source, 0, "duplicate id '" + r.id + "'");
    }
  }
}

std::vector<DatasetRecord> ParseCsvDataset(std::istream& in,
                                           const LabelSet& labels,
                                           const std::string& source) {
  const std::vector<CsvRow> rows = ParseCsv(in, source);
  if (rows.empty()) throw ParseError(source, 1, "missing header row");
  const auto& header = rows.front().fields;
  auto column = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (ToLowerAscii(header[i]) == name) return i;
    }
    return std::nullopt;
  };
  const auto text_col = column("text");
  const auto label_col = column("label");
  const auto id_col = column("id");
  if (!text_col || !label_col) {
    throw ParseError(source, 1, "header must name 'text' and 'label'");
  }
  std::vector<DatasetRecord> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const CsvRow& row = rows[r];
    if (row.fields.size() == 1 && row.fields[0].empty()) continue;
    if (row.fields.size() != header.size()) {
      throw ParseError(source, row.line,
                       "expected " + std::to_string(header.size()) +
                           " fields, got " + std::to_string(row.fields.size()));
    }
    DatasetRecord rec;
    rec.id = id_col ? row.fields[*id_col] : std::to_string(out.size() + 1);
    rec.text = row.fields[*text_col];
    if (rec.text.empty()) {
      throw EmptyTextError(source + ":" + std::to_string(row.line) + ": empty text");
    }
    rec.label = ResolveLabel(row.fields[*label_col], labels, source, row.line);
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<DatasetRecord> ParseJsonlDataset(std::istream& in,
                                             const LabelSet& labels,
                                             const std::string& source) {
  std::vector<DatasetRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(source, lineno, e.what());
    }
    if (!j.is_object() || !j.contains("text") || !j["text"].is_string() ||
        !j.contains("label") || !j["label"].is_string()) {
      throw ParseError(source, lineno, "expected string fields 'text' and 'label'");
    }
    DatasetRecord rec;
    if (j.contains("id")) {
      const auto& id = j["id"];
      if (id.is_string()) {
        rec.id = id.get<std::string>();
      } else if (id.is_number_integer()) {
        rec.id = id.dump();
      } else {
        throw ParseError(source, lineno, "'id' must be a string or integer");
      }
    } else {
      rec.id = std::to_string(out.size() + 1);
    }
    rec.text = j["text"].get<std::string>();
    if (rec.text.empty()) {
      throw EmptyTextError(source + ":" + std::to_string(lineno) + ": empty text");
    }
    rec.label = ResolveLabel(j["label"].get<std::string>(), labels, source, lineno);
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace

std::string_view DatasetFormatName(DatasetFormat format) {
  return format == DatasetFormat::kCsv ? "csv" : "jsonl";
}

std::optional<DatasetFormat> ParseDatasetFormat(std::string_view name) {
  if (name == "csv") return DatasetFormat::kCsv;
  if (name == "jsonl") return DatasetFormat::kJsonl;
  return std::nullopt;
}

DatasetFormat GuessDatasetFormat(const std::filesystem::path& path) {
  const std::string ext = ToLowerAscii(path.extension().string());
  if (ext == ".csv") return DatasetFormat::kCsv;
  if (ext == ".jsonl" || ext == ".json") return DatasetFormat::kJsonl;
  throw ConfigError("cannot infer dataset format of " + path.string());
}

std::vector<CsvRow> ParseCsv(std::istream& in, const std::string& source) {
  const std::string data((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  std::vector<CsvRow> rows;
  CsvRow row{1, {}};
  std::string field;
  std::size_t line = 1;
  bool quoted = false;
  bool field_started = false;
  bool after_quote = false;
  std::size_t quote_line = 0;
  auto end_field = [&] {
    row.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
    after_quote = false;
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row = CsvRow{line, {}};
  };
  for (std::size_t i = 0; i < data.size(); ++i) {
    const char c = data[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < data.size() && data[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
          after_quote = true;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started || !field.empty()) {
          throw ParseError(source, line, "quote inside unquoted field");
        }
        quoted = true;
        field_started = true;
        quote_line = line;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < data.size() && data[i + 1] == '\n') break;
        ++line;
        end_row();
        break;
      case '\n':
        ++line;
        end_row();
        break;
      default:
        if (after_quote) {
          throw ParseError(source, line, "text after closing quote");
        }
        field.push_back(c);
    }
  }
  if (quoted) throw ParseError(source, quote_line, "unterminated quoted field");
  if (field_started || !field.empty() || !row.fields.empty()) end_row();
  return rows;
}

std::vector<DatasetRecord> ParseDataset(std::istream& in, DatasetFormat format,
                                        const LabelSet& labels,
                                        const std::string& source) {
  ValidateLabelSet(labels);
  std::vector<DatasetRecord> out = format == DatasetFormat::kCsv
                                       ? ParseCsvDataset(in, labels, source)
                                       : ParseJsonlDataset(in, labels, source);
  Finish(out, source);
  return out;
}

std::vector<DatasetRecord> LoadDataset(const std::filesystem::path& path,
                                       DatasetFormat format,
                                       const LabelSet& labels) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return ParseDataset(in, format, labels, path.string());
}

std::vector<std::size_t> SampleIndices(std::size_t population,
                                       std::size_t sample_size,
                                       std::uint64_t seed) {
  std::vector<std::size_t> idx(population);
  std::iota(idx.begin(), idx.end(), 0);
  if (sample_size >= population) return idx;
  boost::random::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < sample_size; ++i) {
    boost::random::uniform_int_distribution<std::size_t> pick(i, population - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(sample_size);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace textprobe
