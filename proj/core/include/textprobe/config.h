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

// Campaign configuration. Layers, lowest precedence first: built-in
// defaults, a TOML file, TEXTPROBE_<SECTION>_<KEY> environment variables,
// command-line flags (applied by the caller on the returned struct).
//
//   [dataset]      path, format, labels, sample_size
//   [prompt]       text, protected
//   [model]        mock_weights | endpoint, api_key_env, name, template,
//                  timeout, retries, backoff, cache, parallelism
//   [search]       variant, b_min, b_max, beam_width, max_queries, wir
//   [perturbation] kinds, lexicon, lexicon_format, insert_alphabet
//   [constraints]  stop_words, stop_word_file, max_change_rate, max_edits,
//                  pos_lexicon, pos_format, blacklist
//   [campaign]     seed, workers, out, repeat, omit_timing
//   [metrics]      perplexity, ppl_corpus, ppl_order, ppl_vocab, ppl_url,
//                  grammar_url, c_rate_scope
//
// List values given through the environment are comma-separated. Relative
// paths in the file resolve against the file's directory.

#ifndef TEXTPROBE_CONFIG_H_
#define TEXTPROBE_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "textprobe/dataset.h"
#include "textprobe/lexical.h"
#include "textprobe/metrics.h"
#include "textprobe/search.h"
#include "textprobe/text.h"

namespace textprobe {

enum class PerplexityMode { kNone, kUniform, kNgram, kRemote };

struct CampaignConfig {
  // [dataset]
  std::filesystem::path dataset;
  std::optional<DatasetFormat> dataset_format;
  LabelSet labels;
  std::size_t sample_size = 1000;

  // [prompt]
  std::string prompt;
  std::vector<std::string> protected_spans;

  // [model]
  std::optional<std::filesystem::path> mock_weights;
  std::optional<std::string> endpoint;
  std::string api_key_env = "OPENAI_API_KEY";
  std::string model_name;
  std::string prompt_template = "{example}";
  double timeout_seconds = 60.0;
  int retries = 2;
  double backoff_seconds = 0.0;
  bool cache = true;
  int parallelism = 1;

  // [search]
  SearchVariant variant = SearchVariant::kAbs;
  int b_min = 1;
  int b_max = 6;
  std::optional<int> beam_width;
  std::optional<std::uint64_t> max_queries;
  WirMode wir_mode = WirMode::kSoftmax;

  // [perturbation]
  std::vector<EditKind> edit_kinds{EditKind::kSynonym};
  std::optional<std::filesystem::path> lexicon;
  LexiconFormat lexicon_format = LexiconFormat::kTsv;
  std::string insert_alphabet = "aeiou";

  // [constraints]
  bool stop_words = true;
  std::optional<std::filesystem::path> stop_word_file;
  std::optional<double> max_change_rate = 0.25;
  std::optional<std::size_t> max_edits;
  std::optional<std::filesystem::path> pos_lexicon;
  LexiconFormat pos_format = LexiconFormat::kTsv;
  std::vector<std::string> blacklist;

  // [campaign]
  std::uint64_t seed = 0;
  int workers = 1;
  std::filesystem::path out_dir = "textprobe-out";
  int repeat = 1;
  bool omit_timing = false;

  // [metrics]
  PerplexityMode perplexity = PerplexityMode::kNone;
  std::optional<std::filesystem::path> ppl_corpus;
  int ppl_order = 2;
  std::size_t ppl_vocab = 50000;
  std::optional<std::string> ppl_url;
  std::optional<std::string> grammar_url;
  ChangeRateScope c_rate_scope = ChangeRateScope::kJoint;

  // Cross-field checks. Throws ConfigError.
  void Validate() const;

  SearchConfig ToSearchConfig() const;
};

// Returns the value of an environment variable, if set.
using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
EnvLookup ProcessEnvironment();

// Defaults overlaid with the environment only.
CampaignConfig ConfigFromEnvironment(const EnvLookup& env);
// Throws ParseError for TOML syntax errors, ConfigError for unknown keys or
// ill-typed values.
CampaignConfig LoadConfig(const std::filesystem::path& path,
                          const EnvLookup& env);
CampaignConfig ParseConfig(std::string_view toml_text,
                           const std::filesystem::path& base_dir,
                           const std::string& source, const EnvLookup& env);

// Fully resolved configuration as pretty JSON. Never contains secrets: only
// the name of the API key variable is recorded.
std::string ResolvedConfigJson(const CampaignConfig& config);

std::string_view PerplexityModeName(PerplexityMode mode);
std::optional<PerplexityMode> ParsePerplexityMode(std::string_view name);

}  // namespace textprobe

#endif  // TEXTPROBE_CONFIG_H_
