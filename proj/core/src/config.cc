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

#include "textprobe/config.h"

#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "textprobe/errors.h"
#include "toml.hpp"

namespace textprobe {
namespace {

const std::map<std::string, std::set<std::string>>& KnownKeys() {
  static const auto* keys = new std::map<std::string, std::set<std::string>>{
      {"dataset", {"path", "format", "labels", "sample_size"}},
      {"prompt", {"text", "protected"}},
      {"model",
       {"mock_weights", "endpoint", "api_key_env", "name", "template",
        "timeout", "retries", "backoff", "cache", "parallelism"}},
      {"search", {"variant", "b_min", "b_max", "beam_width", "max_queries", "wir"}},
      {"perturbation", {"kinds", "lexicon", "lexicon_format", "insert_alphabet"}},
      {"constraints",
       {"stop_words", "stop_word_file", "max_change_rate", "max_edits",
        "pos_lexicon", "pos_format", "blacklist"}},
      {"campaign", {"seed", "workers", "out", "repeat", "omit_timing"}},
      {"metrics",
       {"perplexity", "ppl_corpus", "ppl_order", "ppl_vocab", "ppl_url",
        "grammar_url", "c_rate_scope"}},
  };
  return *keys;
}

std::string Upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

// One value source for a key: the environment wins over the file.
class Layered {
 public:
  Layered(const toml::table* table, const EnvLookup& env,
          std::filesystem::path base_dir)
      : table_(table), env_(env), base_dir_(std::move(base_dir)) {}

  std::optional<std::string> String(const std::string& section,
                                    const std::string& key) const {
    if (auto e = Env(section, key)) return e;
    if (const toml::node* n = Node(section, key)) {
      if (auto v = n->value<std::string>()) return *v;
      Fail(section, key, "expected a string");
    }
    return std::nullopt;
  }

  std::optional<std::int64_t> Int(const std::string& section,
                                  const std::string& key) const {
    if (auto e = Env(section, key)) {
      try {
        std::size_t used = 0;
        const long long v = std::stoll(*e, &used);
        if (used == e->size()) return v;
      } catch (const std::exception&) {
      }
      Fail(section, key, "expected an integer, got '" + *e + "'");
    }
    if (const toml::node* n = Node(section, key)) {
      if (auto v = n->value_exact<std::int64_t>()) return *v;
      Fail(section, key, "expected an integer");
    }
    return std::nullopt;
  }

  std::optional<double> Double(const std::string& section,
                               const std::string& key) const {
    if (auto e = Env(section, key)) {
      try {
        std::size_t used = 0;
        const double v = std::stod(*e, &used);
        if (used == e->size()) return v;
      } catch (const std::exception&) {
      }
      Fail(section, key, "expected a number, got '" + *e + "'");
    }
    if (const toml::node* n = Node(section, key)) {
      if (auto v = n->value<double>()) return *v;
      Fail(section, key, "expected a number");
    }
    return std::nullopt;
  }

  std::optional<bool> Bool(const std::string& section,
                           const std::string& key) const {
    if (auto e = Env(section, key)) {
      const std::string v = ToLowerAscii(*e);
      if (v == "true" || v == "1" || v == "yes") return true;
      if (v == "false" || v == "0" || v == "no") return false;
      Fail(section, key, "expected a boolean, got '" + *e + "'");
    }
    if (const toml::node* n = Node(section, key)) {
      if (auto v = n->value_exact<bool>()) return *v;
      Fail(section, key, "expected a boolean");
    }
    return std::nullopt;
  }

  std::optional<std::vector<std::string>> List(const std::string& section,
                                               const std::string& key) const {
    if (auto e = Env(section, key)) {
      std::vector<std::string> out;
      std::stringstream ss(*e);
      std::string item;
      while (std::getline(ss, item, ',')) {
        item = Trim(item);
        if (!item.empty()) out.push_back(item);
      }
      return out;
    }
    if (const toml::node* n = Node(section, key)) {
      const toml::array* arr = n->as_array();
      if (arr == nullptr) Fail(section, key, "expected an array of strings");
      std::vector<std::string> out;
      for (const toml::node& item : *arr) {
        auto v = item.value<std::string>();
        if (!v) Fail(section, key, "expected an array of strings");
        out.push_back(*v);
      }
      return out;
    }
    return std::nullopt;
  }

  // Environment paths stay relative to the working directory.
  std::optional<std::filesystem::path> Path(const std::string& section,
                                            const std::string& key) const {
    if (auto e = Env(section, key)) return std::filesystem::path(*e);
    if (auto v = String(section, key)) {
      std::filesystem::path p(*v);
      if (p.is_relative() && !base_dir_.empty()) p = base_dir_ / p;
      return p;
    }
    return std::nullopt;
  }

 private:
  std::optional<std::string> Env(const std::string& section,
                                 const std::string& key) const {
    if (!env_) return std::nullopt;
    return env_("TEXTPROBE_" + Upper(section) + "_" + Upper(key));
  }

  const toml::node* Node(const std::string& section,
                         const std::string& key) const {
    if (table_ == nullptr) return nullptr;
    const toml::table* sec = (*table_)[section].as_table();
    if (sec == nullptr) return nullptr;
    return sec->get(key);
  }

  [[noreturn]] static void Fail(const std::string& section,
                                const std::string& key, const std::string& msg) {
    throw ConfigError(section + "." + key + ": " + msg);
  }

  const toml::table* table_;
  const EnvLookup& env_;
  std::filesystem::path base_dir_;
};

void CheckKnownKeys(const toml::table& table) {
  const auto& known = KnownKeys();
  for (const auto& [name, node] : table) {
    const std::string section(name.str());
    auto it = known.find(section);
    if (it == known.end()) throw ConfigError("unknown section [" + section + "]");
    const toml::table* sec = node.as_table();
    if (sec == nullptr) throw ConfigError("'" + section + "' must be a table");
    for (const auto& [key, value] : *sec) {
      if (!it->second.count(std::string(key.str()))) {
        throw ConfigError("unknown key " + section + "." + std::string(key.str()));
      }
    }
  }
}

LexiconFormat ParseLexiconFormat(const std::string& s, const std::string& key) {
  if (s == "tsv") return LexiconFormat::kTsv;
  if (s == "wordnet") return LexiconFormat::kWordNetDb;
  throw ConfigError(key + ": expected 'tsv' or 'wordnet', got '" + s + "'");
}

std::string_view LexiconFormatName(LexiconFormat f) {
  return f == LexiconFormat::kTsv ? "tsv" : "wordnet";
}

template <typename T>
T NonNegative(std::int64_t v, const std::string& key) {
  if (v < 0) throw ConfigError(key + " must be non-negative");
  return static_cast<T>(v);
}

CampaignConfig Build(const toml::table* table, const EnvLookup& env,
                     const std::filesystem::path& base_dir) {
  const Layered in(table, env, base_dir);
  CampaignConfig c;

  if (auto v = in.Path("dataset", "path")) c.dataset = *v;
  if (auto v = in.String("dataset", "format")) {
    c.dataset_format = ParseDatasetFormat(*v);
    if (!c.dataset_format) throw ConfigError("dataset.format: unknown '" + *v + "'");
  }
  if (auto v = in.List("dataset", "labels")) c.labels = *v;
  if (auto v = in.Int("dataset", "sample_size")) {
    c.sample_size = NonNegative<std::size_t>(*v, "dataset.sample_size");
  }

  if (auto v = in.String("prompt", "text")) c.prompt = *v;
  if (auto v = in.List("prompt", "protected")) c.protected_spans = *v;

  if (auto v = in.Path("model", "mock_weights")) c.mock_weights = *v;
  if (auto v = in.String("model", "endpoint")) c.endpoint = *v;
  if (auto v = in.String("model", "api_key_env")) c.api_key_env = *v;
  if (auto v = in.String("model", "name")) c.model_name = *v;
  if (auto v = in.String("model", "template")) c.prompt_template = *v;
  if (auto v = in.Double("model", "timeout")) c.timeout_seconds = *v;
  if (auto v = in.Int("model", "retries")) c.retries = NonNegative<int>(*v, "model.retries");
  if (auto v = in.Double("model", "backoff")) c.backoff_seconds = *v;
  if (auto v = in.Bool("model", "cache")) c.cache = *v;
  if (auto v = in.Int("model", "parallelism")) c.parallelism = static_cast<int>(*v);

  if (auto v = in.String("search", "variant")) {
    const auto variant = ParseSearchVariant(*v);
    if (!variant) throw ConfigError("search.variant: unknown '" + *v + "'");
    c.variant = *variant;
  }
  if (auto v = in.Int("search", "b_min")) c.b_min = static_cast<int>(*v);
  if (auto v = in.Int("search", "b_max")) c.b_max = static_cast<int>(*v);
  if (auto v = in.Int("search", "beam_width")) c.beam_width = static_cast<int>(*v);
  if (auto v = in.Int("search", "max_queries")) {
    c.max_queries = NonNegative<std::uint64_t>(*v, "search.max_queries");
  }
  if (auto v = in.String("search", "wir")) {
    if (*v == "softmax") {
      c.wir_mode = WirMode::kSoftmax;
    } else if (*v == "delta") {
      c.wir_mode = WirMode::kRawDelta;
    } else {
      throw ConfigError("search.wir: expected 'softmax' or 'delta'");
    }
  }

  if (auto v = in.List("perturbation", "kinds")) {
    c.edit_kinds.clear();
    for (const auto& name : *v) {
      const auto kind = ParseEditKind(name);
      if (!kind) throw ConfigError("perturbation.kinds: unknown '" + name + "'");
      c.edit_kinds.push_back(*kind);
    }
  }
  if (auto v = in.Path("perturbation", "lexicon")) c.lexicon = *v;
  if (auto v = in.String("perturbation", "lexicon_format")) {
    c.lexicon_format = ParseLexiconFormat(*v, "perturbation.lexicon_format");
  }
  if (auto v = in.String("perturbation", "insert_alphabet")) c.insert_alphabet = *v;

  if (auto v = in.Bool("constraints", "stop_words")) c.stop_words = *v;
  if (auto v = in.Path("constraints", "stop_word_file")) c.stop_word_file = *v;
  if (auto v = in.Double("constraints", "max_change_rate")) {
    // Zero or negative disables the constraint.
    c.max_change_rate = *v > 0 ? std::optional<double>(*v) : std::nullopt;
  }
  if (auto v = in.Int("constraints", "max_edits")) {
    c.max_edits = NonNegative<std::size_t>(*v, "constraints.max_edits");
  }
  if (auto v = in.Path("constraints", "pos_lexicon")) c.pos_lexicon = *v;
  if (auto v = in.String("constraints", "pos_format")) {
    c.pos_format = ParseLexiconFormat(*v, "constraints.pos_format");
  }
  if (auto v = in.List("constraints", "blacklist")) c.blacklist = *v;

  if (auto v = in.Int("campaign", "seed")) c.seed = static_cast<std::uint64_t>(*v);
  if (auto v = in.Int("campaign", "workers")) c.workers = static_cast<int>(*v);
  if (auto v = in.Path("campaign", "out")) c.out_dir = *v;
  if (auto v = in.Int("campaign", "repeat")) c.repeat = static_cast<int>(*v);
  if (auto v = in.Bool("campaign", "omit_timing")) c.omit_timing = *v;

  if (auto v = in.String("metrics", "perplexity")) {
    const auto mode = ParsePerplexityMode(*v);
    if (!mode) throw ConfigError("metrics.perplexity: unknown '" + *v + "'");
    c.perplexity = *mode;
  }
  if (auto v = in.Path("metrics", "ppl_corpus")) c.ppl_corpus = *v;
  if (auto v = in.Int("metrics", "ppl_order")) c.ppl_order = static_cast<int>(*v);
  if (auto v = in.Int("metrics", "ppl_vocab")) {
    c.ppl_vocab = NonNegative<std::size_t>(*v, "metrics.ppl_vocab");
  }
  if (auto v = in.String("metrics", "ppl_url")) c.ppl_url = *v;
  if (auto v = in.String("metrics", "grammar_url")) c.grammar_url = *v;
  if (auto v = in.String("metrics", "c_rate_scope")) {
    if (*v == "joint") {
      c.c_rate_scope = ChangeRateScope::kJoint;
    } else if (*v == "example-only") {
      c.c_rate_scope = ChangeRateScope::kExampleOnly;
    } else {
      throw ConfigError("metrics.c_rate_scope: expected 'joint' or 'example-only'");
    }
  }
  return c;
}

}  // namespace

std::string_view PerplexityModeName(PerplexityMode mode) {
  switch (mode) {
    case PerplexityMode::kNone: return "none";
    case PerplexityMode::kUniform: return "uniform";
    case PerplexityMode::kNgram: return "ngram";
    case PerplexityMode::kRemote: return "remote";
  }
  return "none";
}

std::optional<PerplexityMode> ParsePerplexityMode(std::string_view name) {
  for (PerplexityMode m : {PerplexityMode::kNone, PerplexityMode::kUniform,
                           PerplexityMode::kNgram, PerplexityMode::kRemote}) {
    if (PerplexityModeName(m) == name) return m;
  }
  return std::nullopt;
}

void CampaignConfig::Validate() const {
  if (dataset.empty()) throw ConfigError("dataset.path is required");
  ValidateLabelSet(labels);
  if (mock_weights && endpoint) {
    throw ConfigError("model.mock_weights and model.endpoint are exclusive");
  }
  if (!mock_weights && !endpoint) {
    throw ConfigError("one of model.mock_weights or model.endpoint is required");
  }
  if (endpoint && model_name.empty()) throw ConfigError("model.name is required");
  if (parallelism < 1) throw ConfigError("model.parallelism must be >= 1");
  if (timeout_seconds <= 0) throw ConfigError("model.timeout must be positive");
  if (backoff_seconds < 0) throw ConfigError("model.backoff must be non-negative");
  if (workers < 1) throw ConfigError("campaign.workers must be >= 1");
  if (repeat < 1) throw ConfigError("campaign.repeat must be >= 1");
  if (sample_size == 0) throw ConfigError("dataset.sample_size must be positive");
  if (edit_kinds.empty()) throw ConfigError("perturbation.kinds must not be empty");
  for (EditKind k : edit_kinds) {
    if ((k == EditKind::kSynonym || k == EditKind::kWordInsert) && !lexicon) {
      throw ConfigError(std::string(EditKindName(k)) +
                        " edits need perturbation.lexicon");
    }
  }
  if (max_change_rate && *max_change_rate > 1.0) {
    throw ConfigError("constraints.max_change_rate must be in (0, 1]");
  }
  if (perplexity == PerplexityMode::kNgram && !ppl_corpus) {
    throw ConfigError("metrics.perplexity = ngram needs metrics.ppl_corpus");
  }
  if (perplexity == PerplexityMode::kRemote && !ppl_url) {
    throw ConfigError("metrics.perplexity = remote needs metrics.ppl_url");
  }
  if (perplexity == PerplexityMode::kUniform && ppl_vocab == 0) {
    throw ConfigError("metrics.ppl_vocab must be positive");
  }
  if (ppl_order < 1) throw ConfigError("metrics.ppl_order must be >= 1");
  ToSearchConfig().Validate();
}

SearchConfig CampaignConfig::ToSearchConfig() const {
  const bool adaptive =
      variant == SearchVariant::kAbs || variant == SearchVariant::kNoBt;
  if (adaptive && beam_width) {
    throw ConfigError("search.beam_width applies only to fixed-width variants");
  }
  SearchConfig s = SearchConfig::ForVariant(variant, b_min, b_max, beam_width);
  s.max_queries = max_queries;
  s.rng_seed = seed;
  s.wir_mode = wir_mode;
  return s;
}

EnvLookup ProcessEnvironment() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (v == nullptr) return std::nullopt;
    return std::string(v);
  };
}

CampaignConfig ConfigFromEnvironment(const EnvLookup& env) {
  return Build(nullptr, env, {});
}

CampaignConfig ParseConfig(std::string_view toml_text,
                           const std::filesystem::path& base_dir,
                           const std::string& source, const EnvLookup& env) {
  toml::table table;
  try {
    table = toml::parse(toml_text, source);
  } catch (const toml::parse_error& e) {
    throw ParseError(source, e.source().begin.line, std::string(e.description()));
  }
  CheckKnownKeys(table);
  return Build(&table, env, base_dir);
}

CampaignConfig LoadConfig(const std::filesystem::path& path,
                          const EnvLookup& env) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseConfig(ss.str(), path.parent_path(), path.string(), env);
}

std::string ResolvedConfigJson(const CampaignConfig& c) {
  using nlohmann::ordered_json;
  auto opt_path = [](const std::optional<std::filesystem::path>& p) {
    return p ? ordered_json(p->string()) : ordered_json(nullptr);
  };
  auto opt_str = [](const std::optional<std::string>& s) {
    return s ? ordered_json(*s) : ordered_json(nullptr);
  };
  ordered_json kinds = ordered_json::array();
  for (EditKind k : c.edit_kinds) kinds.push_back(std::string(EditKindName(k)));
  const SearchConfig s = c.ToSearchConfig();

  ordered_json j;
  j["dataset"] = {
      {"path", c.dataset.string()},
      {"format", c.dataset_format
                     ? ordered_json(std::string(DatasetFormatName(*c.dataset_format)))
                 : c.dataset.empty()
                     ? ordered_json(nullptr)
                     : ordered_json(std::string(DatasetFormatName(
                           GuessDatasetFormat(c.dataset))))},
      {"labels", c.labels},
      {"sample_size", c.sample_size},
  };
  j["prompt"] = {{"text", c.prompt}, {"protected", c.protected_spans}};
  j["model"] = {
      {"mock_weights", opt_path(c.mock_weights)},
      {"endpoint", opt_str(c.endpoint)},
      {"api_key_env", c.endpoint ? ordered_json(c.api_key_env) : ordered_json(nullptr)},
      {"name", c.model_name},
      {"template", c.prompt_template},
      {"timeout", c.timeout_seconds},
      {"retries", c.retries},
      {"backoff", c.backoff_seconds},
      {"cache", c.cache},
      {"parallelism", c.parallelism},
  };
  j["search"] = {
      {"variant", std::string(SearchVariantName(c.variant))},
      {"b_min", s.b_min},
      {"b_max", s.b_max},
      {"adaptive_width", s.adaptive_width},
      {"backtracking", s.backtracking},
      {"beam_width", s.fixed_width ? ordered_json(*s.fixed_width) : ordered_json(nullptr)},
      {"max_queries", s.max_queries ? ordered_json(*s.max_queries) : ordered_json(nullptr)},
      {"wir", c.wir_mode == WirMode::kSoftmax ? "softmax" : "delta"},
  };
  j["perturbation"] = {
      {"kinds", kinds},
      {"lexicon", opt_path(c.lexicon)},
      {"lexicon_format", std::string(LexiconFormatName(c.lexicon_format))},
      {"insert_alphabet", c.insert_alphabet},
  };
  j["constraints"] = {
      {"stop_words", c.stop_words},
      {"stop_word_file", opt_path(c.stop_word_file)},
      {"max_change_rate",
       c.max_change_rate ? ordered_json(*c.max_change_rate) : ordered_json(nullptr)},
      {"max_edits", c.max_edits ? ordered_json(*c.max_edits) : ordered_json(nullptr)},
      {"pos_lexicon", opt_path(c.pos_lexicon)},
      {"pos_format", std::string(LexiconFormatName(c.pos_format))},
      {"blacklist", c.blacklist},
  };
  j["campaign"] = {
      {"seed", c.seed},
      {"workers", c.workers},
      {"out", c.out_dir.string()},
      {"repeat", c.repeat},
      {"omit_timing", c.omit_timing},
  };
  j["metrics"] = {
      {"perplexity", std::string(PerplexityModeName(c.perplexity))},
      {"ppl_corpus", opt_path(c.ppl_corpus)},
      {"ppl_order", c.ppl_order},
      {"ppl_vocab", c.ppl_vocab},
      {"ppl_url", opt_str(c.ppl_url)},
      {"grammar_url", opt_str(c.grammar_url)},
      {"c_rate_scope",
       c.c_rate_scope == ChangeRateScope::kJoint ? "joint" : "example-only"},
  };
  return j.dump(2) + "\n";
}

}  // namespace textprobe
