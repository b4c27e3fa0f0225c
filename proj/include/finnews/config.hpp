#pragma once

// Pipeline configuration: a small TOML-subset reader (sections, string /
// number / boolean / string-array values, '#' comments) plus the typed
// PipelineConfig all stages share.

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "finnews/resolver.hpp"
#include "finnews/segmenter.hpp"
#include "finnews/temporal.hpp"
#include "finnews/topic_model.hpp"

namespace finnews {

class TomlTable {
 public:
  using Value = std::variant<std::string, double, bool, std::vector<std::string>>;

  static TomlTable parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    return parse(content, path);
  }

  static TomlTable parse(std::string_view content, const std::string& origin = "<config>") {
    TomlTable t;
    std::string section;
    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos <= content.size()) {
      std::size_t eol = content.find('\n', pos);
      std::string_view line = content.substr(
          pos, eol == std::string_view::npos ? content.size() - pos : eol - pos);
      pos = eol == std::string_view::npos ? content.size() + 1 : eol + 1;
      ++lineno;
      auto hash = line.find('#');
      if (hash != std::string_view::npos) {
        // keep '#' inside quoted strings
        bool quoted = false;
        for (std::size_t i = 0; i < hash; ++i)
          if (line[i] == '"') quoted = !quoted;
        if (!quoted) line = line.substr(0, hash);
      }
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed section header");
        section = std::string(trim(line.substr(1, line.size() - 2)));
        continue;
      }
      auto eq = line.find('=');
      if (eq == std::string_view::npos)
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
      std::string key(trim(line.substr(0, eq)));
      std::string_view raw = trim(line.substr(eq + 1));
      if (key.empty() || raw.empty())
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key or value");
      std::string full = section.empty() ? key : section + "." + key;
      t.values_[full] = parse_value(raw, origin, lineno);
    }
    return t;
  }

  bool contains(const std::string& key) const { return values_.count(key) > 0; }

  std::optional<std::string> get_string(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
    throw ConfigError("config key " + key + " is not a string");
  }

  std::optional<double> get_number(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    if (const auto* d = std::get_if<double>(&it->second)) return *d;
    throw ConfigError("config key " + key + " is not a number");
  }

  std::optional<bool> get_bool(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    if (const auto* b = std::get_if<bool>(&it->second)) return *b;
    throw ConfigError("config key " + key + " is not a boolean");
  }

  std::optional<std::vector<std::string>> get_string_array(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    if (const auto* v = std::get_if<std::vector<std::string>>(&it->second)) return *v;
    throw ConfigError("config key " + key + " is not a string array");
  }

 private:
  static Value parse_value(std::string_view raw, const std::string& origin, std::size_t lineno) {
    if (raw.front() == '"') {
      if (raw.size() < 2 || raw.back() != '"')
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": unterminated string");
      return std::string(raw.substr(1, raw.size() - 2));
    }
    if (raw == "true") return true;
    if (raw == "false") return false;
    if (raw.front() == '[') {
      if (raw.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": unterminated array");
      std::vector<std::string> items;
      std::string_view inner = trim(raw.substr(1, raw.size() - 2));
      while (!inner.empty()) {
        std::size_t next;
        if (inner.front() == '"') {
          auto close = inner.find('"', 1);
          if (close == std::string_view::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": unterminated string");
          items.emplace_back(inner.substr(1, close - 1));
          next = inner.find(',', close);
        } else {
          next = inner.find(',');
          items.emplace_back(trim(inner.substr(0, next)));
        }
        if (next == std::string_view::npos) break;
        inner = trim(inner.substr(next + 1));
      }
      return items;
    }
    try {
      std::size_t used = 0;
      double d = std::stod(std::string(raw), &used);
      if (used == raw.size()) return d;
    } catch (...) {
    }
    throw ConfigError(origin + ":" + std::to_string(lineno) + ": cannot parse value: " +
                      std::string(raw));
  }

  std::map<std::string, Value> values_;
};

struct PipelinePaths {
  std::string corpus = "data/sample/corpus.jsonl";
  std::string lda_train_corpus;  // defaults to `corpus` when empty
  std::string stopwords = "data/stopwords.txt";
  std::string abbreviations = "data/abbreviations.txt";
  std::string lexicon_dir = "data/lexicons";
  std::string gazetteer_dir = "data/gazetteers";
  std::string verbs = "data/verbs_base.txt";
  std::string irregular_verbs = "data/verbs_irregular.csv";
  std::string annotations;
  std::string quotes;
  std::string temporal_train;
  std::string lda_model = "lda_model.json";
  std::string temporal_model = "temporal_model.json";

  std::vector<std::string> lexicon_files() const {
    return {lexicon_dir + "/stocks.csv", lexicon_dir + "/tickers.csv",
            lexicon_dir + "/currencies.csv", lexicon_dir + "/finabbrev.csv"};
  }
};

struct PipelineConfig {
  PipelinePaths paths;
  TextTilingConfig texttiling;
  ResolverConfig resolver;
  LdaConfig lda;
  TextualFeatureConfig textual;
  ClassifierConfig classifier;
  std::size_t cv_folds = 10;
  std::uint64_t seed = 1;

  void validate() const {
    texttiling.validate();
    resolver.validate();
    lda.validate();
    textual.validate();
    classifier.validate();
  }

  static PipelineConfig from_toml(const TomlTable& t) {
    PipelineConfig c;
    auto str = [&](const char* key, std::string& field) {
      if (auto v = t.get_string(key)) field = *v;
    };
    auto num = [&](const char* key, auto& field) {
      if (auto v = t.get_number(key)) field = static_cast<std::decay_t<decltype(field)>>(*v);
    };
    str("paths.corpus", c.paths.corpus);
    str("paths.lda_train_corpus", c.paths.lda_train_corpus);
    str("paths.stopwords", c.paths.stopwords);
    str("paths.abbreviations", c.paths.abbreviations);
    str("paths.lexicon_dir", c.paths.lexicon_dir);
    str("paths.gazetteer_dir", c.paths.gazetteer_dir);
    str("paths.verbs", c.paths.verbs);
    str("paths.irregular_verbs", c.paths.irregular_verbs);
    str("paths.annotations", c.paths.annotations);
    str("paths.quotes", c.paths.quotes);
    str("paths.temporal_train", c.paths.temporal_train);
    str("paths.lda_model", c.paths.lda_model);
    str("paths.temporal_model", c.paths.temporal_model);

    num("texttiling.w", c.texttiling.w);
    num("texttiling.k", c.texttiling.k);
    num("texttiling.smoothing_width", c.texttiling.smoothing_width);
    num("texttiling.smoothing_rounds", c.texttiling.smoothing_rounds);
    num("texttiling.min_chars", c.texttiling.min_chars);

    if (auto v = t.get_string_array("resolver.pronouns")) {
      c.resolver.pronouns.clear();
      for (const auto& p : *v) c.resolver.pronouns.insert(to_lower(p));
    }
    if (auto v = t.get_string_array("resolver.alias_nouns")) c.resolver.alias_nouns = *v;

    num("lda.passes", c.lda.passes);
    num("lda.seed", c.lda.seed);
    num("lda.foldin_sweeps", c.lda.foldin_sweeps);
    num("lda.delta", c.lda.delta);
    if (auto v = t.get_string("lda.alpha")) c.lda.alpha = PriorSpec::parse(*v);
    if (auto v = t.get_string("lda.beta")) c.lda.beta = PriorSpec::parse(*v);

    num("temporal.mindf", c.textual.mindf);
    num("temporal.maxdf", c.textual.maxdf);
    num("temporal.ngram_min", c.textual.ngram_min);
    num("temporal.ngram_max", c.textual.ngram_max);
    num("temporal.max_features", c.textual.max_features);
    num("temporal.c", c.classifier.C);
    num("temporal.max_iter", c.classifier.max_iter);
    num("temporal.tol", c.classifier.tol);
    num("temporal.chi2_percentile", c.classifier.chi2_percentile);
    if (auto v = t.get_bool("temporal.balanced")) c.classifier.balanced = *v;
    num("temporal.folds", c.cv_folds);

    num("seed", c.seed);
    c.lda.seed = t.get_number("lda.seed") ? c.lda.seed : c.seed;
    c.classifier.seed = c.seed;
    c.validate();
    return c;
  }

  static PipelineConfig load(const std::string& path) {
    return from_toml(TomlTable::parse_file(path));
  }
};

}  // namespace finnews
