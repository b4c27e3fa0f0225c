#pragma once

// End-to-end temporal classifier over segments: feature assembly (temporal +
// textual + numerical), chi-squared selection, one-vs-rest linear training,
// the cross-validation harness and model serialization.

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "finnews/corpus.hpp"
#include "finnews/tagger.hpp"
#include "finnews/temporal.hpp"

namespace finnews {

// A classification unit: the pre-tag text plus its tagged sentences.
struct TemporalUnit {
  std::string raw_text;
  std::vector<AnalyzedSentence> sentences;
};

inline TemporalUnit make_temporal_unit(std::string_view text, const Lexicon& lexicon,
                                       const Gazetteers& gazetteers,
                                       const AbbrevGuard& guard = default_abbrev_guard()) {
  TemporalUnit u;
  u.raw_text = std::string(text);
  for (const Sentence& s : split_sentences(text, guard))
    u.sentences.push_back(analyze_tokens(tag_sentence(s.text, lexicon, gazetteers)));
  return u;
}

inline TemporalFeatureVector temporal_features(const TemporalUnit& unit,
                                               const VerbLexicon& verbs) {
  TemporalFeatureVector f;
  dependency_features(unit.sentences, verbs, f);
  proximity_features(unit.sentences, verbs, f);
  auto [nums, pcts] = numerical_features(unit.raw_text);
  f.num_count = nums;
  f.pct_count = pcts;
  return f;
}

// 26 base dimensions: four (Pst,Prs,Fut) count triples each followed by the
// one-hot Global vote, then the two numerical counts.
inline std::vector<double> encode_temporal_features(const TemporalFeatureVector& f) {
  std::vector<double> out;
  out.reserve(26);
  for (int analysis = 0; analysis < 2; ++analysis)
    for (int role = 0; role < 2; ++role) {
      for (int t = 0; t < 3; ++t) out.push_back(f.counts[analysis][role][t]);
      for (int t = 0; t < 3; ++t)
        out.push_back(f.global[analysis][role] == static_cast<TenseTag>(t) ? 1.0 : 0.0);
    }
  out.push_back(f.num_count);
  out.push_back(f.pct_count);
  return out;
}

inline const std::vector<std::string>& temporal_feature_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    const char* tenses[] = {"Pst", "Prs", "Fut"};
    const char* blocks[] = {"DepSub", "DepSubObj", "ProxSub", "ProxSubObj"};
    for (const char* blk : blocks) {
      for (const char* t : tenses) v.push_back(std::string(t) + blk);
      for (const char* t : {"Past", "Present", "Future"})
        v.push_back(std::string("Global") + blk + "=" + t);
    }
    v.push_back("num_count");
    v.push_back("pct_count");
    return v;
  }();
  return names;
}

struct TemporalModel {
  TextualVocabulary vocabulary;
  std::vector<std::size_t> selected;  // indices into [temporal..., textual...]
  LinearModel linear;
  TextualFeatureConfig text_config;
  ClassifierConfig clf_config;
};

namespace detail {

inline std::vector<double> combined_features(const TemporalUnit& unit,
                                             const VerbLexicon& verbs,
                                             const TextualVocabulary& vocab) {
  std::vector<double> x = encode_temporal_features(temporal_features(unit, verbs));
  std::vector<double> tx = vocab.transform(unit.raw_text);
  x.insert(x.end(), tx.begin(), tx.end());
  return x;
}

inline std::vector<double> project(const std::vector<double>& x,
                                   const std::vector<std::size_t>& selected) {
  std::vector<double> out;
  out.reserve(selected.size());
  for (std::size_t f : selected) out.push_back(x[f]);
  return out;
}

}  // namespace detail

inline TemporalModel train_temporal_model(const std::vector<TemporalUnit>& units,
                                          const std::vector<TenseTag>& labels,
                                          const VerbLexicon& verbs,
                                          const TextualFeatureConfig& text_cfg,
                                          const ClassifierConfig& clf_cfg) {
  if (units.size() != labels.size() || units.empty())
    throw Error("temporal training: shape mismatch");
  TemporalModel m;
  m.text_config = text_cfg;
  m.clf_config = clf_cfg;
  std::vector<std::string> texts;
  for (const auto& u : units) texts.push_back(u.raw_text);
  m.vocabulary = TextualVocabulary::fit(texts, text_cfg);

  std::vector<std::vector<double>> X;
  std::vector<int> y;
  for (std::size_t i = 0; i < units.size(); ++i) {
    X.push_back(detail::combined_features(units[i], verbs, m.vocabulary));
    y.push_back(static_cast<int>(labels[i]));
  }
  m.selected = chi2_select(X, y, clf_cfg.chi2_percentile);
  if (m.selected.empty()) throw DataError("temporal training: selection kept no features");
  std::vector<std::vector<double>> Xs;
  for (const auto& x : X) Xs.push_back(detail::project(x, m.selected));
  m.linear = train_classifier(Xs, y, clf_cfg);
  return m;
}

inline TenseTag predict_temporality(const TemporalModel& m, const TemporalUnit& unit,
                                    const VerbLexicon& verbs) {
  std::vector<double> x = detail::combined_features(unit, verbs, m.vocabulary);
  return static_cast<TenseTag>(predict_class(m.linear, detail::project(x, m.selected)));
}

// --- cross-validation harness -------------------------------------------------

struct FoldMetrics {
  std::size_t fold = 0;
  double precision = 0;  // macro-averaged over classes present in the fold
  double recall = 0;
  std::size_t test_size = 0;
};

inline std::vector<FoldMetrics> cross_validate_temporal(
    const std::vector<TemporalUnit>& units, const std::vector<TenseTag>& labels,
    const VerbLexicon& verbs, const TextualFeatureConfig& text_cfg,
    const ClassifierConfig& clf_cfg, std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
  std::vector<std::size_t> order(units.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[rng() % i]);

  std::vector<FoldMetrics> out;
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<TemporalUnit> train_u, test_u;
    std::vector<TenseTag> train_y, test_y;
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (i % folds == f) {
        test_u.push_back(units[order[i]]);
        test_y.push_back(labels[order[i]]);
      } else {
        train_u.push_back(units[order[i]]);
        train_y.push_back(labels[order[i]]);
      }
    }
    FoldMetrics fm;
    fm.fold = f;
    fm.test_size = test_u.size();
    if (test_u.empty()) {
      out.push_back(fm);
      continue;
    }
    TemporalModel m = train_temporal_model(train_u, train_y, verbs, text_cfg, clf_cfg);
    std::map<int, double> tp, fp, fn;
    for (std::size_t i = 0; i < test_u.size(); ++i) {
      int want = static_cast<int>(test_y[i]);
      int got = static_cast<int>(predict_temporality(m, test_u[i], verbs));
      if (want == got) tp[want] += 1;
      else {
        fp[got] += 1;
        fn[want] += 1;
      }
    }
    std::set<int> present;
    for (const auto& t : test_y) present.insert(static_cast<int>(t));
    double psum = 0, rsum = 0;
    for (int c : present) {
      double denom_p = tp[c] + fp[c];
      double denom_r = tp[c] + fn[c];
      psum += denom_p > 0 ? tp[c] / denom_p : 0;
      rsum += denom_r > 0 ? tp[c] / denom_r : 0;
    }
    fm.precision = psum / static_cast<double>(present.size());
    fm.recall = rsum / static_cast<double>(present.size());
    out.push_back(fm);
  }
  return out;
}

// --- serialization ------------------------------------------------------------

inline nlohmann::ordered_json temporal_model_to_json(const TemporalModel& m) {
  nlohmann::ordered_json j;
  j["format"] = "finnews-temporal";
  j["version"] = 1;
  j["text_config"] = {{"mindf", m.text_config.mindf},
                      {"maxdf", m.text_config.maxdf},
                      {"ngram_min", m.text_config.ngram_min},
                      {"ngram_max", m.text_config.ngram_max},
                      {"max_features", m.text_config.max_features}};
  j["clf_config"] = {{"C", m.clf_config.C},
                     {"max_iter", m.clf_config.max_iter},
                     {"tol", m.clf_config.tol},
                     {"chi2_percentile", m.clf_config.chi2_percentile},
                     {"balanced", m.clf_config.balanced},
                     {"seed", m.clf_config.seed}};
  j["textual_features"] = m.vocabulary.features;
  j["selected"] = m.selected;
  j["classes"] = m.linear.classes;
  j["weights"] = m.linear.weights;
  j["bias"] = m.linear.bias;
  return j;
}

inline void save_temporal_model(const TemporalModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write temporal model: " + path);
  out << temporal_model_to_json(m).dump(2) << "\n";
}

inline TemporalModel load_temporal_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open temporal model: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": malformed model file: " + std::string(e.what()));
  }
  if (j.value("format", "") != "finnews-temporal")
    throw DataError(path + ": not a finnews temporal model file");
  TemporalModel m;
  const auto& jt = j.at("text_config");
  m.text_config.mindf = jt.at("mindf").get<double>();
  m.text_config.maxdf = jt.at("maxdf").get<double>();
  m.text_config.ngram_min = jt.at("ngram_min").get<std::size_t>();
  m.text_config.ngram_max = jt.at("ngram_max").get<std::size_t>();
  m.text_config.max_features = jt.at("max_features").get<std::size_t>();
  const auto& jcfg = j.at("clf_config");
  m.clf_config.C = jcfg.at("C").get<double>();
  m.clf_config.max_iter = jcfg.at("max_iter").get<std::size_t>();
  m.clf_config.tol = jcfg.at("tol").get<double>();
  m.clf_config.chi2_percentile = jcfg.at("chi2_percentile").get<double>();
  m.clf_config.balanced = jcfg.at("balanced").get<bool>();
  m.clf_config.seed = jcfg.at("seed").get<std::uint64_t>();
  m.vocabulary = TextualVocabulary::restore(
      j.at("textual_features").get<std::vector<std::string>>(), m.text_config);
  m.selected = j.at("selected").get<std::vector<std::size_t>>();
  m.linear.classes = j.at("classes").get<std::vector<int>>();
  m.linear.weights = j.at("weights").get<std::vector<std::vector<double>>>();
  m.linear.bias = j.at("bias").get<std::vector<double>>();
  m.linear.config = m.clf_config;
  return m;
}

}  // namespace finnews
