#pragma once

// Comparison systems: the rule-based relevance/prediction baseline and the
// supervised extraction classifier trained from span annotations.

#include <string>
#include <vector>

#include "finnews/corpus.hpp"
#include "finnews/tagger.hpp"
#include "finnews/temporal.hpp"

namespace finnews {

struct BaselineVerdict {
  std::size_t sentence_index = 0;
  bool relevant = false;
  bool predictive = false;  // evaluated independently of relevance
};

// Relevant iff the sentence carries at least one financial tag (STOCK,
// TICKER, TICKER_ABR, CURRENCY or FIN_ABR) and at least one NUM tag.
// Depends only on the tag multiset.
inline bool rule_relevant(const TaggedSentence& s) {
  bool fin = false, num = false;
  for (const auto& t : s.tokens) {
    if (!t.category) continue;
    switch (*t.category) {
      case TagCategory::STOCK:
      case TagCategory::TICKER:
      case TagCategory::TICKER_ABR:
      case TagCategory::CURRENCY:
      case TagCategory::FIN_ABR:
        fin = true;
        break;
      case TagCategory::NUM:
        num = true;
        break;
      default:
        break;
    }
  }
  return fin && num;
}

// Predictive iff the main verb is future tense; the main verb is the first
// finite verb group of the sentence's first clause.
inline bool rule_predictive(const TaggedSentence& s, const VerbLexicon& verbs) {
  AnalyzedSentence a = analyze_tokens(s);
  const std::vector<Clause> clauses = clause_split(a.tokens, verbs, a.spans, a.text);
  if (clauses.empty()) return false;
  const Clause& main = clauses.front();
  for (const VerbGroup& g : find_verb_groups(a.tokens, verbs)) {
    if (!g.finite || g.first < main.first || g.last > main.last) continue;
    return detect_tense(g.tokens, verbs) == TenseTag::Future;
  }
  return false;
}

// Span -> sentence label projection shared with the evaluation module: a
// sentence is positive iff more than half of its characters lie inside a
// span with the given label.
inline bool sentence_covered(const Sentence& s, const std::vector<Span>& spans,
                             SpanLabel label) {
  std::size_t covered = 0;
  for (const Span& sp : spans) {
    if (sp.label != label) continue;
    std::size_t b = std::max(s.start, sp.start);
    std::size_t e = std::min(s.end, sp.end);
    if (b < e) covered += e - b;
  }
  return covered * 2 > (s.end - s.start);
}

// Binary supervised extraction model over textual features only.
struct SupervisedExtractor {
  TextualVocabulary vocabulary;
  std::vector<std::size_t> selected;
  LinearModel linear;
};

// Trains the extractor from projected sentence labels. `positive` marks the
// sentences covered by the target span label.
inline SupervisedExtractor train_supervised_extractor(
    const std::vector<std::string>& sentence_texts, const std::vector<bool>& positive,
    const TextualFeatureConfig& text_cfg, const ClassifierConfig& clf_cfg) {
  if (sentence_texts.size() != positive.size() || sentence_texts.empty())
    throw Error("supervised extractor: shape mismatch");
  SupervisedExtractor m;
  m.vocabulary = TextualVocabulary::fit(sentence_texts, text_cfg);
  std::vector<std::vector<double>> X;
  std::vector<int> y;
  for (std::size_t i = 0; i < sentence_texts.size(); ++i) {
    X.push_back(m.vocabulary.transform(sentence_texts[i]));
    y.push_back(positive[i] ? 1 : 0);
  }
  m.selected = chi2_select(X, y, clf_cfg.chi2_percentile);
  if (m.selected.empty()) throw DataError("supervised extractor: selection kept no features");
  std::vector<std::vector<double>> Xs;
  for (const auto& x : X) {
    std::vector<double> row;
    row.reserve(m.selected.size());
    for (std::size_t f : m.selected) row.push_back(x[f]);
    Xs.push_back(std::move(row));
  }
  m.linear = train_classifier(Xs, y, clf_cfg);
  return m;
}

inline bool supervised_classify(const SupervisedExtractor& m, const std::string& sentence) {
  std::vector<double> x = m.vocabulary.transform(sentence);
  std::vector<double> xs;
  xs.reserve(m.selected.size());
  for (std::size_t f : m.selected) xs.push_back(x[f]);
  return predict_class(m.linear, xs) == 1;
}

}  // namespace finnews
