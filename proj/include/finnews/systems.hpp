#pragma once

// Builders for the three comparable systems: the proposed LDA pipeline, the
// rule-based baseline and the supervised extraction baseline. Each produces
// a SystemExtraction for the evaluation report.

#include <map>
#include <string>
#include <vector>

#include "finnews/baseline.hpp"
#include "finnews/eval.hpp"
#include "finnews/pipeline.hpp"

namespace finnews {

inline SystemExtraction extraction_from_results(const std::vector<DetectionResult>& results) {
  SystemExtraction out;
  for (const DetectionResult& r : results) {
    std::string rel, pred;
    for (const ResultSpan& s : r.relevant_spans) {
      if (!rel.empty()) rel += ' ';
      rel += s.text;
    }
    for (const ResultSpan& s : r.prediction_spans) {
      if (!pred.empty()) pred += ' ';
      pred += s.text;
    }
    out.relevant_by_item[r.news_id] = std::move(rel);
    out.prediction_by_item[r.news_id] = std::move(pred);
  }
  return out;
}

struct BaselineDocument {
  std::vector<Sentence> sentences;
  std::vector<TaggedSentence> tagged;
  std::vector<BaselineVerdict> verdicts;
};

// The rule baseline works sentence by sentence over the plain tagged text;
// no TextTiling and no co-reference resolution.
inline BaselineDocument run_rule_baseline(const NewsItem& item, const PipelineResources& res) {
  BaselineDocument doc;
  doc.sentences = split_sentences(item.body, res.abbrevs);
  for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
    TaggedSentence ts = tag_sentence(doc.sentences[i].text, res.lexicon, res.gazetteers);
    ts.news_id = item.id;
    ts.sentence_index = i;
    BaselineVerdict v;
    v.sentence_index = i;
    v.relevant = rule_relevant(ts);
    v.predictive = rule_predictive(ts, res.verbs);
    doc.tagged.push_back(std::move(ts));
    doc.verdicts.push_back(v);
  }
  return doc;
}

inline SystemExtraction rule_baseline_extraction(const std::vector<NewsItem>& corpus,
                                                 const PipelineResources& res) {
  SystemExtraction out;
  for (const NewsItem& item : corpus) {
    BaselineDocument doc = run_rule_baseline(item, res);
    std::string rel, pred;
    for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
      std::string_view text = trim(doc.sentences[i].text);
      if (doc.verdicts[i].relevant) {
        if (!rel.empty()) rel += ' ';
        rel += text;
      }
      if (doc.verdicts[i].predictive) {
        if (!pred.empty()) pred += ' ';
        pred += text;
      }
    }
    out.relevant_by_item[item.id] = std::move(rel);
    out.prediction_by_item[item.id] = std::move(pred);
  }
  return out;
}

struct SupervisedSystem {
  SupervisedExtractor relevant_model;
  SupervisedExtractor prediction_model;
};

// Pools the annotators per sentence: positive when a strict majority of the
// annotators covering that item mark it (via the 50%-span projection).
inline SupervisedSystem train_supervised_system(const std::vector<NewsItem>& corpus,
                                                const std::vector<AnnotationSet>& annotations,
                                                const PipelineResources& res,
                                                const TextualFeatureConfig& text_cfg,
                                                const ClassifierConfig& clf_cfg) {
  std::map<std::string, std::vector<const AnnotationSet*>> by_item;
  for (const AnnotationSet& a : annotations) by_item[a.news_id].push_back(&a);

  std::vector<std::string> texts;
  std::vector<bool> rel_labels, pred_labels;
  for (const NewsItem& item : corpus) {
    auto it = by_item.find(item.id);
    if (it == by_item.end()) continue;
    for (const Sentence& s : split_sentences(item.body, res.abbrevs)) {
      std::size_t rel_votes = 0, pred_votes = 0;
      for (const AnnotationSet* a : it->second) {
        if (sentence_covered(s, a->spans, SpanLabel::Relevant)) ++rel_votes;
        if (sentence_covered(s, a->spans, SpanLabel::Prediction)) ++pred_votes;
      }
      texts.emplace_back(trim(s.text));
      rel_labels.push_back(rel_votes * 2 > it->second.size());
      pred_labels.push_back(pred_votes * 2 > it->second.size());
    }
  }
  SupervisedSystem sys;
  sys.relevant_model = train_supervised_extractor(texts, rel_labels, text_cfg, clf_cfg);
  sys.prediction_model = train_supervised_extractor(texts, pred_labels, text_cfg, clf_cfg);
  return sys;
}

inline SystemExtraction supervised_extraction(const SupervisedSystem& sys,
                                              const std::vector<NewsItem>& corpus,
                                              const PipelineResources& res) {
  SystemExtraction out;
  for (const NewsItem& item : corpus) {
    std::string rel, pred;
    for (const Sentence& s : split_sentences(item.body, res.abbrevs)) {
      std::string text(trim(s.text));
      if (supervised_classify(sys.relevant_model, text)) {
        if (!rel.empty()) rel += ' ';
        rel += text;
      }
      if (supervised_classify(sys.prediction_model, text)) {
        if (!pred.empty()) pred += ' ';
        pred += text;
      }
    }
    out.relevant_by_item[item.id] = std::move(rel);
    out.prediction_by_item[item.id] = std::move(pred);
  }
  return out;
}

}  // namespace finnews
