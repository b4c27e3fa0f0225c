#pragma once

// End-to-end orchestration: segment -> co-reference -> tag -> LDA relevance
// -> temporal classification, plus the results.json schema, the offline
// quote provider and the highlighted HTML report.

#include <atomic>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "finnews/baseline.hpp"
#include "finnews/config.hpp"
#include "finnews/corpus.hpp"
#include "finnews/eval.hpp"
#include "finnews/resolver.hpp"
#include "finnews/segmenter.hpp"
#include "finnews/tagger.hpp"
#include "finnews/temporal_model.hpp"
#include "finnews/topic_model.hpp"

namespace finnews {

// Everything loaded from the data directory once and shared read-only.
struct PipelineResources {
  Lexicon lexicon;
  Gazetteers gazetteers;
  std::unordered_set<std::string> stopwords;
  AbbrevGuard abbrevs;
  VerbLexicon verbs;

  static PipelineResources load(const PipelinePaths& paths) {
    PipelineResources r;
    r.lexicon = load_lexicon(paths.lexicon_files());
    r.gazetteers = Gazetteers::load_dir(paths.gazetteer_dir);
    r.stopwords = load_stopwords(paths.stopwords);
    r.abbrevs = load_abbrev_guard(paths.abbreviations);
    r.verbs = VerbLexicon::load(paths.verbs, paths.irregular_verbs);
    return r;
  }
};

// One document after the conditioning stages (segmented, resolved, tagged).
struct PreparedDocument {
  const NewsItem* item = nullptr;
  std::vector<Sentence> sentences;
  std::vector<Segment> segments;
  std::vector<std::vector<TaggedSentence>> tagged;   // per segment
  std::vector<std::vector<LexMatch>> asset_mentions; // per segment, absolute offsets
  std::vector<std::string> resolved_segment_text;    // pre-tag, post-resolve
};

inline PreparedDocument prepare_document(const NewsItem& item,
                                         const PipelineResources& res,
                                         const PipelineConfig& cfg) {
  PreparedDocument doc;
  doc.item = &item;
  doc.sentences = split_sentences(item.body, res.abbrevs);
  doc.segments = segment(item, doc.sentences, res.stopwords, cfg.texttiling);
  for (const Segment& seg : doc.segments) {
    const std::size_t seg_start =
        doc.sentences.empty() ? 0 : doc.sentences[seg.first_sentence].start;
    const MentionTable mentions = detect_mentions(seg.text, res.lexicon);

    std::vector<LexMatch> absolute;
    for (const Mention& m : mentions)
      absolute.push_back(LexMatch{m.position + seg_start, m.end + seg_start,
                                  m.surface, m.canonical, m.category});
    doc.asset_mentions.push_back(std::move(absolute));

    std::vector<TaggedSentence> tagged;
    std::string resolved_text;
    for (std::size_t s = seg.first_sentence; s < seg.end_sentence; ++s) {
      const Sentence& sent = doc.sentences[s];
      const std::string resolved =
          resolve(sent.text, mentions, cfg.resolver, sent.start - seg_start);
      resolved_text += resolved;
      TaggedSentence ts = tag_sentence(resolved, res.lexicon, res.gazetteers);
      ts.news_id = item.id;
      ts.segment_index = seg.index;
      ts.sentence_index = s;
      tagged.push_back(std::move(ts));
    }
    doc.tagged.push_back(std::move(tagged));
    doc.resolved_segment_text.push_back(std::move(resolved_text));
  }
  return doc;
}

// LDA token stream for one tagged sentence: tag tokens stay verbatim, other
// tokens are lowercased, stop-words drop out.
inline std::vector<std::string> lda_tokens(const TaggedSentence& ts,
                                           const std::unordered_set<std::string>& stopwords) {
  std::vector<std::string> out;
  for (const TaggedToken& t : ts.tokens) {
    if (t.category) {
      out.push_back(t.surface);
      continue;
    }
    std::string low = to_lower(t.surface);
    if (stopwords.count(low) == 0) out.push_back(std::move(low));
  }
  return out;
}

inline std::vector<std::string> segment_lda_tokens(
    const std::vector<TaggedSentence>& tagged,
    const std::unordered_set<std::string>& stopwords) {
  std::vector<std::string> out;
  for (const TaggedSentence& ts : tagged) {
    std::vector<std::string> toks = lda_tokens(ts, stopwords);
    out.insert(out.end(), toks.begin(), toks.end());
  }
  return out;
}

struct ResultSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string text;  // exact body slice
};

struct DetectionResult {
  std::string news_id;
  std::vector<ResultSpan> relevant_spans;
  std::vector<ResultSpan> asset_spans;
  std::vector<ResultSpan> prediction_spans;  // subset of relevant_spans
  std::vector<std::string> segment_temporality;  // per segment, "Past"/...
  double relevant_segment_proportion = 0;
  std::size_t prediction_count = 0;
};

namespace detail {

// Sentence span with the trailing separator trimmed, so the reported text
// round-trips against the body.
inline ResultSpan sentence_span(const NewsItem& item, const Sentence& s) {
  std::size_t e = s.end;
  while (e > s.start && item.body[e - 1] == ' ') --e;
  return ResultSpan{s.start, e, item.body.substr(s.start, e - s.start)};
}

template <typename Fn>
inline void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < workers; ++t)
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  for (auto& th : pool) th.join();
}

}  // namespace detail

// Relevance + temporality detection for one prepared document against
// trained models. Pure given its inputs; documents may run in parallel.
inline DetectionResult detect_document(const PreparedDocument& doc,
                                       const PipelineResources& res,
                                       const PipelineConfig& cfg, const LdaModel& lda,
                                       const TopicRelevance& relevance,
                                       const TemporalModel& temporal) {
  DetectionResult out;
  out.news_id = doc.item->id;
  std::size_t relevant_segments = 0;

  for (std::size_t g = 0; g < doc.segments.size(); ++g) {
    const std::vector<TaggedSentence>& tagged = doc.tagged[g];

    std::vector<SentenceScore> scores;
    for (const TaggedSentence& ts : tagged)
      scores.push_back(score_sentence(lda, lda_tokens(ts, res.stopwords)));
    const std::vector<RelevanceDecision> decisions =
        detect_relevant(scores, relevance.relevant_topic, cfg.lda.delta);

    TemporalUnit unit;
    unit.raw_text = doc.resolved_segment_text[g];
    for (const TaggedSentence& ts : tagged) unit.sentences.push_back(analyze_tokens(ts));
    const TenseTag seg_tense = predict_temporality(temporal, unit, res.verbs);
    out.segment_temporality.push_back(to_string(seg_tense));

    bool any_relevant = false;
    for (std::size_t i = 0; i < decisions.size(); ++i) {
      if (!decisions[i].is_relevant) continue;
      any_relevant = true;
      const Sentence& sent = doc.sentences[tagged[i].sentence_index];
      ResultSpan span = detail::sentence_span(*doc.item, sent);
      out.relevant_spans.push_back(span);
      if (seg_tense == TenseTag::Future) out.prediction_spans.push_back(span);
    }
    if (any_relevant) ++relevant_segments;
  }

  for (const auto& per_segment : doc.asset_mentions)
    for (const LexMatch& m : per_segment) {
      if (m.category != LexCategory::Ticker && m.category != LexCategory::TickerAbbrev)
        continue;
      out.asset_spans.push_back(
          ResultSpan{m.begin, m.end, doc.item->body.substr(m.begin, m.end - m.begin)});
    }

  out.relevant_segment_proportion =
      doc.segments.empty()
          ? 0
          : static_cast<double>(relevant_segments) / static_cast<double>(doc.segments.size());
  out.prediction_count = out.prediction_spans.size();
  return out;
}

struct TrainedModels {
  LdaModel lda;
  TopicRelevance relevance;
  TemporalModel temporal;
};

inline std::vector<std::pair<std::string, TenseTag>> load_temporal_training(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open temporal training data: " + path);
  std::vector<std::pair<std::string, TenseTag>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path + ":" + std::to_string(lineno) + ": malformed JSON line: " + e.what());
    }
    out.emplace_back(j.at("text").get<std::string>(),
                     tense_from_string(j.at("label").get<std::string>()));
  }
  if (out.empty()) throw DataError(path + ": no training units");
  return out;
}

// Trains the LDA model over every segment of the training corpus (the
// detection corpus when paths.lda_train_corpus is unset) and the temporal
// classifier over the bundled labeled units.
inline TrainedModels train_models(const PipelineResources& res, const PipelineConfig& cfg) {
  TrainedModels out;
  const std::string train_path =
      cfg.paths.lda_train_corpus.empty() ? cfg.paths.corpus : cfg.paths.lda_train_corpus;
  const std::vector<NewsItem> train_corpus = load_corpus(train_path);
  std::vector<PreparedDocument> docs(train_corpus.size());
  detail::parallel_for(train_corpus.size(), [&](std::size_t i) {
    docs[i] = prepare_document(train_corpus[i], res, cfg);
  });
  std::vector<std::vector<std::string>> seg_tokens;
  for (const PreparedDocument& d : docs)
    for (const auto& tagged : d.tagged)
      seg_tokens.push_back(segment_lda_tokens(tagged, res.stopwords));
  out.lda = train_lda(seg_tokens, cfg.lda);
  out.relevance = compute_rho(out.lda);

  if (cfg.paths.temporal_train.empty())
    throw ConfigError("paths.temporal_train must point at labeled units to train");
  std::vector<TemporalUnit> units;
  std::vector<TenseTag> labels;
  for (const auto& [text, label] : load_temporal_training(cfg.paths.temporal_train)) {
    units.push_back(make_temporal_unit(normalize_text(text), res.lexicon, res.gazetteers,
                                       res.abbrevs));
    labels.push_back(label);
  }
  out.temporal = train_temporal_model(units, labels, res.verbs, cfg.textual, cfg.classifier);
  return out;
}

inline std::vector<DetectionResult> run_pipeline(const std::vector<NewsItem>& corpus,
                                                 const PipelineResources& res,
                                                 const PipelineConfig& cfg,
                                                 const TrainedModels& models) {
  if (corpus.empty()) throw DataError("empty corpus");
  std::vector<PreparedDocument> docs(corpus.size());
  detail::parallel_for(corpus.size(),
                       [&](std::size_t i) { docs[i] = prepare_document(corpus[i], res, cfg); });
  std::vector<DetectionResult> results(corpus.size());
  detail::parallel_for(corpus.size(), [&](std::size_t i) {
    results[i] = detect_document(docs[i], res, cfg, models.lda, models.relevance, models.temporal);
  });
  return results;
}

// --- results.json ---------------------------------------------------------------

inline nlohmann::ordered_json result_span_to_json(const ResultSpan& s) {
  return {{"start", s.start}, {"end", s.end}, {"text", s.text}};
}

inline nlohmann::ordered_json results_to_json(const std::vector<DetectionResult>& results) {
  nlohmann::ordered_json j;
  j["format"] = "finnews-results";
  j["version"] = 1;
  auto arr = nlohmann::ordered_json::array();
  for (const DetectionResult& r : results) {
    nlohmann::ordered_json jr;
    jr["news_id"] = r.news_id;
    auto spans = [&](const std::vector<ResultSpan>& v) {
      auto a = nlohmann::ordered_json::array();
      for (const ResultSpan& s : v) a.push_back(result_span_to_json(s));
      return a;
    };
    jr["relevant_spans"] = spans(r.relevant_spans);
    jr["asset_spans"] = spans(r.asset_spans);
    jr["prediction_spans"] = spans(r.prediction_spans);
    jr["segment_temporality"] = r.segment_temporality;
    jr["relevant_segment_proportion"] = r.relevant_segment_proportion;
    jr["prediction_count"] = r.prediction_count;
    arr.push_back(std::move(jr));
  }
  j["results"] = std::move(arr);
  return j;
}

inline void save_results(const std::vector<DetectionResult>& results, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write results: " + path);
  out << results_to_json(results).dump(2) << "\n";
}

inline std::vector<DetectionResult> load_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open results: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": malformed results file: " + std::string(e.what()));
  }
  if (j.value("format", "") != "finnews-results")
    throw DataError(path + ": not a finnews results file");
  std::vector<DetectionResult> out;
  for (const auto& jr : j.at("results")) {
    DetectionResult r;
    r.news_id = jr.at("news_id").get<std::string>();
    auto spans = [&](const char* key) {
      std::vector<ResultSpan> v;
      for (const auto& s : jr.at(key))
        v.push_back(ResultSpan{s.at("start").get<std::size_t>(), s.at("end").get<std::size_t>(),
                               s.at("text").get<std::string>()});
      return v;
    };
    r.relevant_spans = spans("relevant_spans");
    r.asset_spans = spans("asset_spans");
    r.prediction_spans = spans("prediction_spans");
    r.segment_temporality = jr.at("segment_temporality").get<std::vector<std::string>>();
    r.relevant_segment_proportion = jr.at("relevant_segment_proportion").get<double>();
    r.prediction_count = jr.at("prediction_count").get<std::size_t>();
    out.push_back(std::move(r));
  }
  return out;
}

// --- offline quotes --------------------------------------------------------------

struct Quote {
  double price = 0;
  std::string currency;
  std::string asof;
};

class QuoteProvider {
 public:
  QuoteProvider() = default;

  static QuoteProvider load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open quotes file: " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path + ": malformed quotes file: " + std::string(e.what()));
    }
    QuoteProvider q;
    if (!j.is_object()) throw DataError(path + ": quotes file must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!it.value().is_object() || !it.value().contains("price"))
        throw DataError(path + ": malformed quote record for \"" + it.key() + "\"");
      Quote quote;
      quote.price = it.value().at("price").get<double>();
      quote.currency = it.value().value("currency", "USD");
      quote.asof = it.value().value("asof", "");
      q.quotes_[it.key()] = std::move(quote);
    }
    return q;
  }

  std::optional<Quote> get(const std::string& asset_id) const {
    auto it = quotes_.find(asset_id);
    if (it == quotes_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::map<std::string, Quote> quotes_;
};

// --- HTML report ------------------------------------------------------------------

namespace detail {

inline std::string html_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace detail

// Renders the detection results over the original bodies: relevant text in
// blue, asset identifiers in pink, predictions/forecasts in green, plus a
// per-item dashboard with the relevant-segment proportion, the prediction
// count and (when available) the asset quote.
inline std::string render_html(const std::vector<DetectionResult>& results,
                               const std::vector<NewsItem>& corpus,
                               const QuoteProvider* quotes = nullptr,
                               const std::map<std::string, std::string>* primary_asset = nullptr) {
  std::map<std::string, const NewsItem*> items;
  for (const NewsItem& it : corpus) items[it.id] = &it;

  std::ostringstream os;
  os << "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n"
     << "<title>Financial event detection</title>\n<style>\n"
     << "body { font-family: sans-serif; max-width: 60em; margin: 2em auto; }\n"
     << ".rel { background: #cfe2ff; }\n"
     << ".asset { background: #f7c6e0; }\n"
     << ".pred { background: #c9f2cf; }\n"
     << ".dashboard { border: 1px solid #999; padding: 0.6em; margin: 1em 0 2em; }\n"
     << "</style>\n</head>\n<body>\n<h1>Financial event detection</h1>\n";

  for (const DetectionResult& r : results) {
    auto item_it = items.find(r.news_id);
    if (item_it == items.end())
      throw DataError("results reference unknown news id \"" + r.news_id + "\"");
    const NewsItem& item = *item_it->second;
    const std::string& body = item.body;

    // per-char style sets; predictions nest inside relevant spans
    std::vector<unsigned> mask(body.size(), 0);
    auto paint = [&](const std::vector<ResultSpan>& spans, unsigned bit) {
      for (const ResultSpan& s : spans) {
        if (s.end > body.size() || s.start > s.end)
          throw DataError("span outside body in results for \"" + r.news_id + "\"");
        for (std::size_t i = s.start; i < s.end; ++i) mask[i] |= bit;
      }
    };
    paint(r.relevant_spans, 1u);
    paint(r.asset_spans, 2u);
    paint(r.prediction_spans, 4u);

    os << "<h2>" << detail::html_escape(item.title) << "</h2>\n";
    os << "<p class=\"meta\">" << detail::html_escape(item.source) << " — "
       << detail::html_escape(item.author) << " — " << detail::html_escape(item.published)
       << "</p>\n<p>";
    std::size_t i = 0;
    while (i < body.size()) {
      std::size_t j = i;
      while (j < body.size() && mask[j] == mask[i]) ++j;
      std::string classes;
      if (mask[i] & 1u) classes += "rel";
      if (mask[i] & 4u) classes += classes.empty() ? "pred" : " pred";
      if (mask[i] & 2u) classes += classes.empty() ? "asset" : " asset";
      if (!classes.empty()) os << "<span class=\"" << classes << "\">";
      os << detail::html_escape(body.substr(i, j - i));
      if (!classes.empty()) os << "</span>";
      i = j;
    }
    os << "</p>\n<div class=\"dashboard\">";
    os << "Relevant segments: "
       << static_cast<int>(r.relevant_segment_proportion * 100.0 + 0.5) << "% · "
       << "Predictions/forecasts: " << r.prediction_count;
    if (quotes != nullptr && primary_asset != nullptr) {
      auto pa = primary_asset->find(r.news_id);
      if (pa != primary_asset->end()) {
        if (auto q = quotes->get(pa->second)) {
          os << " · " << detail::html_escape(pa->second) << " " << q->price << " "
             << detail::html_escape(q->currency);
          if (!q->asof.empty()) os << " (as of " << detail::html_escape(q->asof) << ")";
        }
      }
    }
    os << "</div>\n";
  }
  os << "</body>\n</html>\n";
  return os.str();
}

// Most frequent Ticker/TickerAbbrev canonical id per item, used to pick the
// dashboard quote line.
inline std::map<std::string, std::string> primary_assets(
    const std::vector<PreparedDocument>& docs) {
  std::map<std::string, std::string> out;
  for (const PreparedDocument& d : docs) {
    std::map<std::string, std::size_t> counts;
    for (const auto& per_segment : d.asset_mentions)
      for (const LexMatch& m : per_segment)
        if (m.category == LexCategory::Ticker || m.category == LexCategory::TickerAbbrev)
          counts[m.canonical] += 1;
    std::string best;
    std::size_t best_n = 0;
    for (const auto& [id, n] : counts)
      if (n > best_n || (n == best_n && (best.empty() || id < best))) {
        best = id;
        best_n = n;
      }
    if (!best.empty()) out[d.item->id] = best;
  }
  return out;
}

}  // namespace finnews
