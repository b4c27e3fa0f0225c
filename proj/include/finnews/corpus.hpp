#pragma once

// Data model and ingestion: news items, span annotations, financial lexica,
// text normalization and rule-based sentence splitting.

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "finnews/text.hpp"

namespace finnews {

struct NewsItem {
  std::string id;
  std::string title;
  std::string body;  // normalized at load time
  std::string author;
  std::string source;
  std::string published;  // ISO-8601 date, stored but unused downstream
};

enum class SpanLabel { Relevant, Asset, Prediction };

inline std::string to_string(SpanLabel l) {
  switch (l) {
    case SpanLabel::Relevant: return "Relevant";
    case SpanLabel::Asset: return "Asset";
    case SpanLabel::Prediction: return "Prediction";
  }
  return "?";
}

inline SpanLabel span_label_from_string(std::string_view s) {
  if (s == "Relevant") return SpanLabel::Relevant;
  if (s == "Asset") return SpanLabel::Asset;
  if (s == "Prediction") return SpanLabel::Prediction;
  throw DataError("unknown span label: " + std::string(s));
}

struct Span {
  std::size_t start = 0;
  std::size_t end = 0;  // half-open, char offsets into the normalized body
  SpanLabel label = SpanLabel::Relevant;
};

struct AnnotationSet {
  std::string news_id;
  std::string annotator_id;
  std::vector<Span> spans;
};

enum class LexCategory { StockMarket, Ticker, TickerAbbrev, Currency, FinAbbrev };

inline std::string to_string(LexCategory c) {
  switch (c) {
    case LexCategory::StockMarket: return "StockMarket";
    case LexCategory::Ticker: return "Ticker";
    case LexCategory::TickerAbbrev: return "TickerAbbrev";
    case LexCategory::Currency: return "Currency";
    case LexCategory::FinAbbrev: return "FinAbbrev";
  }
  return "?";
}

inline LexCategory lex_category_from_string(std::string_view s) {
  if (s == "StockMarket") return LexCategory::StockMarket;
  if (s == "Ticker") return LexCategory::Ticker;
  if (s == "TickerAbbrev") return LexCategory::TickerAbbrev;
  if (s == "Currency") return LexCategory::Currency;
  if (s == "FinAbbrev") return LexCategory::FinAbbrev;
  throw DataError("unknown lexicon category: " + std::string(s));
}

// Abbreviation-shaped categories match case-sensitively, full names do not.
inline bool lex_case_sensitive(LexCategory c) {
  return c == LexCategory::TickerAbbrev || c == LexCategory::FinAbbrev;
}

struct LexMatch {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string surface;    // text as it appeared
  std::string canonical;  // canonical id from the lexicon
  LexCategory category = LexCategory::Ticker;
};

// Surface -> (category, canonical id) table with longest-match-first scan.
class Lexicon {
 public:
  struct Entry {
    std::string surface;
    LexCategory category;
    std::string canonical;
    std::vector<std::string> tokens;  // surface split on single spaces
  };

  void add(std::string surface, LexCategory category, std::string canonical) {
    auto key = std::pair<std::string, int>(
        lex_case_sensitive(category) ? surface : to_lower(surface),
        static_cast<int>(category));
    if (!seen_.insert(key).second)
      throw DataError("duplicate lexicon surface '" + surface + "' in category " +
                      to_string(category));
    Entry e{std::move(surface), category, std::move(canonical), {}};
    std::istringstream iss(e.surface);
    std::string tok;
    while (iss >> tok) e.tokens.push_back(tok);
    if (e.tokens.empty()) throw DataError("empty lexicon surface");
    std::string first = to_lower(e.tokens.front());
    entries_.push_back(std::move(e));
    by_first_[first].push_back(entries_.size() - 1);
  }

  std::size_t size() const { return entries_.size(); }
  const std::vector<Entry>& entries() const { return entries_; }

  // Longest-match-first scan over whole-word token runs. Category order
  // breaks exact ties deterministically (enum order).
  std::vector<LexMatch> find_matches(std::string_view text) const {
    std::vector<LexMatch> out;
    const std::vector<Token> toks = word_tokens(text);
    std::size_t i = 0;
    while (i < toks.size()) {
      const Entry* best = nullptr;
      std::size_t best_len = 0;
      auto it = by_first_.find(to_lower(toks[i].text));
      if (it != by_first_.end()) {
        for (std::size_t idx : it->second) {
          const Entry& e = entries_[idx];
          if (e.tokens.size() < best_len) continue;
          if (i + e.tokens.size() > toks.size()) continue;
          bool ok = true;
          for (std::size_t k = 0; k < e.tokens.size() && ok; ++k) {
            const std::string& have = toks[i + k].text;
            const std::string& want = e.tokens[k];
            ok = lex_case_sensitive(e.category) ? (have == want)
                                                : iequals(have, want);
          }
          if (!ok) continue;
          if (best == nullptr || e.tokens.size() > best_len ||
              (e.tokens.size() == best_len &&
               static_cast<int>(e.category) < static_cast<int>(best->category))) {
            best = &e;
            best_len = e.tokens.size();
          }
        }
      }
      if (best != nullptr) {
        std::size_t b = toks[i].begin;
        std::size_t e = toks[i + best_len - 1].end;
        out.push_back(LexMatch{b, e, std::string(text.substr(b, e - b)),
                               best->canonical, best->category});
        i += best_len;
      } else {
        ++i;
      }
    }
    return out;
  }

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_first_;
  std::set<std::pair<std::string, int>> seen_;
};

// Collapses whitespace runs to one space, strips URLs, trims. Total and
// idempotent.
inline std::string normalize_text(std::string_view raw) {
  std::string no_urls;
  no_urls.reserve(raw.size());
  std::size_t i = 0;
  auto starts_url = [&](std::size_t p) {
    static const char* prefixes[] = {"http://", "https://", "www."};
    for (const char* pre : prefixes) {
      std::string_view pv(pre);
      if (raw.substr(p, pv.size()) == pv) return true;
    }
    return false;
  };
  while (i < raw.size()) {
    if (starts_url(i)) {
      while (i < raw.size() && !std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
      continue;
    }
    no_urls.push_back(raw[i]);
    ++i;
  }
  std::string out;
  out.reserve(no_urls.size());
  bool in_space = false;
  for (char c : no_urls) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      in_space = true;
      continue;
    }
    if (in_space && !out.empty()) out.push_back(' ');
    in_space = false;
    out.push_back(c);
  }
  return out;
}

struct Sentence {
  std::string text;  // exact body slice, including the trailing separator
  std::size_t start = 0;
  std::size_t end = 0;
};

// Guard list of dotted abbreviations that never end a sentence.
using AbbrevGuard = std::unordered_set<std::string>;

inline AbbrevGuard default_abbrev_guard() {
  return AbbrevGuard{"U.S.", "U.K.", "U.N.",  "E.U.",  "Inc.", "Corp.", "Co.",
                     "Ltd.", "Mr.",  "Mrs.",  "Ms.",   "Dr.",  "Jr.",   "Sr.",
                     "St.",  "vs.",  "etc.",  "e.g.",  "i.e.", "No.",   "Jan.",
                     "Feb.", "Mar.", "Apr.",  "Jun.",  "Jul.", "Aug.",  "Sep.",
                     "Sept.", "Oct.", "Nov.", "Dec.",  "a.m.", "p.m."};
}

inline AbbrevGuard load_abbrev_guard(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open abbreviation list: " + path);
  AbbrevGuard out;
  std::string line;
  while (std::getline(in, line)) {
    auto t = trim(line);
    if (!t.empty()) out.insert(std::string(t));
  }
  return out;
}

// Rule-based splitter over normalized text. A boundary sits after '.', '!'
// or '?' when followed by one space and an uppercase letter or digit, and
// the terminating token is not in the guard list. Spans are contiguous and
// cover [0, len): the inter-sentence space belongs to the preceding span,
// so concatenating slices reconstructs the body.
inline std::vector<Sentence> split_sentences(std::string_view body,
                                             const AbbrevGuard& guard = default_abbrev_guard()) {
  std::vector<Sentence> out;
  if (body.empty()) return out;
  std::vector<std::size_t> starts{0};
  for (std::size_t i = 0; i + 2 < body.size(); ++i) {
    char c = body[i];
    if (c != '.' && c != '!' && c != '?') continue;
    if (body[i + 1] != ' ') continue;
    char nxt = body[i + 2];
    if (!(ascii_upper(nxt) || ascii_digit(nxt))) continue;
    if (c == '.') {
      std::size_t b = i;
      while (b > 0 && body[b - 1] != ' ') --b;
      std::string tail(body.substr(b, i - b + 1));
      if (guard.count(tail) > 0) continue;
    }
    starts.push_back(i + 2);
  }
  starts.push_back(body.size());
  for (std::size_t k = 0; k + 1 < starts.size(); ++k) {
    std::size_t b = starts[k], e = starts[k + 1];
    out.push_back(Sentence{std::string(body.substr(b, e - b)), b, e});
  }
  return out;
}

// --- file loading -----------------------------------------------------------

inline std::vector<NewsItem> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus: " + path);
  std::vector<NewsItem> items;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": malformed JSON line: " + e.what());
    }
    NewsItem item;
    for (const char* field : {"id", "title", "body", "author", "source", "published"}) {
      if (!j.contains(field) || !j[field].is_string())
        throw DataError(path + ":" + std::to_string(lineno) +
                        ": missing or non-string field \"" + field + "\"");
    }
    item.id = j["id"].get<std::string>();
    item.title = j["title"].get<std::string>();
    item.body = normalize_text(j["body"].get<std::string>());
    item.author = j["author"].get<std::string>();
    item.source = j["source"].get<std::string>();
    item.published = j["published"].get<std::string>();
    if (item.body.empty())
      throw DataError(path + ":" + std::to_string(lineno) + ": empty body after normalization");
    if (!ids.insert(item.id).second)
      throw DataError(path + ":" + std::to_string(lineno) + ": duplicate id \"" + item.id + "\"");
    items.push_back(std::move(item));
  }
  return items;
}

inline nlohmann::ordered_json news_item_to_json(const NewsItem& it) {
  nlohmann::ordered_json j;
  j["id"] = it.id;
  j["title"] = it.title;
  j["body"] = it.body;
  j["author"] = it.author;
  j["source"] = it.source;
  j["published"] = it.published;
  return j;
}

inline void save_corpus(const std::vector<NewsItem>& items, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write corpus: " + path);
  for (const auto& it : items) out << news_item_to_json(it).dump() << "\n";
}

// CSV rows: surface,category,canonical. No quoting; surfaces contain no commas.
inline void load_lexicon_file(Lexicon& lex, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lexicon: " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto c1 = t.find(',');
    auto c2 = t.find(',', c1 == std::string_view::npos ? c1 : c1 + 1);
    if (c1 == std::string_view::npos || c2 == std::string_view::npos)
      throw DataError(path + ":" + std::to_string(lineno) + ": expected surface,category,canonical");
    std::string surface(trim(t.substr(0, c1)));
    std::string category(trim(t.substr(c1 + 1, c2 - c1 - 1)));
    std::string canonical(trim(t.substr(c2 + 1)));
    lex.add(std::move(surface), lex_category_from_string(category), std::move(canonical));
  }
}

inline Lexicon load_lexicon(const std::vector<std::string>& paths) {
  Lexicon lex;
  for (const auto& p : paths) load_lexicon_file(lex, p);
  return lex;
}

inline std::unordered_set<std::string> load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open stopword list: " + path);
  std::unordered_set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto t = trim(line);
    if (!t.empty()) out.insert(to_lower(t));
  }
  return out;
}

// Validates offsets and label invariants against the corpus bodies.
inline std::vector<AnnotationSet> load_annotations(
    const std::string& path, const std::vector<NewsItem>& corpus) {
  std::unordered_map<std::string, std::size_t> body_len;
  for (const auto& it : corpus) body_len[it.id] = it.body.size();

  std::ifstream in(path);
  if (!in) throw DataError("cannot open annotations: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": malformed JSON: " + e.what());
  }
  if (!j.is_array()) throw DataError(path + ": top level must be an array");

  std::vector<AnnotationSet> out;
  for (const auto& rec : j) {
    AnnotationSet a;
    a.news_id = rec.at("news_id").get<std::string>();
    a.annotator_id = rec.at("annotator_id").get<std::string>();
    auto len_it = body_len.find(a.news_id);
    if (len_it == body_len.end())
      throw DataError(path + ": annotation references unknown news id \"" + a.news_id + "\"");
    const std::size_t len = len_it->second;
    for (const auto& sp : rec.at("spans")) {
      Span s;
      s.start = sp.at("start").get<std::size_t>();
      s.end = sp.at("end").get<std::size_t>();
      s.label = span_label_from_string(sp.at("label").get<std::string>());
      if (!(s.start < s.end && s.end <= len))
        throw DataError(path + ": span [" + std::to_string(s.start) + "," +
                        std::to_string(s.end) + ") out of bounds for \"" + a.news_id +
                        "\" (body length " + std::to_string(len) + ")");
      a.spans.push_back(s);
    }
    // same-label spans must not overlap
    for (std::size_t x = 0; x < a.spans.size(); ++x)
      for (std::size_t y = x + 1; y < a.spans.size(); ++y) {
        const Span& p = a.spans[x];
        const Span& q = a.spans[y];
        if (p.label == q.label && p.start < q.end && q.start < p.end)
          throw DataError(path + ": overlapping " + to_string(p.label) +
                          " spans in \"" + a.news_id + "\" by " + a.annotator_id);
      }
    // every Prediction span sits inside some Relevant span of the same set
    for (const Span& p : a.spans) {
      if (p.label != SpanLabel::Prediction) continue;
      bool contained = false;
      for (const Span& r : a.spans)
        if (r.label == SpanLabel::Relevant && r.start <= p.start && p.end <= r.end) {
          contained = true;
          break;
        }
      if (!contained)
        throw DataError(path + ": Prediction span [" + std::to_string(p.start) + "," +
                        std::to_string(p.end) + ") in \"" + a.news_id + "\" by " +
                        a.annotator_id + " lies outside every Relevant span");
    }
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace finnews
