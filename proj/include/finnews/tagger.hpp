#pragma once

// Tag processing: financial term detection, homogenisation and replacement.
// Lexicon hits, capitalised proper names and numeric/date expressions are
// rewritten to category tags so the LDA stage sees a homogeneous vocabulary.

#include <array>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "finnews/corpus.hpp"
#include "finnews/text.hpp"

namespace finnews {

enum class TagCategory {
  STOCK, TICKER, TICKER_ABR, CURRENCY, FIN_ABR, NUM, DATE, MONEY,
  PERSON, NORP, ORG, PRODUCT, EVENT, WORK_OF_ART, LOC,
};

inline const char* tag_name(TagCategory c) {
  switch (c) {
    case TagCategory::STOCK: return "STOCK";
    case TagCategory::TICKER: return "TICKER";
    case TagCategory::TICKER_ABR: return "TICKER_ABR";
    case TagCategory::CURRENCY: return "CURRENCY";
    case TagCategory::FIN_ABR: return "FIN_ABR";
    case TagCategory::NUM: return "NUM";
    case TagCategory::DATE: return "DATE";
    case TagCategory::MONEY: return "MONEY";
    case TagCategory::PERSON: return "PERSON";
    case TagCategory::NORP: return "NORP";
    case TagCategory::ORG: return "ORG";
    case TagCategory::PRODUCT: return "PRODUCT";
    case TagCategory::EVENT: return "EVENT";
    case TagCategory::WORK_OF_ART: return "WORK_OF_ART";
    case TagCategory::LOC: return "LOC";
  }
  return "?";
}

inline std::optional<TagCategory> tag_from_token(std::string_view tok) {
  static const std::unordered_map<std::string_view, TagCategory> table = {
      {"STOCK", TagCategory::STOCK},     {"TICKER", TagCategory::TICKER},
      {"TICKER_ABR", TagCategory::TICKER_ABR}, {"CURRENCY", TagCategory::CURRENCY},
      {"FIN_ABR", TagCategory::FIN_ABR}, {"NUM", TagCategory::NUM},
      {"DATE", TagCategory::DATE},       {"MONEY", TagCategory::MONEY},
      {"PERSON", TagCategory::PERSON},   {"NORP", TagCategory::NORP},
      {"ORG", TagCategory::ORG},         {"PRODUCT", TagCategory::PRODUCT},
      {"EVENT", TagCategory::EVENT},     {"WORK_OF_ART", TagCategory::WORK_OF_ART},
      {"LOC", TagCategory::LOC},
  };
  auto it = table.find(tok);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

inline bool is_tag_token(std::string_view tok) { return tag_from_token(tok).has_value(); }

// The tag categories whose density defines the topic score rho.
inline bool is_significant_tag(TagCategory c) {
  return c == TagCategory::STOCK || c == TagCategory::TICKER ||
         c == TagCategory::CURRENCY || c == TagCategory::FIN_ABR;
}

inline TagCategory tag_for(LexCategory c) {
  switch (c) {
    case LexCategory::StockMarket: return TagCategory::STOCK;
    case LexCategory::Ticker: return TagCategory::TICKER;
    case LexCategory::TickerAbbrev: return TagCategory::TICKER_ABR;
    case LexCategory::Currency: return TagCategory::CURRENCY;
    case LexCategory::FinAbbrev: return TagCategory::FIN_ABR;
  }
  return TagCategory::TICKER;
}

// Proper-name gazetteers keyed by entity category (LOC already folds FAC and
// GPE at the data level). Surfaces match case-insensitively, longest first.
class Gazetteers {
 public:
  void add(std::string_view surface, TagCategory category) {
    std::vector<std::string> toks;
    std::istringstream iss{std::string(surface)};
    std::string t;
    while (iss >> t) toks.push_back(to_lower(t));
    if (toks.empty()) return;
    entries_.push_back(Entry{toks, category});
    by_first_[toks.front()].push_back(entries_.size() - 1);
  }

  // Longest entry matching tokens[i..], or 0 when none matches.
  std::size_t match_at(const std::vector<Token>& toks, std::size_t i,
                       TagCategory* out_cat) const {
    auto it = by_first_.find(to_lower(toks[i].text));
    if (it == by_first_.end()) return 0;
    std::size_t best_len = 0;
    for (std::size_t idx : it->second) {
      const Entry& e = entries_[idx];
      if (e.tokens.size() <= best_len || i + e.tokens.size() > toks.size()) continue;
      bool ok = true;
      for (std::size_t k = 0; k < e.tokens.size() && ok; ++k)
        ok = iequals(toks[i + k].text, e.tokens[k]);
      if (ok) {
        best_len = e.tokens.size();
        *out_cat = e.category;
      }
    }
    return best_len;
  }

  std::size_t size() const { return entries_.size(); }

  // Loads names_<kind>.csv files (one surface per line, '#' comments) from a
  // directory. Absent files are skipped; the bundled set ships all of them.
  static Gazetteers load_dir(const std::string& dir) {
    static const std::pair<const char*, TagCategory> files[] = {
        {"names_person.csv", TagCategory::PERSON},
        {"names_org.csv", TagCategory::ORG},
        {"names_loc.csv", TagCategory::LOC},
        {"names_norp.csv", TagCategory::NORP},
        {"names_product.csv", TagCategory::PRODUCT},
        {"names_event.csv", TagCategory::EVENT},
        {"names_work_of_art.csv", TagCategory::WORK_OF_ART},
        {"names_money.csv", TagCategory::MONEY},
    };
    Gazetteers g;
    for (const auto& [name, cat] : files) {
      std::filesystem::path p = std::filesystem::path(dir) / name;
      std::ifstream in(p);
      if (!in) continue;
      std::string line;
      while (std::getline(in, line)) {
        auto t = trim(line);
        if (!t.empty() && t.front() != '#') g.add(t, cat);
      }
    }
    return g;
  }

 private:
  struct Entry {
    std::vector<std::string> tokens;  // lowercased
    TagCategory category;
  };
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_first_;
};

namespace detail {

struct Repl {
  std::size_t begin;
  std::size_t end;
  std::string text;
};

inline std::string apply_replacements(std::string_view text, std::vector<Repl> repls) {
  std::sort(repls.begin(), repls.end(), [](const Repl& a, const Repl& b) {
    if (a.begin != b.begin) return a.begin < b.begin;
    return a.end > b.end;
  });
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  for (const Repl& r : repls) {
    if (r.begin < pos) continue;  // drop overlaps; earlier/longer wins
    out.append(text.substr(pos, r.begin - pos));
    out.append(r.text);
    pos = r.end;
  }
  out.append(text.substr(pos));
  return out;
}

inline bool is_capitalized(std::string_view tok) {
  return !tok.empty() && ascii_upper(tok.front());
}

// Small function-word guard: a lone capitalised one of these at sentence
// start is never a proper-name candidate.
inline bool common_sentence_opener(std::string_view lower) {
  static const std::unordered_set<std::string_view> words = {
      "the", "a",   "an",  "in",   "on",    "at",  "but", "and", "or",  "if",
      "as",  "it",  "its", "this", "that",  "these", "those", "he", "she",
      "we",  "you", "they", "so",  "for",   "to",  "of",  "by", "with", "from",
      "however", "moreover", "meanwhile", "still", "yet", "also", "then",
      "there", "here", "when", "while", "after", "before", "now", "today"};
  return words.count(lower) > 0;
}

inline bool sentence_initial(std::string_view text, std::size_t begin) {
  if (begin == 0) return true;
  if (begin >= 2 && text[begin - 1] == ' ') {
    char c = text[begin - 2];
    return c == '.' || c == '!' || c == '?';
  }
  return false;
}

}  // namespace detail

// Stock markets, assets, abbreviations, currencies and financial terms are
// replaced by their category tags; definite alias phrases over Algorithm 3's
// keyword nouns ("the company", ...) become TICKER. Longest match wins and
// existing tag tokens are never re-tagged.
inline std::string tag_financial(std::string_view text, const Lexicon& lexicon) {
  std::vector<detail::Repl> repls;
  for (const LexMatch& m : lexicon.find_matches(text)) {
    if (is_tag_token(m.surface)) continue;
    repls.push_back({m.begin, m.end, tag_name(tag_for(m.category))});
  }
  const std::vector<Token> toks = word_tokens(text);
  static const std::unordered_set<std::string_view> kw = {"company", "enterprise",
                                                          "manufacturer", "shareholder"};
  for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
    if (!iequals(toks[i].text, "the")) continue;
    if (kw.count(to_lower(toks[i + 1].text)) == 0) continue;
    if (toks[i + 1].begin != toks[i].end + 1 || text[toks[i].end] != ' ') continue;
    repls.push_back({toks[i].begin, toks[i + 1].end, tag_name(TagCategory::TICKER)});
  }
  // hyphenated compounds expose their abbreviation parts ("non-GAAP")
  for (const Token& t : toks) {
    if (t.text.find('-') == std::string::npos || is_tag_token(t.text)) continue;
    std::size_t off = 0;
    while (off < t.text.size()) {
      std::size_t dash = t.text.find('-', off);
      std::size_t len = (dash == std::string::npos ? t.text.size() : dash) - off;
      if (len > 0) {
        std::string part = t.text.substr(off, len);
        for (const LexMatch& m : lexicon.find_matches(part)) {
          if (m.begin == 0 && m.end == part.size() && !is_tag_token(part))
            repls.push_back({t.begin + off, t.begin + off + len,
                             tag_name(tag_for(m.category))});
        }
      }
      if (dash == std::string::npos) break;
      off = dash + 1;
    }
  }
  return detail::apply_replacements(text, std::move(repls));
}

// Capitalised proper names: checked first against the financial lexica, then
// against the entity gazetteers. Unmatched names stay verbatim.
inline std::string tag_proper_names(std::string_view text, const Lexicon& lexicon,
                                    const Gazetteers& gazetteers) {
  const std::vector<Token> toks = word_tokens(text);
  std::vector<detail::Repl> repls;
  std::size_t i = 0;
  while (i < toks.size()) {
    if (!detail::is_capitalized(toks[i].text) || is_tag_token(toks[i].text)) {
      ++i;
      continue;
    }
    // maximal run of capitalised tokens separated by single spaces ('&' may
    // join two halves of a name)
    std::size_t j = i;
    while (j + 1 < toks.size()) {
      const Token& nxt = toks[j + 1];
      bool adjacent = nxt.begin == toks[j].end + 1 && text[toks[j].end] == ' ';
      bool name_like = (detail::is_capitalized(nxt.text) && !is_tag_token(nxt.text)) ||
                       nxt.text == "&";
      if (adjacent && name_like) ++j;
      else break;
    }
    if (j == i && detail::sentence_initial(text, toks[i].begin) &&
        detail::common_sentence_opener(to_lower(toks[i].text))) {
      ++i;
      continue;
    }
    // financial lexica take priority inside the run
    std::string run(text.substr(toks[i].begin, toks[j].end - toks[i].begin));
    std::vector<std::pair<std::size_t, std::size_t>> covered;  // run-relative
    for (const LexMatch& m : lexicon.find_matches(run)) {
      repls.push_back({toks[i].begin + m.begin, toks[i].begin + m.end,
                       tag_name(tag_for(m.category))});
      covered.emplace_back(m.begin, m.end);
    }
    auto is_covered = [&](std::size_t rb, std::size_t re) {
      for (auto [b, e] : covered)
        if (rb < e && b < re) return true;
      return false;
    };
    std::size_t k = i;
    while (k <= j) {
      std::size_t rb = toks[k].begin - toks[i].begin;
      TagCategory cat{};
      std::size_t len = gazetteers.match_at(toks, k, &cat);
      if (len > 0 && k + len - 1 <= j) {
        std::size_t re = toks[k + len - 1].end - toks[i].begin;
        if (!is_covered(rb, re)) {
          repls.push_back({toks[k].begin, toks[k + len - 1].end, tag_name(cat)});
          k += len;
          continue;
        }
      }
      ++k;
    }
    i = j + 1;
  }
  return detail::apply_replacements(text, std::move(repls));
}

namespace detail {

inline bool pure_numeric(std::string_view tok) {
  bool digit = false;
  for (char c : tok) {
    if (ascii_digit(c)) digit = true;
    else if (c != '.' && c != ',') return false;
  }
  return digit;
}

inline bool is_year(std::string_view tok) {
  if (tok.size() != 4 || !pure_numeric(tok)) return false;
  return tok[0] == '1' ? tok[1] == '9' : (tok[0] == '2' && tok[1] == '0');
}

// Day token: 1-31, optional ordinal suffix.
inline bool is_day(std::string_view tok) {
  std::size_t d = 0;
  while (d < tok.size() && ascii_digit(tok[d])) ++d;
  if (d == 0 || d > 2) return false;
  std::string_view suffix = tok.substr(d);
  if (!suffix.empty() && suffix != "st" && suffix != "nd" && suffix != "rd" && suffix != "th")
    return false;
  int v = 0;
  for (std::size_t i = 0; i < d; ++i) v = v * 10 + (tok[i] - '0');
  return v >= 1 && v <= 31;
}

inline bool is_month(std::string_view tok) {
  static const std::unordered_set<std::string_view> months = {
      "january", "february", "march",     "april",   "may",      "june",
      "july",    "august",   "september", "october", "november", "december",
      "jan",     "feb",      "mar",       "apr",     "jun",      "jul",
      "aug",     "sep",      "sept",      "oct",     "nov",      "dec"};
  return months.count(to_lower(tok)) > 0;
}

// Currency symbol bytes immediately before `pos`, if any.
inline std::size_t currency_prefix_len(std::string_view text, std::size_t pos) {
  if (pos >= 1 && text[pos - 1] == '$') return 1;
  if (pos >= 2 && static_cast<unsigned char>(text[pos - 2]) == 0xC2 &&
      static_cast<unsigned char>(text[pos - 1]) == 0xA3)
    return 2;  // £
  if (pos >= 3 && static_cast<unsigned char>(text[pos - 3]) == 0xE2 &&
      static_cast<unsigned char>(text[pos - 2]) == 0x82 &&
      static_cast<unsigned char>(text[pos - 1]) == 0xAC)
    return 3;  // €
  return 0;
}

}  // namespace detail

// Numeric and date homogenisation: explicit dates and clock times become
// DATE; money amounts, percentages and other cardinals become NUM. Words
// like "percent" or "billion" next to a numeral stay as words (only the
// numeral with its attached $/% marks is replaced). The full pattern set is
// documented in docs/tagging.md.
inline std::string tag_numeric_dates(std::string_view text) {
  const std::vector<Token> toks = word_tokens(text);
  std::vector<detail::Repl> repls;
  std::vector<bool> used(toks.size(), false);

  auto gap_is = [&](std::size_t a, std::size_t b, std::string_view sep) {
    return toks[b].begin >= toks[a].end &&
           text.substr(toks[a].end, toks[b].begin - toks[a].end) == sep;
  };
  auto adjacent = [&](std::size_t a, std::size_t b) {
    return gap_is(a, b, " ") || gap_is(a, b, ", ");
  };

  // clock times ("3:30", "10:45 am") are not word tokens; scan raw text
  std::vector<std::pair<std::size_t, std::size_t>> time_spans;
  for (std::size_t p = 0; p + 3 < text.size(); ++p) {
    if (!ascii_digit(text[p])) continue;
    if (p > 0 && (ascii_digit(text[p - 1]) || detail::word_char(text[p - 1]))) continue;
    std::size_t h = p;
    std::size_t hd = 0;
    while (h < text.size() && ascii_digit(text[h])) ++h, ++hd;
    if (hd == 0 || hd > 2 || h >= text.size() || text[h] != ':') continue;
    std::size_t m = h + 1;
    if (m + 1 >= text.size() || !ascii_digit(text[m]) || !ascii_digit(text[m + 1])) continue;
    if ((text[m] - '0') * 10 + (text[m + 1] - '0') > 59) continue;
    std::size_t e = m + 2;
    if (e < text.size() && detail::word_char(text[e])) continue;
    for (std::string_view suf : {" a.m.", " p.m.", " am", " pm"})
      if (text.substr(e, suf.size()) == suf) {
        e += suf.size();
        break;
      }
    time_spans.emplace_back(p, e);
    repls.push_back({p, e, tag_name(TagCategory::DATE)});
  }
  auto in_time = [&](const Token& t) {
    for (auto [b, e] : time_spans)
      if (t.begin < e && b < t.end) return true;
    return false;
  };

  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (used[i] || is_tag_token(toks[i].text) || in_time(toks[i])) continue;
    // month day (, year)? | month year
    if (detail::is_month(toks[i].text) && detail::is_capitalized(toks[i].text) &&
        i + 1 < toks.size() && adjacent(i, i + 1) && !used[i + 1]) {
      std::size_t last = 0;
      if (detail::is_day(toks[i + 1].text)) {
        last = i + 1;
        if (i + 2 < toks.size() && adjacent(i + 1, i + 2) && detail::is_year(toks[i + 2].text))
          last = i + 2;
      } else if (detail::is_year(toks[i + 1].text)) {
        last = i + 1;
      }
      if (last != 0) {
        repls.push_back({toks[i].begin, toks[last].end, tag_name(TagCategory::DATE)});
        for (std::size_t k = i; k <= last; ++k) used[k] = true;
        continue;
      }
    }
    // day month (year)?
    if (detail::is_day(toks[i].text) && detail::pure_numeric(toks[i].text) &&
        i + 1 < toks.size() && adjacent(i, i + 1) &&
        detail::is_month(toks[i + 1].text) && detail::is_capitalized(toks[i + 1].text)) {
      std::size_t last = i + 1;
      if (i + 2 < toks.size() && adjacent(i + 1, i + 2) && detail::is_year(toks[i + 2].text))
        last = i + 2;
      repls.push_back({toks[i].begin, toks[last].end, tag_name(TagCategory::DATE)});
      for (std::size_t k = i; k <= last; ++k) used[k] = true;
      continue;
    }
    // bare year
    if (detail::is_year(toks[i].text)) {
      repls.push_back({toks[i].begin, toks[i].end, tag_name(TagCategory::DATE)});
      used[i] = true;
    }
  }

  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (used[i] || in_time(toks[i]) || !detail::pure_numeric(toks[i].text)) continue;
    std::size_t b = toks[i].begin - detail::currency_prefix_len(text, toks[i].begin);
    std::size_t e = toks[i].end;
    if (e < text.size() && text[e] == '%') ++e;
    repls.push_back({b, e, tag_name(TagCategory::NUM)});
  }
  return detail::apply_replacements(text, std::move(repls));
}

struct TaggedToken {
  std::string surface;
  std::optional<TagCategory> category;
};

struct TaggedSentence {
  std::string news_id;
  std::size_t segment_index = 0;
  std::size_t sentence_index = 0;
  std::vector<TaggedToken> tokens;
  std::string original;  // sentence text before tagging
  std::string tagged;    // sentence text after tagging
};

// Fixed composition financial -> proper names -> numeric/dates.
inline std::string tag_text(std::string_view text, const Lexicon& lexicon,
                            const Gazetteers& gazetteers) {
  std::string t = tag_financial(text, lexicon);
  t = tag_proper_names(t, lexicon, gazetteers);
  return tag_numeric_dates(t);
}

inline TaggedSentence tag_sentence(std::string_view sentence, const Lexicon& lexicon,
                                   const Gazetteers& gazetteers) {
  TaggedSentence out;
  out.original = std::string(sentence);
  out.tagged = tag_text(sentence, lexicon, gazetteers);
  for (const Token& t : word_tokens(out.tagged))
    out.tokens.push_back(TaggedToken{t.text, tag_from_token(t.text)});
  return out;
}

inline std::size_t significant_tag_count(const TaggedSentence& s) {
  std::size_t n = 0;
  for (const auto& t : s.tokens)
    if (t.category && is_significant_tag(*t.category)) ++n;
  return n;
}

}  // namespace finnews
