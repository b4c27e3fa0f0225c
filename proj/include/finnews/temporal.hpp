#pragma once

// Discursive temporality: rule-based verb tense detection, clause-scoped
// dependency and proximity features over asset tags, textual/numerical
// features, chi-squared selection and a linear max-margin classifier.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "finnews/tagger.hpp"
#include "finnews/text.hpp"

namespace finnews {

enum class TenseTag { Past, Present, Future };

inline const char* to_string(TenseTag t) {
  switch (t) {
    case TenseTag::Past: return "Past";
    case TenseTag::Present: return "Present";
    case TenseTag::Future: return "Future";
  }
  return "?";
}

inline TenseTag tense_from_string(std::string_view s) {
  if (s == "Past") return TenseTag::Past;
  if (s == "Present") return TenseTag::Present;
  if (s == "Future") return TenseTag::Future;
  throw DataError("unknown tense label: " + std::string(s));
}

// Verb recognition tables: a base-form list plus irregular past forms.
// Inflected forms (-s, -ed, -ing) are reduced morphologically to a base.
class VerbLexicon {
 public:
  std::unordered_set<std::string> bases;
  std::unordered_set<std::string> irregular_past;  // past + past participle forms

  static VerbLexicon load(const std::string& base_path, const std::string& irregular_path) {
    VerbLexicon v;
    std::ifstream in(base_path);
    if (!in) throw DataError("cannot open verb list: " + base_path);
    std::string line;
    while (std::getline(in, line)) {
      auto t = trim(line);
      if (!t.empty() && t.front() != '#') v.bases.insert(to_lower(t));
    }
    std::ifstream irr(irregular_path);
    if (!irr) throw DataError("cannot open irregular verb list: " + irregular_path);
    while (std::getline(irr, line)) {
      auto t = trim(line);
      if (t.empty() || t.front() == '#') continue;
      // rows: base,past,participle
      std::string row(t);
      std::replace(row.begin(), row.end(), ',', ' ');
      std::istringstream iss(row);
      std::string base, past, part;
      iss >> base >> past >> part;
      if (base.empty() || past.empty())
        throw DataError(irregular_path + ": expected base,past,participle");
      v.bases.insert(to_lower(base));
      v.irregular_past.insert(to_lower(past));
      if (!part.empty()) v.irregular_past.insert(to_lower(part));
    }
    return v;
  }

  bool is_modal(std::string_view low) const {
    static const std::unordered_set<std::string_view> modals = {
        "will", "shall", "would", "should", "can", "could", "may", "might", "must"};
    return modals.count(low) > 0 || (low.size() > 2 && low.substr(low.size() - 3) == "'ll") ||
           low == "'ll";
  }

  bool is_aux(std::string_view low) const {
    static const std::unordered_set<std::string_view> aux = {
        "is", "are", "am", "was", "were", "be", "been", "being",
        "has", "have", "had", "do", "does", "did"};
    return aux.count(low) > 0;
  }

  // Heuristic base recovery for -s / -ed / -ing inflections.
  bool inflected_base_known(const std::string& low) const {
    auto known = [&](std::string b) { return bases.count(b) > 0; };
    auto ends = [&](std::string_view suf) {
      return low.size() > suf.size() &&
             low.compare(low.size() - suf.size(), suf.size(), suf) == 0;
    };
    if (ends("ies") && known(low.substr(0, low.size() - 3) + "y")) return true;
    if (ends("es") && known(low.substr(0, low.size() - 2))) return true;
    if (ends("s") && known(low.substr(0, low.size() - 1))) return true;
    if (ends("ied") && known(low.substr(0, low.size() - 3) + "y")) return true;
    if (ends("ed")) {
      std::string stem = low.substr(0, low.size() - 2);
      if (known(stem) || known(stem + "e")) return true;
      if (stem.size() >= 2 && stem[stem.size() - 1] == stem[stem.size() - 2] &&
          known(stem.substr(0, stem.size() - 1)))
        return true;  // plunged -> plunge handled above; dropped -> drop here
    }
    if (ends("ing")) {
      std::string stem = low.substr(0, low.size() - 3);
      if (known(stem) || known(stem + "e")) return true;
      if (stem.size() >= 2 && stem[stem.size() - 1] == stem[stem.size() - 2] &&
          known(stem.substr(0, stem.size() - 1)))
        return true;
    }
    return false;
  }

  bool is_verb_token(const std::string& low) const {
    if (is_modal(low) || is_aux(low)) return true;
    if (bases.count(low) > 0 || irregular_past.count(low) > 0) return true;
    return inflected_base_known(low);
  }
};

// One verb group: contiguous auxiliaries/modals plus head, with "not"/"to"
// glue. `first`/`last` are token indices into the owning clause's sentence.
struct VerbGroup {
  std::size_t first = 0;
  std::size_t last = 0;
  std::vector<std::string> tokens;  // lowercased
  bool finite = true;               // false for bare to-infinitives and gerunds
};

// Tense of a single verb group. Future when a future modal or "going to" +
// base is present; past when the head is an irregular past / -ed form or a
// past auxiliary governs the group; present otherwise.
inline TenseTag detect_tense(const std::vector<std::string>& group, const VerbLexicon& verbs) {
  if (group.empty()) return TenseTag::Present;
  std::vector<std::string> low;
  low.reserve(group.size());
  for (const auto& g : group) low.push_back(to_lower(g));

  for (std::size_t i = 0; i < low.size(); ++i) {
    const std::string& w = low[i];
    if (w == "will" || w == "shall" || w == "'ll" ||
        (w.size() > 3 && w.substr(w.size() - 3) == "'ll"))
      return TenseTag::Future;
    if (w == "going" && i + 2 < low.size() && low[i + 1] == "to" &&
        verbs.is_verb_token(low[i + 2]))
      return TenseTag::Future;
  }
  for (const auto& w : low)
    if (w == "was" || w == "were" || w == "had" || w == "did") return TenseTag::Past;
  std::string head = low.back();
  if (head == "not" || head == "to") head = low.size() >= 2 ? low[low.size() - 2] : head;
  if (verbs.irregular_past.count(head) > 0) return TenseTag::Past;
  if (head.size() > 2 && head.compare(head.size() - 2, 2, "ed") == 0) return TenseTag::Past;
  return TenseTag::Present;
}

namespace detail {

inline std::string strip_token(const std::string& s) {
  return to_lower(s);
}

}  // namespace detail

// Finds verb groups in a token sequence: maximal runs of verb tokens where
// "not" and "to" may glue members together. A group is finite unless it
// starts with "to" or with a bare -ing form.
inline std::vector<VerbGroup> find_verb_groups(const std::vector<std::string>& tokens,
                                               const VerbLexicon& verbs) {
  std::vector<VerbGroup> out;
  std::size_t i = 0;
  const std::size_t n = tokens.size();
  auto low_at = [&](std::size_t k) { return to_lower(tokens[k]); };
  while (i < n) {
    std::string low = low_at(i);
    if (is_tag_token(tokens[i]) || !verbs.is_verb_token(low)) {
      ++i;
      continue;
    }
    VerbGroup g;
    g.first = i;
    g.tokens.push_back(low);
    std::size_t j = i + 1;
    while (j < n) {
      std::string nl = low_at(j);
      if (is_tag_token(tokens[j])) break;
      bool glue = nl == "not" || nl == "n't" ||
                  (nl == "to" && j + 1 < n && verbs.is_verb_token(low_at(j + 1)));
      if (verbs.is_verb_token(nl) || glue) {
        g.tokens.push_back(nl);
        ++j;
      } else {
        break;
      }
    }
    g.last = j - 1;
    const std::string& head0 = g.tokens.front();
    bool gerund_start = head0.size() > 3 &&
                        head0.compare(head0.size() - 3, 3, "ing") == 0 &&
                        !verbs.is_aux(head0) && !verbs.is_modal(head0);
    g.finite = head0 != "to" && !gerund_start;
    out.push_back(std::move(g));
    i = j;
  }
  return out;
}

struct Clause {
  std::size_t first = 0;  // token range within the sentence, inclusive
  std::size_t last = 0;
};

// Splits a tagged sentence's tokens at commas/semicolons followed by a later
// finite verb and at subordinating/coordinating conjunctions. Punctuation is
// not part of the token stream, so comma splits take the raw sentence text.
inline std::vector<Clause> clause_split(const std::vector<std::string>& tokens,
                                        const VerbLexicon& verbs,
                                        const std::vector<std::pair<std::size_t, std::size_t>>& token_spans = {},
                                        std::string_view raw_text = {}) {
  std::vector<Clause> out;
  const std::size_t n = tokens.size();
  if (n == 0) return out;

  static const std::unordered_set<std::string_view> subordinators = {
      "that", "which", "because", "but", "while", "although", "since", "whereas", "if", "when"};

  std::vector<VerbGroup> groups = find_verb_groups(tokens, verbs);
  auto finite_verb_at_or_after = [&](std::size_t tok) {
    for (const auto& g : groups)
      if (g.finite && g.first >= tok) return true;
    return false;
  };
  auto inside_group = [&](std::size_t tok) {
    for (const auto& g : groups)
      if (tok >= g.first && tok <= g.last) return true;
    return false;
  };

  std::vector<std::size_t> splits;  // token index starting a new clause
  for (std::size_t i = 1; i < n; ++i) {
    const std::string low = to_lower(tokens[i]);
    if (subordinators.count(low) > 0 && finite_verb_at_or_after(i + 1)) {
      splits.push_back(i);
      continue;
    }
    // "and"/"or" with a new subject: next token is not a verb and a finite
    // verb still follows
    if ((low == "and" || low == "or") && i + 1 < n) {
      std::string nxt = to_lower(tokens[i + 1]);
      if (!verbs.is_verb_token(nxt) && !inside_group(i + 1) && finite_verb_at_or_after(i + 1)) {
        splits.push_back(i);
        continue;
      }
    }
    // comma/semicolon between this token and the previous one
    if (!token_spans.empty() && !raw_text.empty() && i < token_spans.size()) {
      std::size_t gap_b = token_spans[i - 1].second;
      std::size_t gap_e = token_spans[i].first;
      bool has_comma = false;
      for (std::size_t p = gap_b; p < gap_e && p < raw_text.size(); ++p)
        if (raw_text[p] == ',' || raw_text[p] == ';') has_comma = true;
      if (has_comma && finite_verb_at_or_after(i) &&
          (splits.empty() || splits.back() != i)) {
        splits.push_back(i);
        continue;
      }
    }
  }
  std::size_t first = 0;
  for (std::size_t s : splits) {
    if (s > first) out.push_back(Clause{first, s - 1});
    first = s;
  }
  if (first < n) out.push_back(Clause{first, n - 1});
  if (out.empty()) out.push_back(Clause{0, n - 1});
  return out;
}

// Asset tags participating in temporal analysis.
inline bool is_asset_tag(std::string_view tok) {
  auto cat = tag_from_token(tok);
  return cat && (*cat == TagCategory::STOCK || *cat == TagCategory::TICKER ||
                 *cat == TagCategory::TICKER_ABR || *cat == TagCategory::CURRENCY);
}

struct TemporalFeatureVector {
  // counts[analysis][role][tense]; analysis 0 = dependency, 1 = proximity;
  // role 0 = subject-only, 1 = subject-or-object
  std::array<std::array<std::array<int, 3>, 2>, 2> counts{};
  std::array<std::array<TenseTag, 2>, 2> global{
      {{TenseTag::Present, TenseTag::Present}, {TenseTag::Present, TenseTag::Present}}};
  int num_count = 0;
  int pct_count = 0;

  int& at(int analysis, int role, TenseTag t) {
    return counts[analysis][role][static_cast<int>(t)];
  }
  int at(int analysis, int role, TenseTag t) const {
    return counts[analysis][role][static_cast<int>(t)];
  }
};

// Majority vote: argmax of the three counts; any tie involving the maximum
// goes to Future; all-zero counts default to Present.
inline TenseTag majority(int past, int present, int future) {
  if (past == 0 && present == 0 && future == 0) return TenseTag::Present;
  int mx = std::max({past, present, future});
  int hits = (past == mx) + (present == mx) + (future == mx);
  if (hits > 1) return TenseTag::Future;
  if (past == mx) return TenseTag::Past;
  if (present == mx) return TenseTag::Present;
  return TenseTag::Future;
}

// One tagged sentence, reduced to what the temporal analyses need.
struct AnalyzedSentence {
  std::vector<std::string> tokens;
  std::vector<std::pair<std::size_t, std::size_t>> spans;  // offsets in `text`
  std::string text;  // tagged sentence text (for comma-aware clause splits)
};

inline AnalyzedSentence analyze_tokens(const TaggedSentence& s) {
  AnalyzedSentence a;
  a.text = s.tagged;
  for (const Token& t : word_tokens(s.tagged)) {
    a.tokens.push_back(t.text);
    a.spans.emplace_back(t.begin, t.end);
  }
  return a;
}

namespace detail {

inline void finalize_globals(TemporalFeatureVector& f) {
  for (int analysis = 0; analysis < 2; ++analysis)
    for (int role = 0; role < 2; ++role)
      f.global[analysis][role] = majority(f.counts[analysis][role][0],
                                          f.counts[analysis][role][1],
                                          f.counts[analysis][role][2]);
}

}  // namespace detail

// Dependency analysis: for each clause containing an asset tag, the clause's
// first finite verb group supplies the tense; an asset before that group is
// a subject, otherwise an object. One increment per clause.
inline void dependency_features(const std::vector<AnalyzedSentence>& segment,
                                const VerbLexicon& verbs, TemporalFeatureVector& f) {
  for (const AnalyzedSentence& s : segment) {
    const std::vector<Clause> clauses = clause_split(s.tokens, verbs, s.spans, s.text);
    const std::vector<VerbGroup> groups = find_verb_groups(s.tokens, verbs);
    for (const Clause& c : clauses) {
      std::optional<std::size_t> asset_pos;
      for (std::size_t i = c.first; i <= c.last; ++i)
        if (is_asset_tag(s.tokens[i])) {
          asset_pos = i;
          break;
        }
      if (!asset_pos) continue;
      const VerbGroup* fin = nullptr;
      for (const auto& g : groups)
        if (g.finite && g.first >= c.first && g.last <= c.last) {
          fin = &g;
          break;
        }
      if (fin == nullptr) continue;
      const TenseTag tense = detect_tense(fin->tokens, verbs);
      const bool subject = *asset_pos < fin->first;
      if (subject) f.at(0, 0, tense) += 1;
      f.at(0, 1, tense) += 1;
    }
  }
  detail::finalize_globals(f);
}

// Proximity analysis: every asset tag occurrence is linked to the nearest
// verb group by intermediate word count in both directions (ties prefer the
// following group); the positional subject/object rule applies per link.
inline void proximity_features(const std::vector<AnalyzedSentence>& segment,
                               const VerbLexicon& verbs, TemporalFeatureVector& f) {
  for (const AnalyzedSentence& s : segment) {
    const std::vector<VerbGroup> groups = find_verb_groups(s.tokens, verbs);
    if (groups.empty()) continue;
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      if (!is_asset_tag(s.tokens[i])) continue;
      const VerbGroup* best = nullptr;
      std::size_t best_dist = 0;
      bool best_following = false;
      for (const auto& g : groups) {
        std::size_t dist;
        bool following;
        if (g.first > i) {
          dist = g.first - i - 1;
          following = true;
        } else if (g.last < i) {
          dist = i - g.last - 1;
          following = false;
        } else {
          continue;  // asset inside a group cannot happen (tags are not verbs)
        }
        bool better = best == nullptr || dist < best_dist ||
                      (dist == best_dist && following && !best_following);
        if (better) {
          best = &g;
          best_dist = dist;
          best_following = following;
        }
      }
      if (best == nullptr) continue;
      const TenseTag tense = detect_tense(best->tokens, verbs);
      const bool subject = i < best->first;
      if (subject) f.at(1, 0, tense) += 1;
      f.at(1, 1, tense) += 1;
    }
  }
  detail::finalize_globals(f);
}

// Percentage and other-number counts over the pre-tag text of a unit.
inline std::pair<int, int> numerical_features(std::string_view text) {
  int nums = 0, pcts = 0;
  const std::vector<Token> toks = word_tokens(text);
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (!detail::pure_numeric(toks[i].text)) continue;
    bool pct = toks[i].end < text.size() && text[toks[i].end] == '%';
    if (!pct && i + 1 < toks.size()) {
      std::string nxt = to_lower(toks[i + 1].text);
      if (nxt == "percent" || nxt == "percentage") pct = true;
    }
    if (pct) ++pcts;
    else ++nums;
  }
  return {nums, pcts};
}

// --- textual features --------------------------------------------------------

struct TextualFeatureConfig {
  double mindf = 0.0;   // drop features with document frequency < mindf (fraction)
  double maxdf = 0.30;  // drop features with document frequency > maxdf (fraction)
  std::size_t ngram_min = 2;
  std::size_t ngram_max = 4;
  std::size_t max_features = 10000;
  bool word_tokens_family = true;
  bool word_grams_family = true;
  bool char_grams_family = true;

  void validate() const {
    if (mindf > maxdf) throw ConfigError("textual features: mindf > maxdf");
    if (ngram_min < 1 || ngram_max < ngram_min)
      throw ConfigError("textual features: invalid ngram range");
  }
};

// Lowercases and strips punctuation / non-ASCII symbols, the pre-processing
// the classifier input gets.
inline std::string preprocess_for_features(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool space = false;
  for (char c : text) {
    if (ascii_alnum(c)) {
      if (space && !out.empty()) out.push_back(' ');
      space = false;
      out.push_back(ascii_tolower(c));
    } else {
      space = true;
    }
  }
  return out;
}

namespace detail {

inline void count_textual(const std::string& pre, const TextualFeatureConfig& cfg,
                          std::map<std::string, double>& counts) {
  std::vector<std::string> words;
  std::istringstream iss(pre);
  std::string w;
  while (iss >> w) words.push_back(w);
  if (cfg.word_tokens_family)
    for (const auto& t : words) counts["w1:" + t] += 1;
  if (cfg.word_grams_family)
    for (std::size_t n = cfg.ngram_min; n <= cfg.ngram_max; ++n)
      for (std::size_t i = 0; i + n <= words.size(); ++i) {
        std::string key = "w" + std::to_string(n) + ":";
        for (std::size_t k = 0; k < n; ++k) {
          if (k > 0) key += ' ';
          key += words[i + k];
        }
        counts[key] += 1;
      }
  if (cfg.char_grams_family)
    for (const auto& t : words)
      for (std::size_t n = cfg.ngram_min; n <= cfg.ngram_max; ++n)
        for (std::size_t i = 0; i + n <= t.size(); ++i)
          counts["c" + std::to_string(n) + ":" + t.substr(i, n)] += 1;
}

}  // namespace detail

// Fitted textual vocabulary: document-frequency filtering then a corpus
// frequency cap with lexicographic tie-breaks.
class TextualVocabulary {
 public:
  TextualFeatureConfig config;
  std::vector<std::string> features;                    // index -> name
  std::unordered_map<std::string, std::size_t> index;

  bool fitted() const { return fitted_; }

  static TextualVocabulary fit(const std::vector<std::string>& texts,
                               const TextualFeatureConfig& cfg) {
    cfg.validate();
    TextualVocabulary v;
    v.config = cfg;
    std::map<std::string, double> total;   // corpus frequency
    std::map<std::string, std::size_t> df; // document frequency
    for (const auto& text : texts) {
      std::map<std::string, double> counts;
      detail::count_textual(preprocess_for_features(text), cfg, counts);
      for (const auto& [k, c] : counts) {
        total[k] += c;
        df[k] += 1;
      }
    }
    const double n_docs = static_cast<double>(texts.size());
    std::vector<std::pair<std::string, double>> kept;
    for (const auto& [k, c] : total) {
      double frac = n_docs > 0 ? static_cast<double>(df[k]) / n_docs : 0;
      if (frac > cfg.maxdf || frac < cfg.mindf) continue;
      kept.emplace_back(k, c);
    }
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    if (kept.size() > cfg.max_features) kept.resize(cfg.max_features);
    std::sort(kept.begin(), kept.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [k, c] : kept) {
      v.index[k] = v.features.size();
      v.features.push_back(k);
    }
    v.fitted_ = true;
    return v;
  }

  // Rebuilds a fitted vocabulary from serialized feature names.
  static TextualVocabulary restore(std::vector<std::string> feats,
                                   const TextualFeatureConfig& cfg) {
    TextualVocabulary v;
    v.config = cfg;
    v.features = std::move(feats);
    for (std::size_t i = 0; i < v.features.size(); ++i) v.index[v.features[i]] = i;
    v.fitted_ = true;
    return v;
  }

  std::vector<double> transform(const std::string& text) const {
    if (!fitted_) throw Error("textual vocabulary used before fitting");
    std::vector<double> out(features.size(), 0.0);
    std::map<std::string, double> counts;
    detail::count_textual(preprocess_for_features(text), config, counts);
    for (const auto& [k, c] : counts) {
      auto it = index.find(k);
      if (it != index.end()) out[it->second] = c;
    }
    return out;
  }

 private:
  bool fitted_ = false;
};

// --- chi-squared selection ---------------------------------------------------

// Per-feature chi2 statistic of observed class-conditional sums against the
// expectation from class priors. Requires non-negative features and at least
// two distinct labels.
inline std::vector<double> chi2_scores(const std::vector<std::vector<double>>& X,
                                       const std::vector<int>& y) {
  if (X.empty() || X.size() != y.size()) throw Error("chi2: shape mismatch");
  std::set<int> classes(y.begin(), y.end());
  if (classes.size() < 2) throw DataError("chi2: labels have zero variance");
  const std::size_t n_feat = X[0].size();
  std::map<int, double> class_n;
  for (int c : y) class_n[c] += 1;
  const double n = static_cast<double>(y.size());

  std::vector<double> scores(n_feat, 0.0);
  for (std::size_t f = 0; f < n_feat; ++f) {
    std::map<int, double> observed;
    double feat_total = 0;
    for (std::size_t i = 0; i < X.size(); ++i) {
      if (X[i][f] < 0) throw Error("chi2: negative feature value");
      observed[y[i]] += X[i][f];
      feat_total += X[i][f];
    }
    if (feat_total <= 0) continue;
    double stat = 0;
    for (int c : classes) {
      double expected = feat_total * class_n[c] / n;
      double diff = observed[c] - expected;
      if (expected > 0) stat += diff * diff / expected;
    }
    scores[f] = stat;
  }
  return scores;
}

// Keeps the top (100-percentile)% of features by chi2 score (ties broken by
// index); percentile 100 keeps exactly the features with nonzero score.
inline std::vector<std::size_t> chi2_select(const std::vector<std::vector<double>>& X,
                                            const std::vector<int>& y, double percentile) {
  if (!(percentile > 0 && percentile <= 100))
    throw ConfigError("chi2: percentile must be in (0,100]");
  const std::vector<double> scores = chi2_scores(X, y);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  std::vector<std::size_t> kept;
  if (percentile == 100.0) {
    for (std::size_t f = 0; f < scores.size(); ++f)
      if (scores[f] > 0) kept.push_back(f);
    return kept;
  }
  const std::size_t k = static_cast<std::size_t>(std::ceil(
      static_cast<double>(scores.size()) * (100.0 - percentile) / 100.0));
  for (std::size_t i = 0; i < std::min(k, order.size()); ++i) kept.push_back(order[i]);
  std::sort(kept.begin(), kept.end());
  return kept;
}

// --- linear classifier -------------------------------------------------------

struct ClassifierConfig {
  double C = 0.001;
  std::size_t max_iter = 1500;
  double tol = 1e-9;
  double chi2_percentile = 80;
  bool balanced = true;
  std::uint64_t seed = 1;

  void validate() const {
    if (C <= 0) throw ConfigError("classifier: C must be positive");
    if (!(chi2_percentile > 0 && chi2_percentile <= 100))
      throw ConfigError("classifier: chi2 percentile must be in (0,100]");
  }
};

// One-vs-rest linear model: per-class weight vector + bias over the selected
// feature space.
struct LinearModel {
  std::vector<int> classes;
  std::vector<std::vector<double>> weights;  // per class
  std::vector<double> bias;                  // per class
  ClassifierConfig config;
};

// Balanced per-class sample weights: n_samples / (n_classes * n_c).
inline std::map<int, double> balanced_class_weights(const std::vector<int>& y) {
  std::map<int, double> counts;
  for (int c : y) counts[c] += 1;
  std::map<int, double> w;
  const double n = static_cast<double>(y.size());
  const double k = static_cast<double>(counts.size());
  for (const auto& [c, nc] : counts) w[c] = n / (k * nc);
  return w;
}

namespace detail {

// L2-regularized squared-hinge objective and gradient for one binary
// subproblem, y in {-1,+1}, per-sample weights s.
struct SquaredHinge {
  const std::vector<std::vector<double>>& X;
  const std::vector<double>& y;
  const std::vector<double>& s;
  double C;

  double value(const std::vector<double>& w, double b) const {
    double obj = 0;
    for (double wi : w) obj += 0.5 * wi * wi;
    for (std::size_t i = 0; i < X.size(); ++i) {
      double z = b;
      for (std::size_t f = 0; f < w.size(); ++f) z += w[f] * X[i][f];
      double m = 1.0 - y[i] * z;
      if (m > 0) obj += C * s[i] * m * m;
    }
    return obj;
  }

  void gradient(const std::vector<double>& w, double b, std::vector<double>& gw,
                double& gb) const {
    gw.assign(w.size(), 0.0);
    for (std::size_t f = 0; f < w.size(); ++f) gw[f] = w[f];
    gb = 0;
    for (std::size_t i = 0; i < X.size(); ++i) {
      double z = b;
      for (std::size_t f = 0; f < w.size(); ++f) z += w[f] * X[i][f];
      double m = 1.0 - y[i] * z;
      if (m > 0) {
        double coef = -2.0 * C * s[i] * y[i] * m;
        for (std::size_t f = 0; f < w.size(); ++f) gw[f] += coef * X[i][f];
        gb += coef;
      }
    }
  }
};

// Deterministic full-batch gradient descent with Armijo backtracking.
inline void minimize(const SquaredHinge& obj, std::vector<double>& w, double& b,
                     std::size_t max_iter, double tol) {
  double f = obj.value(w, b);
  std::vector<double> gw;
  double gb = 0;
  double step = 1.0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    obj.gradient(w, b, gw, gb);
    double gnorm2 = gb * gb;
    for (double g : gw) gnorm2 += g * g;
    if (gnorm2 < tol * tol) break;
    step *= 2.0;  // allow the step to grow back after cautious iterations
    std::vector<double> w2(w.size());
    double b2 = 0, f2 = 0;
    for (;;) {
      for (std::size_t k = 0; k < w.size(); ++k) w2[k] = w[k] - step * gw[k];
      b2 = b - step * gb;
      f2 = obj.value(w2, b2);
      if (f2 <= f - 0.25 * step * gnorm2 || step < 1e-18) break;
      step *= 0.5;
    }
    double delta = f - f2;
    w = std::move(w2);
    b = b2;
    f = f2;
    if (delta >= 0 && delta < tol) break;
  }
}

}  // namespace detail

// Trains one-vs-rest L2-regularized squared-hinge classifiers. Deterministic
// for fixed inputs; the seed is recorded for provenance.
inline LinearModel train_classifier(const std::vector<std::vector<double>>& X,
                                    const std::vector<int>& y, const ClassifierConfig& cfg) {
  cfg.validate();
  if (X.empty() || X.size() != y.size()) throw Error("classifier: shape mismatch");
  std::set<int> classes(y.begin(), y.end());
  if (classes.size() < 2) throw DataError("classifier: training data has a single class");

  LinearModel model;
  model.config = cfg;
  std::map<int, double> cw;
  if (cfg.balanced) cw = balanced_class_weights(y);
  const std::size_t n_feat = X[0].size();

  for (int c : classes) {
    std::vector<double> ybin(y.size());
    std::vector<double> s(y.size(), 1.0);
    for (std::size_t i = 0; i < y.size(); ++i) {
      ybin[i] = y[i] == c ? 1.0 : -1.0;
      if (cfg.balanced) s[i] = cw.at(y[i]);
    }
    detail::SquaredHinge obj{X, ybin, s, cfg.C};
    std::vector<double> w(n_feat, 0.0);
    double b = 0;
    detail::minimize(obj, w, b, cfg.max_iter, cfg.tol);
    model.classes.push_back(c);
    model.weights.push_back(std::move(w));
    model.bias.push_back(b);
  }
  return model;
}

inline double decision_value(const LinearModel& m, std::size_t class_idx,
                             const std::vector<double>& x) {
  if (x.size() != m.weights[class_idx].size())
    throw Error("classifier: feature dimension mismatch");
  double z = m.bias[class_idx];
  for (std::size_t f = 0; f < x.size(); ++f) z += m.weights[class_idx][f] * x[f];
  return z;
}

// Argmax over per-class decision values; ties break toward the first class.
inline int predict_class(const LinearModel& m, const std::vector<double>& x) {
  int best = m.classes[0];
  double best_z = decision_value(m, 0, x);
  for (std::size_t k = 1; k < m.classes.size(); ++k) {
    double z = decision_value(m, k, x);
    if (z > best_z) {
      best_z = z;
      best = m.classes[k];
    }
  }
  return best;
}

}  // namespace finnews
