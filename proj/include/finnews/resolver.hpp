#pragma once

// Deterministic nearest-antecedent reference resolution: pronouns and
// definite alias nouns are replaced by the closest preceding asset mention
// within the same segment.

#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "finnews/corpus.hpp"
#include "finnews/text.hpp"

namespace finnews {

struct Mention {
  std::string surface;      // matched text
  std::string canonical;    // canonical id from the lexicon
  std::string replacement;  // surface used when substituted for a reference
  std::size_t position = 0; // char offset of the mention start
  std::size_t end = 0;
  LexCategory category = LexCategory::Ticker;
};

using MentionTable = std::vector<Mention>;

struct ResolverConfig {
  std::unordered_set<std::string> pronouns{"it", "its", "they", "their", "them"};
  // pronouns that only resolve to company-like antecedents
  std::unordered_set<std::string> org_only_pronouns{"they", "their"};
  std::vector<std::string> alias_nouns{"the company",     "the firm",
                                       "the stock",       "the shares",
                                       "the enterprise",  "the manufacturer"};

  void validate() const {
    if (pronouns.empty() || alias_nouns.empty())
      throw ConfigError("resolver: pronoun and alias-noun sets must be non-empty");
  }
};

// Lexicon scan over a segment. The replacement surface extends over a
// directly following bare "stock" token, mirroring how asset noun phrases
// read ("VZ stock is worth ..." -> antecedent "VZ stock").
inline MentionTable detect_mentions(std::string_view segment_text, const Lexicon& lexicon) {
  MentionTable out;
  for (const LexMatch& m : lexicon.find_matches(segment_text)) {
    Mention men;
    men.surface = m.surface;
    men.canonical = m.canonical;
    men.position = m.begin;
    men.end = m.end;
    men.category = m.category;
    men.replacement = m.surface;
    std::size_t p = m.end;
    if (p < segment_text.size() && segment_text[p] == ' ' &&
        segment_text.substr(p + 1, 5) == "stock") {
      std::size_t q = p + 6;
      bool boundary = q >= segment_text.size() || !detail::word_char(segment_text[q]);
      if (boundary) {
        men.replacement += " stock";
      }
    }
    out.push_back(std::move(men));
  }
  return out;
}

namespace detail {

struct Reference {
  std::size_t begin;
  std::size_t end;
  bool org_only;
};

inline const Mention* nearest_antecedent(const MentionTable& mentions,
                                         std::size_t ref_pos, bool org_only) {
  // FinAbbrev surfaces (P/E, Q2, EBITDA) are terms, not referents; they
  // never serve as antecedents.
  const Mention* best = nullptr;
  for (const Mention& m : mentions) {
    if (m.position >= ref_pos) break;  // positions strictly increasing
    if (m.category == LexCategory::FinAbbrev) continue;
    best = &m;
  }
  if (best != nullptr && org_only && best->category != LexCategory::Ticker &&
      best->category != LexCategory::TickerAbbrev)
    return nullptr;  // they/their only resolve to company-like antecedents
  return best;
}

}  // namespace detail

// Replaces each reference whose nearest preceding mention exists with that
// mention's replacement surface. `text_offset` is the offset of `text`
// within the segment the mentions were detected on (0 when resolving the
// whole segment at once). References without an antecedent stay unchanged.
inline std::string resolve(std::string_view text, const MentionTable& mentions,
                           const ResolverConfig& cfg, std::size_t text_offset = 0) {
  cfg.validate();
  std::vector<detail::Reference> refs;
  const std::vector<Token> toks = word_tokens(text);
  for (std::size_t i = 0; i < toks.size(); ++i) {
    const std::string low = to_lower(toks[i].text);
    if (cfg.pronouns.count(low) > 0) {
      refs.push_back({toks[i].begin, toks[i].end, cfg.org_only_pronouns.count(low) > 0});
      continue;
    }
    // alias nouns are two-token phrases ("the company")
    for (const std::string& alias : cfg.alias_nouns) {
      auto sp = alias.find(' ');
      if (sp == std::string::npos) continue;
      if (i + 1 >= toks.size()) continue;
      if (iequals(toks[i].text, alias.substr(0, sp)) &&
          iequals(toks[i + 1].text, alias.substr(sp + 1))) {
        refs.push_back({toks[i].begin, toks[i + 1].end, false});
        break;
      }
    }
  }

  std::string out(text);
  for (auto it = refs.rbegin(); it != refs.rend(); ++it) {
    const Mention* m =
        detail::nearest_antecedent(mentions, text_offset + it->begin, it->org_only);
    if (m == nullptr) continue;
    out.replace(it->begin, it->end - it->begin, m->replacement);
  }
  return out;
}

}  // namespace finnews
