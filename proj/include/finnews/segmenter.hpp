#pragma once

// TextTiling: multi-paragraph topic segmentation via lexical cohesion dips
// between adjacent token blocks, with boundaries snapped to sentence ends.

#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "finnews/corpus.hpp"
#include "finnews/text.hpp"

namespace finnews {

struct TextTilingConfig {
  std::size_t w = 20;                // pseudo-sentence size in tokens
  std::size_t k = 10;                // block size in pseudo-sentences
  std::size_t smoothing_width = 2;   // moving-average window is width+1
  std::size_t smoothing_rounds = 1;
  std::size_t min_chars = 500;       // below this, the body stays one segment

  void validate() const {
    if (w < 1 || k < 1) throw ConfigError("texttiling: w and k must be >= 1");
  }
};

struct Segment {
  std::string news_id;
  std::size_t index = 0;
  std::size_t first_sentence = 0;  // half-open range into the sentence list
  std::size_t end_sentence = 0;
  std::string text;  // concatenated sentence slices
};

// Lowercase alphanumeric tokens with original character positions,
// stop-words removed.
inline std::vector<Token> tiling_tokenize(std::string_view text,
                                          const std::unordered_set<std::string>& stopwords) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    if (!ascii_alnum(text[i])) {
      ++i;
      continue;
    }
    std::size_t b = i;
    while (i < n && ascii_alnum(text[i])) ++i;
    std::string tok = to_lower(text.substr(b, i - b));
    if (stopwords.count(tok) == 0) out.push_back(Token{std::move(tok), b, i});
  }
  return out;
}

namespace detail {

inline double cosine(const std::unordered_map<std::string, double>& a,
                     const std::unordered_map<std::string, double>& b) {
  double dot = 0, na = 0, nb = 0;
  for (const auto& [w, c] : a) {
    na += c * c;
    auto it = b.find(w);
    if (it != b.end()) dot += c * it->second;
  }
  for (const auto& [w, c] : b) nb += c * c;
  if (na == 0 || nb == 0) return 0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace detail

// Groups tokens into w-sized pseudo-sentences (final partial block kept) and
// scores each gap with the block-comparison cosine over the k blocks before
// vs after, truncated at the edges. Fewer than two pseudo-sentences yield an
// empty score list.
inline std::vector<double> gap_scores(const std::vector<Token>& tokens,
                                      const TextTilingConfig& cfg) {
  cfg.validate();
  const std::size_t n_ps = (tokens.size() + cfg.w - 1) / cfg.w;
  if (n_ps < 2) return {};
  std::vector<std::unordered_map<std::string, double>> ps(n_ps);
  for (std::size_t t = 0; t < tokens.size(); ++t) ps[t / cfg.w][tokens[t].text] += 1.0;

  std::vector<double> scores(n_ps - 1, 0.0);
  for (std::size_t gap = 0; gap + 1 < n_ps; ++gap) {
    std::unordered_map<std::string, double> left, right;
    std::size_t lb = gap + 1 >= cfg.k ? gap + 1 - cfg.k : 0;
    for (std::size_t p = lb; p <= gap; ++p)
      for (const auto& [w, c] : ps[p]) left[w] += c;
    std::size_t re = std::min(n_ps, gap + 1 + cfg.k);
    for (std::size_t p = gap + 1; p < re; ++p)
      for (const auto& [w, c] : ps[p]) right[w] += c;
    scores[gap] = detail::cosine(left, right);
  }
  return scores;
}

// Moving average with window (width+1), centered and truncated at the edges,
// applied `rounds` times. Length is preserved.
inline std::vector<double> smooth(std::vector<double> scores, std::size_t width,
                                  std::size_t rounds) {
  if (scores.empty() || width == 0) return scores;
  const std::size_t window = width + 1;
  const std::size_t left = window / 2;
  const std::size_t right = window - left - 1;
  for (std::size_t r = 0; r < rounds; ++r) {
    std::vector<double> next(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
      std::size_t b = i >= left ? i - left : 0;
      std::size_t e = std::min(scores.size() - 1, i + right);
      double sum = 0;
      for (std::size_t j = b; j <= e; ++j) sum += scores[j];
      next[i] = sum / static_cast<double>(e - b + 1);
    }
    scores = std::move(next);
  }
  return scores;
}

// Depth scoring and boundary selection. depth(i) sums the climbs to the
// nearest left and right peaks; a gap qualifies only when both climbs are
// strictly positive (a true valley) and its depth exceeds mean - stddev/2.
// Boundaries closer than 3 pseudo-sentences apart keep only the deeper one.
inline std::vector<std::size_t> depth_and_boundaries(const std::vector<double>& scores) {
  const std::size_t n = scores.size();
  if (n == 0) return {};
  std::vector<double> depth(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double lpeak = scores[i];
    for (std::size_t j = i; j-- > 0;) {
      if (scores[j] >= lpeak) lpeak = scores[j];
      else break;
    }
    double rpeak = scores[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      if (scores[j] >= rpeak) rpeak = scores[j];
      else break;
    }
    double dl = lpeak - scores[i];
    double dr = rpeak - scores[i];
    depth[i] = (dl > 0 && dr > 0) ? dl + dr : 0.0;
  }
  double mean = std::accumulate(depth.begin(), depth.end(), 0.0) / static_cast<double>(n);
  double var = 0;
  for (double d : depth) var += (d - mean) * (d - mean);
  var /= static_cast<double>(n);
  const double cutoff = mean - std::sqrt(var) / 2.0;

  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < n; ++i)
    if (depth[i] > 0 && depth[i] > cutoff) candidates.push_back(i);

  // deepest first; ties by lower index
  std::sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
    if (depth[a] != depth[b]) return depth[a] > depth[b];
    return a < b;
  });
  std::vector<std::size_t> kept;
  for (std::size_t c : candidates) {
    bool close = false;
    for (std::size_t k : kept)
      if ((c > k ? c - k : k - c) < 3) {
        close = true;
        break;
      }
    if (!close) kept.push_back(c);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

// Full segmentation of one news item. Bodies shorter than min_chars, and
// degenerate token streams, yield a single segment covering every sentence.
// Pseudo-sentence boundaries snap to the nearest following sentence end so
// segments never split a sentence.
inline std::vector<Segment> segment(const NewsItem& news,
                                    const std::vector<Sentence>& sentences,
                                    const std::unordered_set<std::string>& stopwords,
                                    const TextTilingConfig& cfg) {
  cfg.validate();
  auto make = [&](std::size_t first, std::size_t end, std::size_t idx) {
    Segment s;
    s.news_id = news.id;
    s.index = idx;
    s.first_sentence = first;
    s.end_sentence = end;
    for (std::size_t i = first; i < end; ++i) s.text += sentences[i].text;
    return s;
  };
  if (sentences.empty()) return {};
  std::vector<std::size_t> sentence_breaks;  // sentence indices after which to cut

  if (news.body.size() >= cfg.min_chars) {
    const std::vector<Token> tokens = tiling_tokenize(news.body, stopwords);
    const std::vector<double> raw = gap_scores(tokens, cfg);
    const std::vector<double> smoothed = smooth(raw, cfg.smoothing_width, cfg.smoothing_rounds);
    const std::vector<std::size_t> gaps = depth_and_boundaries(smoothed);
    for (std::size_t g : gaps) {
      // char position right after the last token of pseudo-sentence g
      std::size_t last_tok = std::min((g + 1) * cfg.w, tokens.size()) - 1;
      std::size_t pos = tokens[last_tok].end;
      // nearest following sentence end
      std::size_t s = 0;
      while (s < sentences.size() && sentences[s].end < pos) ++s;
      if (s + 1 >= sentences.size()) continue;  // never cut after the last sentence
      if (sentence_breaks.empty() || sentence_breaks.back() != s) sentence_breaks.push_back(s);
    }
  }

  std::vector<Segment> out;
  std::size_t first = 0;
  for (std::size_t br : sentence_breaks) {
    out.push_back(make(first, br + 1, out.size()));
    first = br + 1;
  }
  out.push_back(make(first, sentences.size(), out.size()));
  return out;
}

}  // namespace finnews
