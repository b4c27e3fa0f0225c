#pragma once

// Shared low-level text helpers: ASCII case folding, UTF-8-aware word
// scanning, and small parsing utilities used across the pipeline stages.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace finnews {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input files, broken invariants in loaded data.
class DataError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration values or usage.
class ConfigError : public Error {
 public:
  using Error::Error;
};

inline bool ascii_alpha(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}
inline bool ascii_digit(char c) { return c >= '0' && c <= '9'; }
inline bool ascii_alnum(char c) { return ascii_alpha(c) || ascii_digit(c); }
inline bool ascii_upper(char c) { return c >= 'A' && c <= 'Z'; }
inline char ascii_tolower(char c) {
  return ascii_upper(c) ? static_cast<char>(c - 'A' + 'a') : c;
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = ascii_tolower(c);
  return out;
}

inline bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (ascii_tolower(a[i]) != ascii_tolower(b[i])) return false;
  return true;
}

inline std::string_view trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// U+2019 right single quote, the apostrophe variant news text actually uses.
inline bool is_curly_apostrophe(std::string_view s, std::size_t i) {
  return i + 2 < s.size() && static_cast<unsigned char>(s[i]) == 0xE2 &&
         static_cast<unsigned char>(s[i + 1]) == 0x80 &&
         static_cast<unsigned char>(s[i + 2]) == 0x99;
}

inline bool utf8_cont(char c) { return (static_cast<unsigned char>(c) & 0xC0) == 0x80; }

namespace detail {

inline bool word_char(char c) {
  return ascii_alnum(c) || c == '\'' || c == '&' || c == '/' || c == '-' || c == '_';
}

// Returns the byte length of a word-character run starting at p, or 0 if
// text[p] separates. '.' and ',' are handled by the caller (contextual).
inline std::size_t word_char_len(std::string_view text, std::size_t p) {
  if (p >= text.size()) return 0;
  char c = text[p];
  if (word_char(c)) return 1;
  if (is_curly_apostrophe(text, p)) return 3;
  unsigned char u = static_cast<unsigned char>(c);
  if (u >= 0x80) {
    if (u == 0xE2) return 0;  // general punctuation block (quotes, dashes)
    std::size_t len = 1;
    while (p + len < text.size() && utf8_cont(text[p + len])) ++len;
    return len;
  }
  return 0;
}

}  // namespace detail

struct Token {
  std::string text;
  std::size_t begin = 0;  // byte offset into the scanned string
  std::size_t end = 0;    // one past the last byte
};

// Splits text into word-like tokens. '.' and ',' join a token when flanked
// by word characters ("U.S.", "23,600", "1.18"); a trailing dot stays only
// in dotted abbreviations ("U.S."). Curly apostrophes join ("Barron’s");
// other multi-byte punctuation splits, accented letters join.
inline std::vector<Token> word_tokens(std::string_view text) {
  std::vector<Token> out;
  const std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n) {
    std::size_t w = detail::word_char_len(text, i);
    if (w == 0) {
      ++i;
      continue;
    }
    const std::size_t b = i;
    i += w;
    while (i < n) {
      std::size_t adv = detail::word_char_len(text, i);
      if (adv > 0) {
        i += adv;
      } else if ((text[i] == '.' || text[i] == ',') &&
                 detail::word_char_len(text, i + 1) > 0) {
        ++i;  // internal punctuation: "U.S", "1.18", "23,600"
      } else if (text[i] == '.' && i >= 2 && text[i - 2] == '.') {
        ++i;  // closing dot of a dotted abbreviation: "U.S."
        break;
      } else {
        break;
      }
    }
    out.push_back(Token{std::string(text.substr(b, i - b)), b, i});
  }
  return out;
}

// FNV-1a, used to derive deterministic per-sentence seeds.
inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 1469598103934665603ULL) {
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::uint64_t fnv1a(const std::vector<std::string>& parts,
                           std::uint64_t h = 1469598103934665603ULL) {
  for (const auto& p : parts) {
    h = fnv1a(p, h);
    h ^= 0x1F;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace finnews
