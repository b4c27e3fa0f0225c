#include "finnews/baseline.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace finnews;

namespace {

VerbLexicon test_verbs() {
  VerbLexicon v;
  v.bases = {"rise", "fall", "report", "say", "hit",   "grow",  "pay",    "expect",
             "trade", "double", "beat", "gain", "hold", "drop",  "recover", "guide", "go"};
  v.irregular_past = {"rose", "fell", "said", "hit", "grew", "was", "were", "had"};
  return v;
}

// Builds a TaggedSentence from already-tagged text.
TaggedSentence tagged(const std::string& text) {
  TaggedSentence ts;
  ts.original = text;
  ts.tagged = text;
  for (const Token& t : word_tokens(text))
    ts.tokens.push_back(TaggedToken{t.text, tag_from_token(t.text)});
  return ts;
}

}  // namespace

TEST_CASE("rule_relevant needs a financial tag and a NUM tag") {
  CHECK(rule_relevant(tagged("TICKER earnings were NUM")));
  CHECK_FALSE(rule_relevant(tagged("The market was calm")));
  CHECK_FALSE(rule_relevant(tagged("TICKER rose sharply")));
  CHECK(rule_relevant(tagged("TICKER_ABR slipped NUM")));  // TICKER_ABR counts here
  CHECK_FALSE(rule_relevant(tagged("revenue was NUM")));
}

TEST_CASE("rule_relevant depends only on the tag multiset") {
  auto a = tagged("TICKER earnings were NUM");
  auto b = tagged("NUM earnings were TICKER");
  CHECK(rule_relevant(a) == rule_relevant(b));
}

TEST_CASE("rule_predictive: future main verb") {
  auto v = test_verbs();
  CHECK(rule_predictive(tagged("TICKER will hit NUM"), v));
  CHECK_FALSE(rule_predictive(tagged("TICKER hit NUM"), v));
  CHECK_FALSE(rule_predictive(tagged("Analysts said TICKER will hit NUM"), v));
}

TEST_CASE("rule_predictive: hand-parsed main-clause selection on 20 sentences") {
  auto v = test_verbs();
  const std::vector<std::pair<const char*, bool>> cases = {
      {"TICKER will hit NUM", true},
      {"TICKER hit NUM", false},
      {"Analysts said TICKER will hit NUM", false},
      {"TICKER will rise, but TICKER fell", true},
      {"TICKER fell, but TICKER will rise", false},
      {"TICKER is going to rise", true},
      {"TICKER says earnings will grow", false},
      {"TICKER reported NUM and TICKER will rise", false},
      {"TICKER will pay NUM dividends next year", true},
      {"Investors expect TICKER to rise", false},
      {"TICKER was down NUM", false},
      {"TICKER will not fall", true},
      {"The market rose while TICKER will fall", false},
      {"TICKER trades at NUM", false},
      {"TICKER shall rise", true},
      {"Shares of TICKER will double", true},
      {"TICKER grew NUM since DATE", false},
      {"TICKER will beat estimates, analysts said", true},
      {"If demand holds, TICKER will gain NUM", false},
      {"TICKER dropped NUM and will recover", false},
  };
  for (const auto& [text, want] : cases) {
    INFO(text);
    CHECK(rule_predictive(tagged(text), v) == want);
  }
}

TEST_CASE("span projection: >50% of characters inside a span") {
  Sentence s{"0123456789", 0, 10};
  // fully inside
  CHECK(sentence_covered(s, {Span{0, 10, SpanLabel::Relevant}}, SpanLabel::Relevant));
  // 40% overlap
  CHECK_FALSE(sentence_covered(s, {Span{0, 4, SpanLabel::Relevant}}, SpanLabel::Relevant));
  // 60% overlap
  CHECK(sentence_covered(s, {Span{0, 6, SpanLabel::Relevant}}, SpanLabel::Relevant));
  // exactly 50% is not enough
  CHECK_FALSE(sentence_covered(s, {Span{0, 5, SpanLabel::Relevant}}, SpanLabel::Relevant));
}

TEST_CASE("supervised extractor separates an easy synthetic set") {
  std::vector<std::string> texts;
  std::vector<bool> labels;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 40; ++i) {
    if (i % 2 == 0) {
      texts.push_back("ticker earnings grew " + std::to_string(rng() % 90) + " percent");
      labels.push_back(true);
    } else {
      texts.push_back("the council debated road permits again " + std::to_string(i));
      labels.push_back(false);
    }
  }
  TextualFeatureConfig tcfg;
  tcfg.maxdf = 1.0;
  ClassifierConfig ccfg;
  SupervisedExtractor m = train_supervised_extractor(texts, labels, tcfg, ccfg);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < texts.size(); ++i)
    if (supervised_classify(m, texts[i]) == labels[i]) ++hits;
  CHECK(static_cast<double>(hits) / static_cast<double>(texts.size()) >= 0.99);
}

TEST_CASE("supervised extractor rejects single-class data") {
  TextualFeatureConfig tcfg;
  tcfg.maxdf = 1.0;
  CHECK_THROWS_AS(
      train_supervised_extractor({"a b", "c d"}, {true, true}, tcfg, ClassifierConfig{}),
      DataError);
}

TEST_CASE("baseline shares the tagger with the pipeline") {
  Lexicon lex;
  lex.add("Verizon", LexCategory::Ticker, "VZ");
  lex.add("VZ", LexCategory::TickerAbbrev, "VZ");
  Gazetteers gaz;
  const std::string sentence = "Verizon gained 3% while VZ volume doubled.";
  TaggedSentence a = tag_sentence(sentence, lex, gaz);
  TaggedSentence b = tag_sentence(sentence, lex, gaz);
  CHECK(a.tagged == b.tagged);
  REQUIRE(a.tokens.size() == b.tokens.size());
  for (std::size_t i = 0; i < a.tokens.size(); ++i) {
    CHECK(a.tokens[i].surface == b.tokens[i].surface);
    CHECK(a.tokens[i].category == b.tokens[i].category);
  }
}
