#include "finnews/tagger.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "finnews/corpus.hpp"

#ifndef FINNEWS_DATA_DIR
#define FINNEWS_DATA_DIR "data"
#endif

using namespace finnews;

namespace {

Lexicon paper_lexicon() {
  Lexicon lex;
  lex.add("Verizon Communications", LexCategory::Ticker, "VZ");
  lex.add("Verizon", LexCategory::Ticker, "VZ");
  lex.add("VZ", LexCategory::TickerAbbrev, "VZ");
  lex.add("NYSE", LexCategory::StockMarket, "NYSE");
  lex.add("P/E", LexCategory::FinAbbrev, "PE_RATIO");
  lex.add("Q2", LexCategory::FinAbbrev, "Q2");
  lex.add("GAAP", LexCategory::FinAbbrev, "GAAP");
  lex.add("EBITDA", LexCategory::FinAbbrev, "EBITDA");
  lex.add("FCF", LexCategory::FinAbbrev, "FCF");
  return lex;
}

Gazetteers small_gazetteers() {
  Gazetteers g;
  g.add("New York", TagCategory::LOC);
  g.add("Warren Buffett", TagCategory::PERSON);
  g.add("Federal Reserve", TagCategory::ORG);
  return g;
}

}  // namespace

TEST_CASE("tag_financial: the Verizon example") {
  auto lex = paper_lexicon();
  CHECK(tag_financial("Verizon Communications (NYSE:VZ)", lex) ==
        "TICKER (STOCK:TICKER_ABR)");
}

TEST_CASE("tag_financial: P/E becomes FIN_ABR") {
  auto lex = paper_lexicon();
  CHECK(tag_financial("own P/E ratio history", lex) == "own FIN_ABR ratio history");
}

TEST_CASE("tag_financial: text without hits is unchanged") {
  auto lex = paper_lexicon();
  const std::string s = "The weather stayed calm across the region";
  CHECK(tag_financial(s, lex) == s);
}

TEST_CASE("tag_financial: definite keyword phrases become TICKER") {
  auto lex = paper_lexicon();
  CHECK(tag_financial("The company reported earnings", lex) == "TICKER reported earnings");
  CHECK(tag_financial("the manufacturer expanded output", lex) == "TICKER expanded output");
  // indefinite keyword stays, mirroring the paper's own tagged example
  CHECK(tag_financial("a stable but undervalued company in the market", lex) ==
        "a stable but undervalued company in the market");
}

TEST_CASE("tag_financial: hyphenated compounds expose abbreviations") {
  auto lex = paper_lexicon();
  CHECK(tag_financial("on a non-GAAP adjusted basis", lex) == "on a non-FIN_ABR adjusted basis");
}

TEST_CASE("tag_numeric_dates: percentages and money become NUM") {
  CHECK(tag_numeric_dates("worth at least 55% more") == "worth at least NUM more");
  CHECK(tag_numeric_dates("was $1.18 per share") == "was NUM per share");
  CHECK(tag_numeric_dates("an increase of 74.1 percent year over year") ==
        "an increase of NUM percent year over year");
  CHECK(tag_numeric_dates("of $23.6 billion rose") == "of NUM billion rose");
}

TEST_CASE("tag_numeric_dates: dates and years become DATE") {
  CHECK(tag_numeric_dates("on July 24") == "on DATE");
  CHECK(tag_numeric_dates("on July 24, 2020 it held") == "on DATE it held");
  CHECK(tag_numeric_dates("first-half 2020 cash flow") == "first-half DATE cash flow");
  CHECK(tag_numeric_dates("met at 3:30 pm") == "met at DATE");
}

TEST_CASE("tag_numeric_dates: plain words survive") {
  const std::string s = "next year the outlook improves";
  CHECK(tag_numeric_dates(s) == s);
}

TEST_CASE("tag_proper_names: financial lexica take priority") {
  auto lex = paper_lexicon();
  auto gaz = small_gazetteers();
  CHECK(tag_proper_names("Verizon rose", lex, gaz) == "TICKER rose");
}

TEST_CASE("tag_proper_names: gazetteer categories apply") {
  auto lex = paper_lexicon();
  auto gaz = small_gazetteers();
  CHECK(tag_proper_names("offices in New York opened", lex, gaz) == "offices in LOC opened");
  CHECK(tag_proper_names("Warren Buffett bought more", lex, gaz) == "PERSON bought more");
  CHECK(tag_proper_names("the Federal Reserve met", lex, gaz) == "the ORG met");
}

TEST_CASE("tag_proper_names: unmatched names stay verbatim") {
  auto lex = paper_lexicon();
  auto gaz = small_gazetteers();
  const std::string s = "according to Barron’s magazine";
  CHECK(tag_proper_names(s, lex, gaz) == s);
}

TEST_CASE("tag_sentence reproduces the paper's full tagged example") {
  auto lex = paper_lexicon();
  Gazetteers gaz;  // the example needs no entity gazetteer
  const std::string before =
      "Verizon Communications (NYSE:VZ) is proving to be a stable but undervalued company in "
      "the market today. In fact, VZ stock is worth at least 55% more than VZ stock price "
      "today using an analysis of VZ stock dividend yield, VZ stock own P/E ratio history, "
      "and a comparison with VZ stock peers.";
  const std::string after =
      "TICKER (STOCK:TICKER_ABR) is proving to be a stable but undervalued company in "
      "the market today. In fact, TICKER_ABR stock is worth at least NUM more than TICKER_ABR "
      "stock price today using an analysis of TICKER_ABR stock dividend yield, TICKER_ABR "
      "stock own FIN_ABR ratio history, and a comparison with TICKER_ABR stock peers.";
  TaggedSentence ts = tag_sentence(before, lex, gaz);
  CHECK(ts.tagged == after);
  CHECK(ts.original == before);
}

TEST_CASE("tag_sentence: empty input") {
  auto lex = paper_lexicon();
  Gazetteers gaz;
  TaggedSentence ts = tag_sentence("", lex, gaz);
  CHECK(ts.tokens.empty());
  CHECK(ts.tagged.empty());
}

TEST_CASE("tag_sentence: a sentence of numbers is all NUM") {
  auto lex = paper_lexicon();
  Gazetteers gaz;
  TaggedSentence ts = tag_sentence("12.3 55% $1.18", lex, gaz);
  REQUIRE(ts.tokens.size() == 3);
  for (const auto& t : ts.tokens) CHECK(t.category == TagCategory::NUM);
}

TEST_CASE("tagging is idempotent") {
  auto lex = paper_lexicon();
  auto gaz = small_gazetteers();
  const std::string text =
      "Verizon Communications (NYSE:VZ) reported $1.18 per share on July 24. The company "
      "grew 3% in New York.";
  const std::string once = tag_text(text, lex, gaz);
  CHECK(tag_text(once, lex, gaz) == once);
}

TEST_CASE("significant-tag count covers STOCK, TICKER, CURRENCY, FIN_ABR only") {
  auto lex = paper_lexicon();
  Gazetteers gaz;
  TaggedSentence ts = tag_sentence("Verizon Communications (NYSE:VZ) beat Q2 at 55%", lex, gaz);
  // TICKER + STOCK + FIN_ABR are significant; TICKER_ABR and NUM are not
  CHECK(significant_tag_count(ts) == 3);
}

TEST_CASE("financial and numeric stages commute on the bundled sample corpus") {
  Lexicon lex = load_lexicon({std::string(FINNEWS_DATA_DIR) + "/lexicons/stocks.csv",
                              std::string(FINNEWS_DATA_DIR) + "/lexicons/tickers.csv",
                              std::string(FINNEWS_DATA_DIR) + "/lexicons/currencies.csv",
                              std::string(FINNEWS_DATA_DIR) + "/lexicons/finabbrev.csv"});
  auto corpus = load_corpus(std::string(FINNEWS_DATA_DIR) + "/sample/corpus.jsonl");
  REQUIRE(corpus.size() == 10);
  for (const NewsItem& item : corpus) {
    for (const Sentence& s : split_sentences(item.body)) {
      const std::string fin_then_num = tag_numeric_dates(tag_financial(s.text, lex));
      const std::string num_then_fin = tag_financial(tag_numeric_dates(s.text), lex);
      CHECK(fin_then_num == num_then_fin);
    }
  }
}
