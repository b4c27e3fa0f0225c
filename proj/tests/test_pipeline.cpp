#include "finnews/pipeline.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "finnews/systems.hpp"

#ifndef FINNEWS_DATA_DIR
#define FINNEWS_DATA_DIR "data"
#endif

using namespace finnews;

namespace {

const std::string kData = FINNEWS_DATA_DIR;

PipelineConfig sample_config() {
  PipelineConfig cfg = PipelineConfig::load(kData + "/sample/config.toml");
  // the config file uses repo-relative paths; rebase them onto the data dir
  auto rebase = [&](std::string& p) {
    const std::string prefix = "data/";
    if (p.rfind(prefix, 0) == 0) p = kData + "/" + p.substr(prefix.size());
  };
  rebase(cfg.paths.corpus);
  rebase(cfg.paths.lda_train_corpus);
  rebase(cfg.paths.stopwords);
  rebase(cfg.paths.abbreviations);
  rebase(cfg.paths.lexicon_dir);
  rebase(cfg.paths.gazetteer_dir);
  rebase(cfg.paths.verbs);
  rebase(cfg.paths.irregular_verbs);
  rebase(cfg.paths.annotations);
  rebase(cfg.paths.quotes);
  rebase(cfg.paths.temporal_train);
  return cfg;
}

struct SamplePipeline {
  PipelineConfig cfg;
  PipelineResources res;
  std::vector<NewsItem> corpus;
  TrainedModels models;
  std::vector<DetectionResult> results;
};

const SamplePipeline& sample_pipeline() {
  static SamplePipeline* p = [] {
    auto* sp = new SamplePipeline;
    sp->cfg = sample_config();
    sp->res = PipelineResources::load(sp->cfg.paths);
    sp->corpus = load_corpus(sp->cfg.paths.corpus);
    sp->models = train_models(sp->res, sp->cfg);
    sp->results = run_pipeline(sp->corpus, sp->res, sp->cfg, sp->models);
    return sp;
  }();
  return *p;
}

}  // namespace

TEST_CASE("toml subset parser handles the value types") {
  TomlTable t = TomlTable::parse(
      "seed = 7\n"
      "# comment\n"
      "[paths]\n"
      "corpus = \"a/b.jsonl\"  # trailing comment\n"
      "[lda]\n"
      "delta = 0.8\n"
      "flag = true\n"
      "names = [\"x\", \"y z\"]\n");
  CHECK(t.get_number("seed") == 7.0);
  CHECK(t.get_string("paths.corpus") == "a/b.jsonl");
  CHECK(t.get_number("lda.delta") == 0.8);
  CHECK(t.get_bool("lda.flag") == true);
  auto arr = t.get_string_array("lda.names");
  REQUIRE(arr.has_value());
  REQUIRE(arr->size() == 2);
  CHECK((*arr)[1] == "y z");
}

TEST_CASE("toml subset parser rejects malformed lines") {
  CHECK_THROWS_AS(TomlTable::parse("key value\n"), ConfigError);
  CHECK_THROWS_AS(TomlTable::parse("[section\n"), ConfigError);
  CHECK_THROWS_AS(TomlTable::parse("k = \"unterminated\n"), ConfigError);
  CHECK_THROWS_AS(TomlTable::parse("k = nonsense\n"), ConfigError);
}

TEST_CASE("the bundled sample config loads with the documented defaults") {
  PipelineConfig cfg = sample_config();
  CHECK(cfg.texttiling.w == 20);
  CHECK(cfg.texttiling.k == 10);
  CHECK(cfg.texttiling.min_chars == 500);
  CHECK(cfg.lda.passes == 50);
  CHECK(cfg.lda.delta == 0.8);
  CHECK(cfg.lda.alpha.mode == PriorMode::Symmetric);
  CHECK(cfg.lda.beta.mode == PriorMode::Asymmetric);
  CHECK(cfg.classifier.C == 0.001);
  CHECK(cfg.classifier.max_iter == 1500);
  CHECK(cfg.classifier.chi2_percentile == 80);
  CHECK(cfg.textual.maxdf == 0.30);
  CHECK(cfg.textual.ngram_min == 2);
  CHECK(cfg.textual.ngram_max == 4);
  CHECK(cfg.textual.max_features == 10000);
  CHECK(cfg.seed == 1);
}

TEST_CASE("pipeline: stage order is segment, resolve, tag") {
  const auto& sp = sample_pipeline();
  PreparedDocument doc = prepare_document(sp.corpus[0], sp.res, sp.cfg);
  REQUIRE(!doc.tagged.empty());
  // resolution happened before tagging: the possessive "its price" became
  // "VZ stock price" and was then tagged
  bool saw_resolved_tag = false;
  for (const auto& seg : doc.tagged)
    for (const TaggedSentence& ts : seg)
      if (ts.tagged.find("TICKER_ABR stock price") != std::string::npos)
        saw_resolved_tag = true;
  CHECK(saw_resolved_tag);
}

TEST_CASE("pipeline: two runs produce byte-identical results") {
  const auto& sp = sample_pipeline();
  std::vector<DetectionResult> again = run_pipeline(sp.corpus, sp.res, sp.cfg, sp.models);
  CHECK(results_to_json(sp.results).dump(2) == results_to_json(again).dump(2));
}

TEST_CASE("pipeline: training twice is deterministic end to end") {
  const auto& sp = sample_pipeline();
  TrainedModels models2 = train_models(sp.res, sp.cfg);
  std::vector<DetectionResult> results2 = run_pipeline(sp.corpus, sp.res, sp.cfg, models2);
  CHECK(results_to_json(sp.results).dump(2) == results_to_json(results2).dump(2));
}

TEST_CASE("pipeline: every span round-trips against the body") {
  const auto& sp = sample_pipeline();
  std::map<std::string, const NewsItem*> items;
  for (const NewsItem& it : sp.corpus) items[it.id] = &it;
  for (const DetectionResult& r : sp.results) {
    const NewsItem& item = *items.at(r.news_id);
    auto check_spans = [&](const std::vector<ResultSpan>& spans) {
      for (const ResultSpan& s : spans) {
        REQUIRE(s.end <= item.body.size());
        CHECK(item.body.substr(s.start, s.end - s.start) == s.text);
      }
    };
    check_spans(r.relevant_spans);
    check_spans(r.asset_spans);
    check_spans(r.prediction_spans);
  }
}

TEST_CASE("pipeline: prediction spans are a subset of relevant spans") {
  const auto& sp = sample_pipeline();
  for (const DetectionResult& r : sp.results) {
    for (const ResultSpan& p : r.prediction_spans) {
      bool found = false;
      for (const ResultSpan& rel : r.relevant_spans)
        if (rel.start == p.start && rel.end == p.end) found = true;
      CHECK(found);
    }
    CHECK(r.prediction_count == r.prediction_spans.size());
  }
}

TEST_CASE("pipeline: the sub-500-char item stays one segment and completes") {
  const auto& sp = sample_pipeline();
  const NewsItem* brief = nullptr;
  for (const NewsItem& it : sp.corpus)
    if (it.id == "pfe-2020-007") brief = &it;
  REQUIRE(brief != nullptr);
  REQUIRE(brief->body.size() < 500);
  PreparedDocument doc = prepare_document(*brief, sp.res, sp.cfg);
  CHECK(doc.segments.size() == 1);
  for (const DetectionResult& r : sp.results)
    if (r.news_id == "pfe-2020-007") CHECK(r.segment_temporality.size() == 1);
}

TEST_CASE("pipeline: detection finds relevant text and predictions in the sample") {
  const auto& sp = sample_pipeline();
  std::size_t total_relevant = 0, total_predictions = 0;
  for (const DetectionResult& r : sp.results) {
    total_relevant += r.relevant_spans.size();
    total_predictions += r.prediction_spans.size();
  }
  CHECK(total_relevant > 0);
  CHECK(total_predictions > 0);
}

TEST_CASE("results round-trip through the results.json schema") {
  const auto& sp = sample_pipeline();
  auto path = std::filesystem::temp_directory_path() / "results_rt.json";
  save_results(sp.results, path.string());
  std::vector<DetectionResult> back = load_results(path.string());
  CHECK(results_to_json(back).dump() == results_to_json(sp.results).dump());
  std::filesystem::remove(path);
}

TEST_CASE("quote provider lookups") {
  QuoteProvider q = QuoteProvider::load(kData + "/sample/quotes.json");
  auto vz = q.get("VZ");
  REQUIRE(vz.has_value());
  CHECK(vz->price == Catch::Approx(58.94));
  CHECK(vz->currency == "USD");
  CHECK_FALSE(q.get("ZZZZ").has_value());
}

TEST_CASE("quote provider rejects malformed files") {
  auto path = std::filesystem::temp_directory_path() / "bad_quotes.json";
  {
    std::ofstream out(path);
    out << "{ not json";
  }
  CHECK_THROWS_WITH(QuoteProvider::load(path.string()),
                    Catch::Matchers::ContainsSubstring(path.string()));
  std::filesystem::remove(path);
}

TEST_CASE("render_html: empty results render without highlights") {
  NewsItem item;
  item.id = "n1";
  item.title = "Title";
  item.body = "Plain body text.";
  item.author = "a";
  item.source = "s";
  item.published = "2020-01-01";
  DetectionResult r;
  r.news_id = "n1";
  std::string html = render_html({r}, {item});
  CHECK(html.find("<span") == std::string::npos);
  CHECK(html.find("Plain body text.") != std::string::npos);
}

TEST_CASE("render_html: prediction marks nest inside relevant marks") {
  NewsItem item;
  item.id = "n1";
  item.title = "Title";
  item.body = "AAAA BBBB CCCC.";
  item.author = "a";
  item.source = "s";
  item.published = "2020-01-01";
  DetectionResult r;
  r.news_id = "n1";
  r.relevant_spans.push_back({0, 14, "AAAA BBBB CCCC"});
  r.prediction_spans.push_back({5, 9, "BBBB"});
  r.asset_spans.push_back({0, 4, "AAAA"});
  std::string html = render_html({r}, {item});
  CHECK(html.find("class=\"rel\"") != std::string::npos);
  CHECK(html.find("class=\"rel pred\"") != std::string::npos);
  CHECK(html.find("class=\"rel asset\"") != std::string::npos);
}

TEST_CASE("render_html: quote line appears only when available") {
  NewsItem item;
  item.id = "n1";
  item.title = "T";
  item.body = "Body.";
  item.author = "a";
  item.source = "s";
  item.published = "2020-01-01";
  DetectionResult r;
  r.news_id = "n1";
  QuoteProvider q = QuoteProvider::load(kData + "/sample/quotes.json");
  std::map<std::string, std::string> with{{"n1", "VZ"}};
  std::map<std::string, std::string> without{{"n1", "ZZZZ"}};
  std::string html_with = render_html({r}, {item}, &q, &with);
  CHECK(html_with.find("58.94") != std::string::npos);
  std::string html_without = render_html({r}, {item}, &q, &without);
  CHECK(html_without.find("58.94") == std::string::npos);
}

TEST_CASE("render_html rejects spans outside the body") {
  NewsItem item;
  item.id = "n1";
  item.title = "T";
  item.body = "Short.";
  item.author = "a";
  item.source = "s";
  item.published = "2020-01-01";
  DetectionResult r;
  r.news_id = "n1";
  r.relevant_spans.push_back({0, 99, "Short."});
  CHECK_THROWS_AS(render_html({r}, {item}), DataError);
}

TEST_CASE("baseline and supervised extractions cover the corpus") {
  const auto& sp = sample_pipeline();
  SystemExtraction rule = rule_baseline_extraction(sp.corpus, sp.res);
  CHECK(rule.relevant_by_item.size() == sp.corpus.size());
  auto annotations = load_annotations(sp.cfg.paths.annotations, sp.corpus);
  SupervisedSystem sys =
      train_supervised_system(sp.corpus, annotations, sp.res, sp.cfg.textual, sp.cfg.classifier);
  SystemExtraction sup = supervised_extraction(sys, sp.corpus, sp.res);
  CHECK(sup.relevant_by_item.size() == sp.corpus.size());
}
