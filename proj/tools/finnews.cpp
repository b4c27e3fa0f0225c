// finnews: relevance and forecast detection in financial news.
//
// Subcommands mirror the pipeline stages: ingest, segment, tag, train-lda,
// train-temporal, detect, baseline, evaluate, report. Exit codes: 0 success,
// 1 usage/config error, 2 data error.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "finnews/config.hpp"
#include "finnews/eval.hpp"
#include "finnews/pipeline.hpp"
#include "finnews/systems.hpp"

namespace {

using namespace finnews;

struct CommonOpts {
  std::string config_path = "data/sample/config.toml";
  std::string corpus_override;
  std::uint64_t seed_override = 0;
  bool has_seed = false;
};

PipelineConfig load_config(const CommonOpts& opts) {
  PipelineConfig cfg = PipelineConfig::load(opts.config_path);
  if (!opts.corpus_override.empty()) cfg.paths.corpus = opts.corpus_override;
  if (opts.has_seed) {
    cfg.seed = opts.seed_override;
    cfg.lda.seed = opts.seed_override;
    cfg.classifier.seed = opts.seed_override;
  }
  return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "TOML config file")
      ->capture_default_str();
  cmd->add_option("--corpus", opts.corpus_override, "override paths.corpus");
  cmd->add_option("--seed", opts.seed_override, "override the global seed")
      ->each([&opts](const std::string&) { opts.has_seed = true; });
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write: " + path);
  out << content;
}

int cmd_ingest(const CommonOpts& opts, const std::string& out_path) {
  PipelineConfig cfg = load_config(opts);
  std::vector<NewsItem> corpus = load_corpus(cfg.paths.corpus);
  std::size_t sentences = 0, chars = 0;
  for (const NewsItem& it : corpus) {
    sentences += split_sentences(it.body).size();
    chars += it.body.size();
  }
  if (!out_path.empty()) save_corpus(corpus, out_path);
  std::cout << "items: " << corpus.size() << "\nsentences: " << sentences
            << "\navg chars: " << (corpus.empty() ? 0 : chars / corpus.size()) << "\n";
  return 0;
}

int cmd_segment(const CommonOpts& opts, const std::string& out_path) {
  PipelineConfig cfg = load_config(opts);
  PipelineResources res = PipelineResources::load(cfg.paths);
  std::vector<NewsItem> corpus = load_corpus(cfg.paths.corpus);
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const NewsItem& item : corpus) {
    std::vector<Sentence> sentences = split_sentences(item.body, res.abbrevs);
    for (const Segment& seg : segment(item, sentences, res.stopwords, cfg.texttiling)) {
      j.push_back({{"news_id", seg.news_id},
                   {"index", seg.index},
                   {"first_sentence", seg.first_sentence},
                   {"end_sentence", seg.end_sentence},
                   {"text", seg.text}});
    }
  }
  const std::string payload = j.dump(2) + "\n";
  if (out_path.empty()) std::cout << payload;
  else write_text(out_path, payload);
  return 0;
}

int cmd_tag(const CommonOpts& opts, const std::string& out_path) {
  PipelineConfig cfg = load_config(opts);
  PipelineResources res = PipelineResources::load(cfg.paths);
  std::vector<NewsItem> corpus = load_corpus(cfg.paths.corpus);
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const NewsItem& item : corpus) {
    PreparedDocument doc = prepare_document(item, res, cfg);
    for (const auto& seg : doc.tagged)
      for (const TaggedSentence& ts : seg) {
        auto toks = nlohmann::ordered_json::array();
        for (const TaggedToken& t : ts.tokens)
          toks.push_back({{"surface", t.surface},
                          {"tag", t.category ? tag_name(*t.category) : ""}});
        j.push_back({{"news_id", ts.news_id},
                     {"segment", ts.segment_index},
                     {"sentence", ts.sentence_index},
                     {"original", ts.original},
                     {"tagged", ts.tagged},
                     {"tokens", std::move(toks)}});
      }
  }
  const std::string payload = j.dump(2) + "\n";
  if (out_path.empty()) std::cout << payload;
  else write_text(out_path, payload);
  return 0;
}

int cmd_train_lda(const CommonOpts& opts, const std::string& out_path) {
  PipelineConfig cfg = load_config(opts);
  PipelineResources res = PipelineResources::load(cfg.paths);
  std::vector<NewsItem> corpus = load_corpus(cfg.paths.corpus);
  std::vector<std::vector<std::string>> seg_tokens;
  for (const NewsItem& item : corpus) {
    PreparedDocument doc = prepare_document(item, res, cfg);
    for (const auto& tagged : doc.tagged)
      seg_tokens.push_back(segment_lda_tokens(tagged, res.stopwords));
  }
  LdaModel model = train_lda(seg_tokens, cfg.lda);
  TopicRelevance rho = compute_rho(model);
  const std::string path = out_path.empty() ? cfg.paths.lda_model : out_path;
  save_lda_model(model, path);
  std::cout << "segments: " << seg_tokens.size() << "\nvocabulary: " << model.vocab_size()
            << "\nrho: [" << rho.rho[0] << ", " << rho.rho[1]
            << "]\nrelevant topic: " << rho.relevant_topic << "\nmodel: " << path << "\n";
  return 0;
}

int cmd_train_temporal(const CommonOpts& opts, const std::string& out_path,
                       std::size_t folds_override) {
  PipelineConfig cfg = load_config(opts);
  if (folds_override > 0) cfg.cv_folds = folds_override;
  PipelineResources res = PipelineResources::load(cfg.paths);
  if (cfg.paths.temporal_train.empty())
    throw ConfigError("paths.temporal_train is required for train-temporal");
  std::vector<TemporalUnit> units;
  std::vector<TenseTag> labels;
  for (const auto& [text, label] : load_temporal_training(cfg.paths.temporal_train)) {
    units.push_back(
        make_temporal_unit(normalize_text(text), res.lexicon, res.gazetteers, res.abbrevs));
    labels.push_back(label);
  }
  std::vector<FoldMetrics> metrics = cross_validate_temporal(
      units, labels, res.verbs, cfg.textual, cfg.classifier, cfg.cv_folds, cfg.seed);
  double psum = 0, rsum = 0;
  for (const FoldMetrics& m : metrics) {
    std::cout << "fold " << m.fold << ": precision " << m.precision << " recall " << m.recall
              << " (n=" << m.test_size << ")\n";
    psum += m.precision;
    rsum += m.recall;
  }
  std::cout << "mean precision " << psum / metrics.size() << ", mean recall "
            << rsum / metrics.size() << "\n";
  TemporalModel model =
      train_temporal_model(units, labels, res.verbs, cfg.textual, cfg.classifier);
  const std::string path = out_path.empty() ? cfg.paths.temporal_model : out_path;
  save_temporal_model(model, path);
  std::cout << "model: " << path << "\n";
  return 0;
}

TrainedModels obtain_models(const PipelineConfig& cfg, const PipelineResources& res,
                            const std::vector<NewsItem>& corpus, bool train) {
  if (train) return train_models(res, cfg);
  TrainedModels m;
  m.lda = load_lda_model(cfg.paths.lda_model);
  m.relevance = compute_rho(m.lda);
  m.temporal = load_temporal_model(cfg.paths.temporal_model);
  return m;
}

int cmd_detect(const CommonOpts& opts, const std::string& out_path, bool train) {
  PipelineConfig cfg = load_config(opts);
  PipelineResources res = PipelineResources::load(cfg.paths);
  std::vector<NewsItem> corpus = load_corpus(cfg.paths.corpus);
  TrainedModels models = obtain_models(cfg, res, corpus, train);
  std::vector<DetectionResult> results = run_pipeline(corpus, res, cfg, models);
  save_results(results, out_path);
  std::size_t rel = 0, pred = 0;
  for (const DetectionResult& r : results) {
    rel += r.relevant_spans.size();
    pred += r.prediction_spans.size();
  }
  std::cout << "items: " << results.size() << "\nrelevant sentences: " << rel
            << "\nprediction sentences: " << pred << "\nresults: " << out_path << "\n";
  return 0;
}

int cmd_baseline_run(const CommonOpts& opts, const std::string& out_path) {
  PipelineConfig cfg = load_config(opts);
  PipelineResources res = PipelineResources::load(cfg.paths);
  std::vector<NewsItem> corpus = load_corpus(cfg.paths.corpus);
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const NewsItem& item : corpus) {
    BaselineDocument doc = run_rule_baseline(item, res);
    for (const BaselineVerdict& v : doc.verdicts)
      j.push_back({{"news_id", item.id},
                   {"sentence", v.sentence_index},
                   {"relevant", v.relevant},
                   {"predictive", v.predictive},
                   {"text", std::string(trim(doc.sentences[v.sentence_index].text))}});
  }
  const std::string payload = j.dump(2) + "\n";
  if (out_path.empty()) std::cout << payload;
  else write_text(out_path, payload);
  return 0;
}

int cmd_baseline_train_supervised(const CommonOpts& opts) {
  PipelineConfig cfg = load_config(opts);
  if (cfg.paths.annotations.empty())
    throw ConfigError("paths.annotations is required for baseline train-supervised");
  PipelineResources res = PipelineResources::load(cfg.paths);
  std::vector<NewsItem> corpus = load_corpus(cfg.paths.corpus);
  std::vector<AnnotationSet> annotations = load_annotations(cfg.paths.annotations, corpus);
  SupervisedSystem sys =
      train_supervised_system(corpus, annotations, res, cfg.textual, cfg.classifier);
  std::cout << "relevant model features: " << sys.relevant_model.selected.size()
            << "\nprediction model features: " << sys.prediction_model.selected.size() << "\n";
  return 0;
}

int cmd_evaluate(const CommonOpts& opts, const std::string& systems_csv,
                 const std::string& out_path, bool train) {
  PipelineConfig cfg = load_config(opts);
  if (cfg.paths.annotations.empty())
    throw ConfigError("paths.annotations is required for evaluate");
  PipelineResources res = PipelineResources::load(cfg.paths);
  std::vector<NewsItem> corpus = load_corpus(cfg.paths.corpus);
  std::vector<AnnotationSet> annotations = load_annotations(cfg.paths.annotations, corpus);

  std::vector<std::pair<std::string, SystemExtraction>> systems;
  std::istringstream iss(systems_csv);
  std::string name;
  while (std::getline(iss, name, ',')) {
    if (name == "proposed") {
      TrainedModels models = obtain_models(cfg, res, corpus, train);
      systems.emplace_back("Proposed system",
                           extraction_from_results(run_pipeline(corpus, res, cfg, models)));
    } else if (name == "rule") {
      systems.emplace_back("Rule-based baseline", rule_baseline_extraction(corpus, res));
    } else if (name == "supervised") {
      SupervisedSystem sys =
          train_supervised_system(corpus, annotations, res, cfg.textual, cfg.classifier);
      systems.emplace_back("Supervised system", supervised_extraction(sys, corpus, res));
    } else {
      throw ConfigError("unknown system: " + name + " (expected proposed, rule, supervised)");
    }
  }

  EvalReport report = compare_systems(systems, corpus, annotations);
  add_agreement(report, corpus, annotations);
  for (const std::string& w : report.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << render_eval_tables(report);
  if (!out_path.empty()) write_text(out_path, eval_report_to_json(report).dump(2) + "\n");
  return 0;
}

int cmd_report(const CommonOpts& opts, const std::string& results_path,
               const std::string& out_path) {
  PipelineConfig cfg = load_config(opts);
  PipelineResources res = PipelineResources::load(cfg.paths);
  std::vector<NewsItem> corpus = load_corpus(cfg.paths.corpus);
  std::vector<DetectionResult> results = load_results(results_path);

  std::vector<PreparedDocument> docs;
  for (const NewsItem& item : corpus) docs.push_back(prepare_document(item, res, cfg));
  std::map<std::string, std::string> assets = primary_assets(docs);

  std::optional<QuoteProvider> quotes;
  if (!cfg.paths.quotes.empty()) quotes = QuoteProvider::load(cfg.paths.quotes);
  write_text(out_path, render_html(results, corpus, quotes ? &*quotes : nullptr, &assets));
  std::cout << "report: " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Detection of relevant text and forecasts in financial news"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string out_path, results_path, systems_csv = "proposed,rule,supervised";
  std::size_t folds = 0;
  bool train = false;

  auto* ingest = app.add_subcommand("ingest", "load, validate and normalize a corpus");
  add_common(ingest, opts);
  ingest->add_option("--out", out_path, "write the normalized corpus here");

  auto* seg = app.add_subcommand("segment", "TextTiling segmentation");
  add_common(seg, opts);
  seg->add_option("--out", out_path, "write segments JSON here");

  auto* tag = app.add_subcommand("tag", "resolve references and tag the corpus");
  add_common(tag, opts);
  tag->add_option("--out", out_path, "write tagged sentences JSON here");

  auto* tl = app.add_subcommand("train-lda", "train the two-topic LDA model");
  add_common(tl, opts);
  tl->add_option("--out", out_path, "model output path (default paths.lda_model)");

  auto* tt = app.add_subcommand("train-temporal", "cross-validate and train the temporal classifier");
  add_common(tt, opts);
  tt->add_option("--folds", folds, "cross-validation folds (default temporal.folds)");
  tt->add_option("--out", out_path, "model output path (default paths.temporal_model)");

  auto* det = app.add_subcommand("detect", "run the full detection pipeline");
  add_common(det, opts);
  det->add_flag("--train", train, "train models in-run instead of loading them");
  det->add_option("--out", out_path, "results.json output path")->default_val("results.json");

  auto* base = app.add_subcommand("baseline", "rule-based and supervised baselines");
  auto* base_run = base->add_subcommand("run", "run the rule-based baseline");
  add_common(base_run, opts);
  base_run->add_option("--out", out_path, "verdicts JSON output path");
  auto* base_train = base->add_subcommand("train-supervised", "train the supervised baseline");
  add_common(base_train, opts);
  base->require_subcommand(1);

  auto* ev = app.add_subcommand("evaluate", "ROUGE-L comparison against the annotations");
  add_common(ev, opts);
  ev->add_option("--systems", systems_csv, "comma list: proposed,rule,supervised")
      ->capture_default_str();
  ev->add_flag("--train", train, "train pipeline models in-run");
  ev->add_option("--out", out_path, "report JSON output path");

  auto* rep = app.add_subcommand("report", "render the highlighted HTML report");
  add_common(rep, opts);
  rep->add_option("--results", results_path, "results.json from detect")->required();
  rep->add_option("--out", out_path, "HTML output path")->default_val("report.html");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(ingest)) return cmd_ingest(opts, out_path);
    if (app.got_subcommand(seg)) return cmd_segment(opts, out_path);
    if (app.got_subcommand(tag)) return cmd_tag(opts, out_path);
    if (app.got_subcommand(tl)) return cmd_train_lda(opts, out_path);
    if (app.got_subcommand(tt)) return cmd_train_temporal(opts, out_path, folds);
    if (app.got_subcommand(det)) return cmd_detect(opts, out_path, train);
    if (app.got_subcommand(base)) {
      if (base->got_subcommand(base_run)) return cmd_baseline_run(opts, out_path);
      return cmd_baseline_train_supervised(opts);
    }
    if (app.got_subcommand(ev)) return cmd_evaluate(opts, systems_csv, out_path, train);
    if (app.got_subcommand(rep)) return cmd_report(opts, results_path, out_path);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
