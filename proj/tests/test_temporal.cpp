#include "finnews/temporal.hpp"
#include "finnews/temporal_model.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace finnews;

namespace {

VerbLexicon test_verbs() {
  VerbLexicon v;
  v.bases = {"rise", "fall", "report", "say", "prove", "hit", "grow", "trade",
             "point", "climb", "expect", "generate", "recognize", "be", "have"};
  v.irregular_past = {"rose", "fell", "said", "hit", "grew", "was", "were", "had",
                      "risen", "fallen", "grown"};
  return v;
}

std::vector<std::string> toks(std::initializer_list<const char*> words) {
  return std::vector<std::string>(words.begin(), words.end());
}

AnalyzedSentence analyzed(const std::string& text) {
  AnalyzedSentence a;
  a.text = text;
  for (const Token& t : word_tokens(text)) {
    a.tokens.push_back(t.text);
    a.spans.emplace_back(t.begin, t.end);
  }
  return a;
}

}  // namespace

TEST_CASE("detect_tense: modal, -ed and present rules") {
  auto v = test_verbs();
  CHECK(detect_tense(toks({"will", "rise"}), v) == TenseTag::Future);
  CHECK(detect_tense(toks({"reported"}), v) == TenseTag::Past);
  CHECK(detect_tense(toks({"is", "proving"}), v) == TenseTag::Present);
  CHECK(detect_tense(toks({"rose"}), v) == TenseTag::Past);
  CHECK(detect_tense(toks({"was", "down"}), v) == TenseTag::Past);
  CHECK(detect_tense(toks({"going", "to", "rise"}), v) == TenseTag::Future);
  CHECK(detect_tense(toks({"trades"}), v) == TenseTag::Present);
}

TEST_CASE("clause_split: coordination, subordination, single clause") {
  auto v = test_verbs();
  auto a1 = analyzed("TICKER rose, but TICKER will fall");
  auto c1 = clause_split(a1.tokens, v, a1.spans, a1.text);
  CHECK(c1.size() == 2);

  auto a2 = analyzed("TICKER rose sharply today");
  auto c2 = clause_split(a2.tokens, v, a2.spans, a2.text);
  CHECK(c2.size() == 1);

  auto a3 = analyzed("TICKER said that earnings grew");
  auto c3 = clause_split(a3.tokens, v, a3.spans, a3.text);
  REQUIRE(c3.size() == 2);
  CHECK(a3.tokens[c3[1].first] == "that");
}

TEST_CASE("dependency_features: single future clause") {
  auto v = test_verbs();
  TemporalFeatureVector f;
  dependency_features({analyzed("TICKER will rise")}, v, f);
  CHECK(f.at(0, 0, TenseTag::Future) == 1);
  CHECK(f.at(0, 1, TenseTag::Future) == 1);
  CHECK(f.global[0][0] == TenseTag::Future);
}

TEST_CASE("dependency_features: no asset tags means all zeros") {
  auto v = test_verbs();
  TemporalFeatureVector f;
  dependency_features({analyzed("Earnings grew and margins rose")}, v, f);
  for (int role = 0; role < 2; ++role)
    for (int t = 0; t < 3; ++t) CHECK(f.counts[0][role][t] == 0);
}

TEST_CASE("dependency_features: object position counts SubObj only") {
  auto v = test_verbs();
  TemporalFeatureVector f;
  dependency_features({analyzed("Analysts expect TICKER")}, v, f);
  CHECK(f.at(0, 0, TenseTag::Present) == 0);
  CHECK(f.at(0, 1, TenseTag::Present) == 1);
}

TEST_CASE("proximity_features: nearest verb with tie to the following verb") {
  auto v = test_verbs();
  // asset equidistant between a past verb and a future group: following wins
  TemporalFeatureVector f;
  proximity_features({analyzed("markets fell TICKER will rise")}, v, f);
  CHECK(f.at(1, 0, TenseTag::Future) == 1);
  CHECK(f.at(1, 1, TenseTag::Future) == 1);
  CHECK(f.at(1, 1, TenseTag::Past) == 0);
}

TEST_CASE("proximity_features: no verbs means no increments") {
  auto v = test_verbs();
  TemporalFeatureVector f;
  proximity_features({analyzed("TICKER higher margins better outlook")}, v, f);
  for (int role = 0; role < 2; ++role)
    for (int t = 0; t < 3; ++t) CHECK(f.counts[1][role][t] == 0);
}

TEST_CASE("majority: tie prevails future, all-zero defaults present") {
  CHECK(majority(2, 1, 2) == TenseTag::Future);
  CHECK(majority(3, 1, 0) == TenseTag::Past);
  CHECK(majority(0, 0, 0) == TenseTag::Present);
  CHECK(majority(2, 2, 1) == TenseTag::Future);
  CHECK(majority(0, 3, 1) == TenseTag::Present);
}

TEST_CASE("global features equal an independent majority recomputation") {
  auto v = test_verbs();
  std::vector<AnalyzedSentence> seg = {
      analyzed("TICKER rose, but TICKER will fall"),
      analyzed("TICKER reported earnings and TICKER_ABR grew"),
      analyzed("STOCK trades higher")};
  TemporalFeatureVector f;
  dependency_features(seg, v, f);
  proximity_features(seg, v, f);
  for (int analysis = 0; analysis < 2; ++analysis)
    for (int role = 0; role < 2; ++role)
      CHECK(f.global[analysis][role] == majority(f.counts[analysis][role][0],
                                                 f.counts[analysis][role][1],
                                                 f.counts[analysis][role][2]));
}

TEST_CASE("dependency and proximity agree when assets sit next to lone verbs") {
  auto v = test_verbs();
  std::mt19937_64 rng(21);
  const char* verbs_past[] = {"rose", "fell", "reported"};
  const char* verbs_fut[] = {"will rise", "will fall"};
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<AnalyzedSentence> seg;
    std::size_t n = 1 + rng() % 3;
    for (std::size_t s = 0; s < n; ++s) {
      bool fut = rng() % 2;
      std::string text = std::string("TICKER ") +
                         (fut ? verbs_fut[rng() % 2] : verbs_past[rng() % 3]) + " today";
      seg.push_back(analyzed(text));
    }
    TemporalFeatureVector fd, fp;
    dependency_features(seg, v, fd);
    proximity_features(seg, v, fp);
    for (int role = 0; role < 2; ++role)
      for (int t = 0; t < 3; ++t)
        CHECK(fd.counts[0][role][t] == fp.counts[1][role][t]);
  }
}

TEST_CASE("numerical_features: percentages split from other numbers") {
  CHECK(numerical_features("down 5% from $23.6 billion") == std::pair<int, int>(1, 1));
  CHECK(numerical_features("no numbers here") == std::pair<int, int>(0, 0));
  CHECK(numerical_features("55% and 74.1 percent") == std::pair<int, int>(0, 2));
}

TEST_CASE("textual_features: counts for tokens and grams") {
  TextualFeatureConfig cfg;
  cfg.maxdf = 1.0;
  auto vocab = TextualVocabulary::fit({"ab ab", "other text"}, cfg);
  auto x = vocab.transform("ab ab");
  double char2 = 0, tok = 0;
  for (std::size_t i = 0; i < vocab.features.size(); ++i) {
    if (vocab.features[i] == "c2:ab") char2 = x[i];
    if (vocab.features[i] == "w1:ab") tok = x[i];
  }
  CHECK(char2 == 2);
  CHECK(tok == 2);
}

TEST_CASE("textual_features: maxdf drops corpus-wide features") {
  TextualFeatureConfig cfg;  // maxdf 0.30
  std::vector<std::string> docs;
  for (int i = 0; i < 10; ++i) docs.push_back("common word" + std::to_string(i));
  auto vocab = TextualVocabulary::fit(docs, cfg);
  for (const auto& f : vocab.features) CHECK(f != "w1:common");
}

TEST_CASE("textual_features: the cap keeps the top max_features") {
  TextualFeatureConfig cfg;
  cfg.maxdf = 1.0;
  cfg.max_features = 10;
  auto vocab = TextualVocabulary::fit({"one two three four five six", "seven eight nine ten"},
                                      cfg);
  CHECK(vocab.features.size() == 10);
}

TEST_CASE("textual_features: transform before fit throws") {
  TextualVocabulary v;
  CHECK_THROWS_AS(v.transform("text"), Error);
}

namespace {

// Brute-force chi2 ranking oracle: recomputes the statistic from explicit
// contingency sums and ranks by (score desc, index asc).
std::vector<std::size_t> brute_force_chi2_topk(const std::vector<std::vector<double>>& X,
                                               const std::vector<int>& y, std::size_t k) {
  std::set<int> classes(y.begin(), y.end());
  std::vector<double> scores(X[0].size(), 0.0);
  for (std::size_t f = 0; f < X[0].size(); ++f) {
    double total = 0;
    std::map<int, double> obs;
    for (std::size_t i = 0; i < X.size(); ++i) {
      obs[y[i]] += X[i][f];
      total += X[i][f];
    }
    if (total == 0) continue;
    double stat = 0;
    for (int c : classes) {
      double nc = 0;
      for (int yi : y)
        if (yi == c) nc += 1;
      double expected = total * nc / static_cast<double>(y.size());
      stat += (obs[c] - expected) * (obs[c] - expected) / expected;
    }
    scores[f] = stat;
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  order.resize(k);
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace

TEST_CASE("chi2_select: flat features score zero, indicators score high") {
  // feature 0 identical across classes, feature 1 perfectly class-indicating
  std::vector<std::vector<double>> X = {{1, 1}, {1, 0}, {1, 1}, {1, 0}};
  std::vector<int> y = {0, 1, 0, 1};
  auto scores = chi2_scores(X, y);
  CHECK(scores[0] == Catch::Approx(0.0));
  CHECK(scores[1] > 0.5);
  auto kept = chi2_select(X, y, 80);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0] == 1);
}

TEST_CASE("chi2_select: 10 features at percentile 80 keeps exactly 2") {
  std::mt19937_64 rng(2);
  std::vector<std::vector<double>> X(50, std::vector<double>(10));
  std::vector<int> y(50);
  for (std::size_t i = 0; i < 50; ++i) {
    y[i] = static_cast<int>(i % 3);
    for (std::size_t f = 0; f < 10; ++f) X[i][f] = static_cast<double>(rng() % 7);
  }
  auto kept = chi2_select(X, y, 80);
  REQUIRE(kept.size() == 2);
  CHECK(kept == brute_force_chi2_topk(X, y, 2));
}

TEST_CASE("chi2_select: percentile 100 keeps exactly the nonzero-score features") {
  std::vector<std::vector<double>> X = {{1, 1, 0}, {1, 0, 0}, {1, 1, 0}, {1, 0, 0}};
  std::vector<int> y = {0, 1, 0, 1};
  auto kept = chi2_select(X, y, 100);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0] == 1);
}

TEST_CASE("chi2_select: zero-variance labels are an error") {
  std::vector<std::vector<double>> X = {{1}, {2}};
  std::vector<int> y = {1, 1};
  CHECK_THROWS_AS(chi2_select(X, y, 80), DataError);
}

TEST_CASE("chi2 selection is invariant to uniform positive scaling") {
  std::mt19937_64 rng(4);
  std::vector<std::vector<double>> X(30, std::vector<double>(8));
  std::vector<int> y(30);
  for (std::size_t i = 0; i < 30; ++i) {
    y[i] = static_cast<int>(i % 2);
    for (auto& v : X[i]) v = static_cast<double>(rng() % 5);
  }
  auto base = chi2_select(X, y, 75);
  std::vector<std::vector<double>> X3 = X;
  for (auto& row : X3)
    for (auto& v : row) v *= 3.0;
  CHECK(chi2_select(X3, y, 75) == base);
}

namespace {

// Three well-separated Gaussian blobs in 2D.
void make_blobs(std::mt19937_64& rng, std::vector<std::vector<double>>& X,
                std::vector<int>& y, std::size_t per_class = 30) {
  const double centers[3][2] = {{0, 0}, {10, 0}, {0, 10}};
  auto gauss = [&rng]() {
    double u1 = (static_cast<double>(rng() >> 11) + 1) * (1.0 / 9007199254740993.0);
    double u2 = static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
    return std::sqrt(-2 * std::log(u1)) * std::cos(2 * 3.14159265358979 * u2);
  };
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < per_class; ++i) {
      X.push_back({centers[c][0] + gauss() * 0.5, centers[c][1] + gauss() * 0.5});
      y.push_back(c);
    }
}

}  // namespace

TEST_CASE("train_classifier: separable blobs reach 0.99 training accuracy") {
  std::mt19937_64 rng(8);
  std::vector<std::vector<double>> X;
  std::vector<int> y;
  make_blobs(rng, X, y);
  ClassifierConfig cfg;
  cfg.C = 0.1;  // higher than the pipeline default; blobs are tiny
  LinearModel m = train_classifier(X, y, cfg);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < X.size(); ++i)
    if (predict_class(m, X[i]) == y[i]) ++hits;
  CHECK(static_cast<double>(hits) / static_cast<double>(X.size()) >= 0.99);
}

TEST_CASE("train_classifier is deterministic") {
  std::mt19937_64 rng(9);
  std::vector<std::vector<double>> X;
  std::vector<int> y;
  make_blobs(rng, X, y, 15);
  ClassifierConfig cfg;
  LinearModel a = train_classifier(X, y, cfg);
  LinearModel b = train_classifier(X, y, cfg);
  REQUIRE(a.weights.size() == b.weights.size());
  for (std::size_t c = 0; c < a.weights.size(); ++c) {
    CHECK(a.bias[c] == b.bias[c]);
    for (std::size_t f = 0; f < a.weights[c].size(); ++f)
      CHECK(a.weights[c][f] == b.weights[c][f]);
  }
}

TEST_CASE("train_classifier rejects single-class data") {
  std::vector<std::vector<double>> X = {{1}, {2}};
  std::vector<int> y = {0, 0};
  CHECK_THROWS_AS(train_classifier(X, y, ClassifierConfig{}), DataError);
}

TEST_CASE("squared-hinge gradient matches central finite differences") {
  std::mt19937_64 rng(10);
  std::vector<std::vector<double>> X;
  std::vector<double> yb;
  std::vector<double> s;
  for (int i = 0; i < 25; ++i) {
    X.push_back({static_cast<double>(rng() % 9) - 4, static_cast<double>(rng() % 9) - 4,
                 static_cast<double>(rng() % 9) - 4});
    yb.push_back(i % 2 == 0 ? 1.0 : -1.0);
    s.push_back(1.0 + static_cast<double>(rng() % 3));
  }
  detail::SquaredHinge obj{X, yb, s, 0.05};
  const double h = 1e-5;
  for (int point = 0; point < 10; ++point) {
    std::vector<double> w = {(static_cast<double>(rng() % 200) - 100) / 100.0,
                             (static_cast<double>(rng() % 200) - 100) / 100.0,
                             (static_cast<double>(rng() % 200) - 100) / 100.0};
    double b = (static_cast<double>(rng() % 200) - 100) / 100.0;
    std::vector<double> ga;
    double gb = 0;
    obj.gradient(w, b, ga, gb);

    std::vector<double> gfd(w.size() + 1, 0.0);
    for (std::size_t k = 0; k < w.size(); ++k) {
      auto wp = w, wm = w;
      wp[k] += h;
      wm[k] -= h;
      gfd[k] = (obj.value(wp, b) - obj.value(wm, b)) / (2 * h);
    }
    gfd[w.size()] = (obj.value(w, b + h) - obj.value(w, b - h)) / (2 * h);

    double num = 0, den = 0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      num += (ga[k] - gfd[k]) * (ga[k] - gfd[k]);
      den += std::max(std::abs(ga[k]), std::abs(gfd[k])) *
             std::max(std::abs(ga[k]), std::abs(gfd[k]));
    }
    num += (gb - gfd[w.size()]) * (gb - gfd[w.size()]);
    den += std::max(std::abs(gb), std::abs(gfd[w.size()])) *
           std::max(std::abs(gb), std::abs(gfd[w.size()]));
    REQUIRE(den > 0);
    CHECK(std::sqrt(num / den) < 1e-4);
  }
}

TEST_CASE("predict_class: zero vectors go to the largest bias") {
  LinearModel m;
  m.classes = {0, 1, 2};
  m.weights = {{1, 1}, {1, 1}, {1, 1}};
  m.bias = {-0.5, 0.75, 0.1};
  CHECK(predict_class(m, {0, 0}) == 1);
}

TEST_CASE("predict_class: deep-in-class exemplars keep their class") {
  std::mt19937_64 rng(12);
  std::vector<std::vector<double>> X;
  std::vector<int> y;
  make_blobs(rng, X, y);
  ClassifierConfig cfg;
  cfg.C = 0.1;
  LinearModel m = train_classifier(X, y, cfg);
  CHECK(predict_class(m, {0, 0}) == 0);
  CHECK(predict_class(m, {10, 0}) == 1);
  CHECK(predict_class(m, {0, 10}) == 2);
}

TEST_CASE("balanced class weights satisfy sum weight_c * n_c = n") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> y;
    std::size_t n = 5 + rng() % 50;
    for (std::size_t i = 0; i < n; ++i) y.push_back(static_cast<int>(rng() % 3));
    std::set<int> classes(y.begin(), y.end());
    if (classes.size() < 2) continue;
    auto w = balanced_class_weights(y);
    double total = 0;
    for (int c : y) total += w.at(c);
    CHECK(total == Catch::Approx(static_cast<double>(n)));
  }
}

TEST_CASE("encoded temporal features line up with their names") {
  auto v = test_verbs();
  TemporalUnit unit;
  unit.raw_text = "TICKER will rise 5% next quarter";
  unit.sentences = {analyzed("TICKER will rise NUM next quarter")};
  auto f = temporal_features(unit, v);
  auto x = encode_temporal_features(f);
  const auto& names = temporal_feature_names();
  REQUIRE(x.size() == names.size());
  REQUIRE(x.size() == 26);
  // FutDepSub is index 2 in the layout
  CHECK(names[2] == "FutDepSub");
  CHECK(x[2] == 1);
  CHECK(names[24] == "num_count");
  CHECK(x[24] == 0);  // "5%" is a percentage
  CHECK(names[25] == "pct_count");
  CHECK(x[25] == 1);
}

TEST_CASE("cross-validation harness emits per-fold precision/recall") {
  auto v = test_verbs();
  std::vector<TemporalUnit> units;
  std::vector<TenseTag> labels;
  const char* fut[] = {"TICKER will rise 5% next quarter", "TICKER will fall on earnings",
                       "TICKER will climb as demand grows"};
  const char* pst[] = {"TICKER rose 5% yesterday", "TICKER reported earnings of $2",
                       "TICKER fell 3% last week"};
  const char* prs[] = {"TICKER trades at 20 times earnings", "TICKER is proving stable",
                       "TICKER trades near $100"};
  for (int i = 0; i < 12; ++i) {
    for (auto& [arr, label] :
         std::vector<std::pair<const char**, TenseTag>>{{fut, TenseTag::Future},
                                                        {pst, TenseTag::Past},
                                                        {prs, TenseTag::Present}}) {
      TemporalUnit u;
      u.raw_text = arr[i % 3];
      u.sentences = {analyzed(arr[i % 3])};
      units.push_back(u);
      labels.push_back(label);
    }
  }
  TextualFeatureConfig tcfg;
  tcfg.maxdf = 1.0;
  ClassifierConfig ccfg;
  ccfg.chi2_percentile = 80;
  auto metrics = cross_validate_temporal(units, labels, v, tcfg, ccfg, 4, 1);
  REQUIRE(metrics.size() == 4);
  for (const auto& m : metrics) {
    CHECK(m.test_size > 0);
    CHECK(m.precision >= 0);
    CHECK(m.precision <= 1);
    CHECK(m.recall >= 0);
    CHECK(m.recall <= 1);
  }
}
