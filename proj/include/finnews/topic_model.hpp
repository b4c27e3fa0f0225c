#pragma once

// Two-topic LDA over tagged segments, trained with collapsed Gibbs sampling.
// The relevant topic is selected by the significant-tag density score rho and
// sentences are filtered with the delta threshold rule.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "finnews/tagger.hpp"
#include "finnews/text.hpp"

namespace finnews {

enum class PriorMode { Scalar, Symmetric, Asymmetric };

struct PriorSpec {
  PriorMode mode = PriorMode::Symmetric;
  double scalar = 0.0;  // used when mode == Scalar

  static PriorSpec parse(const std::string& s) {
    PriorSpec p;
    if (s == "symmetric") p.mode = PriorMode::Symmetric;
    else if (s == "asymmetric") p.mode = PriorMode::Asymmetric;
    else {
      try {
        p.scalar = std::stod(s);
      } catch (...) {
        throw ConfigError("prior must be 'symmetric', 'asymmetric' or a number: " + s);
      }
      if (p.scalar <= 0) throw ConfigError("scalar prior must be positive");
      p.mode = PriorMode::Scalar;
    }
    return p;
  }

  std::string str() const {
    switch (mode) {
      case PriorMode::Symmetric: return "symmetric";
      case PriorMode::Asymmetric: return "asymmetric";
      case PriorMode::Scalar: return std::to_string(scalar);
    }
    return "?";
  }
};

struct LdaConfig {
  std::size_t num_topics = 2;
  std::size_t passes = 50;
  std::uint64_t seed = 1;
  PriorSpec alpha{PriorMode::Symmetric, 0.0};
  PriorSpec beta{PriorMode::Asymmetric, 0.0};
  double delta = 0.8;
  std::size_t foldin_sweeps = 20;

  void validate() const {
    if (num_topics != 2) throw ConfigError("lda: this pipeline trains exactly 2 topics");
    if (passes < 1) throw ConfigError("lda: passes must be >= 1");
    if (!(delta > 0.0 && delta <= 1.0)) throw ConfigError("lda: delta must be in (0,1]");
  }
};

// Prior vector for one axis: symmetric = 1/num_topics per component;
// asymmetric = 1/(i + sqrt(n)) normalized to sum 1, n the axis length;
// scalar(x) = x per component.
inline std::vector<double> build_prior(const PriorSpec& spec, std::size_t axis_len,
                                       std::size_t num_topics) {
  std::vector<double> v(axis_len, 0.0);
  switch (spec.mode) {
    case PriorMode::Scalar:
      for (double& x : v) x = spec.scalar;
      break;
    case PriorMode::Symmetric:
      for (double& x : v) x = 1.0 / static_cast<double>(num_topics);
      break;
    case PriorMode::Asymmetric: {
      double sum = 0;
      const double root = std::sqrt(static_cast<double>(axis_len));
      for (std::size_t i = 0; i < axis_len; ++i) {
        v[i] = 1.0 / (static_cast<double>(i) + root);
        sum += v[i];
      }
      for (double& x : v) x /= sum;
      break;
    }
  }
  return v;
}

inline std::pair<std::vector<double>, std::vector<double>> build_priors(
    const LdaConfig& cfg, std::size_t vocab_size) {
  return {build_prior(cfg.alpha, cfg.num_topics, cfg.num_topics),
          build_prior(cfg.beta, vocab_size, cfg.num_topics)};
}

namespace detail {

// Deterministic uniform in [0,1) independent of stdlib distribution quirks.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

}  // namespace detail

class LdaModel {
 public:
  std::vector<std::string> vocabulary;                  // index -> token
  std::unordered_map<std::string, std::size_t> vindex;  // token -> index
  std::vector<std::array<double, 2>> word_topic;        // |V| x T counts
  std::vector<std::array<double, 2>> doc_topic;         // M x T counts
  std::array<double, 2> topic_total{0, 0};
  std::vector<double> alpha;  // per topic
  std::vector<double> beta;   // per vocabulary entry
  double beta_sum = 0;
  std::uint64_t seed = 1;
  LdaConfig config;

  std::size_t vocab_size() const { return vocabulary.size(); }

  double beta_for_unseen() const {
    return vocabulary.empty() ? 1.0 : beta_sum / static_cast<double>(vocabulary.size());
  }
};

// Collapsed Gibbs training. Deterministic for a fixed seed: assignments are
// initialized from the seeded generator and every pass resamples tokens in
// document order from (doc_topic + alpha_t) * (word_topic + beta_w) /
// (topic_total + sum(beta)). `observer`, when given, runs after every pass.
inline LdaModel train_lda(const std::vector<std::vector<std::string>>& segments,
                          const LdaConfig& cfg,
                          const std::function<void(const LdaModel&, std::size_t)>& observer = {}) {
  cfg.validate();
  if (segments.size() < 2) throw DataError("lda: need at least 2 segments to train");

  LdaModel model;
  model.config = cfg;
  model.seed = cfg.seed;
  for (const auto& seg : segments)
    for (const auto& tok : seg)
      if (model.vindex.emplace(tok, model.vocabulary.size()).second)
        model.vocabulary.push_back(tok);
  if (model.vocabulary.empty()) throw DataError("lda: empty vocabulary");

  auto [alpha, beta] = build_priors(cfg, model.vocab_size());
  model.alpha = std::move(alpha);
  model.beta = std::move(beta);
  model.beta_sum = 0;
  for (double b : model.beta) model.beta_sum += b;

  model.word_topic.assign(model.vocab_size(), {0, 0});
  model.doc_topic.assign(segments.size(), {0, 0});
  model.topic_total = {0, 0};

  std::vector<std::vector<std::size_t>> docs(segments.size());
  std::vector<std::vector<int>> z(segments.size());
  std::mt19937_64 rng(cfg.seed);

  for (std::size_t d = 0; d < segments.size(); ++d) {
    docs[d].reserve(segments[d].size());
    for (const auto& tok : segments[d]) docs[d].push_back(model.vindex.at(tok));
    z[d].resize(docs[d].size());
    for (std::size_t t = 0; t < docs[d].size(); ++t) {
      int topic = detail::uniform01(rng) < 0.5 ? 0 : 1;
      z[d][t] = topic;
      model.word_topic[docs[d][t]][topic] += 1;
      model.doc_topic[d][topic] += 1;
      model.topic_total[topic] += 1;
    }
  }

  for (std::size_t pass = 0; pass < cfg.passes; ++pass) {
    for (std::size_t d = 0; d < docs.size(); ++d) {
      for (std::size_t t = 0; t < docs[d].size(); ++t) {
        const std::size_t w = docs[d][t];
        const int old_topic = z[d][t];
        model.word_topic[w][old_topic] -= 1;
        model.doc_topic[d][old_topic] -= 1;
        model.topic_total[old_topic] -= 1;

        double p0 = (model.doc_topic[d][0] + model.alpha[0]) *
                    (model.word_topic[w][0] + model.beta[w]) /
                    (model.topic_total[0] + model.beta_sum);
        double p1 = (model.doc_topic[d][1] + model.alpha[1]) *
                    (model.word_topic[w][1] + model.beta[w]) /
                    (model.topic_total[1] + model.beta_sum);
        int topic = detail::uniform01(rng) * (p0 + p1) < p0 ? 0 : 1;

        z[d][t] = topic;
        model.word_topic[w][topic] += 1;
        model.doc_topic[d][topic] += 1;
        model.topic_total[topic] += 1;
      }
    }
    if (observer) observer(model, pass);
  }
  return model;
}

struct SentenceScore {
  double score[2] = {0, 0};  // fraction of tokens assigned to each topic
  int assigned = -1;         // -1 flags an empty (unscorable) sentence
};

// Fold-in scoring of one sentence: global count tables stay fixed, the
// sentence's own assignments are resampled for config.foldin_sweeps sweeps.
// Seeded from the model seed and a hash of the tokens, so the score is a
// pure function of (model, sentence).
inline SentenceScore score_sentence(const LdaModel& model,
                                    const std::vector<std::string>& tokens) {
  SentenceScore out;
  if (tokens.empty()) return out;

  std::mt19937_64 rng(model.seed ^ fnv1a(tokens));
  const double unseen_beta = model.beta_for_unseen();
  std::vector<std::optional<std::size_t>> widx(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto it = model.vindex.find(tokens[i]);
    if (it != model.vindex.end()) widx[i] = it->second;
  }

  std::array<double, 2> local{0, 0};
  std::vector<int> z(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    z[i] = detail::uniform01(rng) < 0.5 ? 0 : 1;
    local[z[i]] += 1;
  }
  for (std::size_t sweep = 0; sweep < model.config.foldin_sweeps; ++sweep) {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      local[z[i]] -= 1;
      double wt0 = widx[i] ? model.word_topic[*widx[i]][0] : 0.0;
      double wt1 = widx[i] ? model.word_topic[*widx[i]][1] : 0.0;
      double bw = widx[i] ? model.beta[*widx[i]] : unseen_beta;
      double p0 = (local[0] + model.alpha[0]) * (wt0 + bw) /
                  (model.topic_total[0] + model.beta_sum);
      double p1 = (local[1] + model.alpha[1]) * (wt1 + bw) /
                  (model.topic_total[1] + model.beta_sum);
      z[i] = detail::uniform01(rng) * (p0 + p1) < p0 ? 0 : 1;
      local[z[i]] += 1;
    }
  }
  out.score[0] = local[0] / static_cast<double>(tokens.size());
  out.score[1] = local[1] / static_cast<double>(tokens.size());
  out.assigned = out.score[0] >= out.score[1] ? 0 : 1;
  return out;
}

struct TopicRelevance {
  double rho[2] = {0, 0};
  int relevant_topic = 0;
};

// rho_t = significant-tag tokens assigned to topic t / all significant-tag
// tokens, computed from the trained count tables. Ties break toward topic 0.
inline TopicRelevance compute_rho(const LdaModel& model) {
  TopicRelevance out;
  double counts[2] = {0, 0};
  for (std::size_t w = 0; w < model.vocab_size(); ++w) {
    auto cat = tag_from_token(model.vocabulary[w]);
    if (!cat || !is_significant_tag(*cat)) continue;
    counts[0] += model.word_topic[w][0];
    counts[1] += model.word_topic[w][1];
  }
  const double total = counts[0] + counts[1];
  if (total <= 0)
    throw DataError("rho undefined: no significant tags in the training corpus");
  out.rho[0] = counts[0] / total;
  out.rho[1] = counts[1] / total;
  out.relevant_topic = counts[1] > counts[0] ? 1 : 0;
  return out;
}

struct RelevanceDecision {
  SentenceScore score;
  bool is_relevant = false;
};

// Candidate sentences score at least twice the other topic; the acceptance
// threshold is min(delta, mean relevant-topic score over the candidates).
inline std::vector<RelevanceDecision> detect_relevant(
    const std::vector<SentenceScore>& scores, int relevant_topic, double delta) {
  std::vector<RelevanceDecision> out(scores.size());
  const int other = 1 - relevant_topic;
  double sum = 0;
  std::size_t n_cand = 0;
  std::vector<bool> cand(scores.size(), false);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i].score = scores[i];
    if (scores[i].assigned < 0) continue;
    double r = scores[i].score[relevant_topic];
    if (r >= 2.0 * scores[i].score[other]) {
      cand[i] = true;
      sum += r;
      ++n_cand;
    }
  }
  if (n_cand == 0) return out;
  const double threshold = std::min(delta, sum / static_cast<double>(n_cand));
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (cand[i] && out[i].score.score[relevant_topic] >= threshold)
      out[i].is_relevant = true;
  return out;
}

// --- serialization ----------------------------------------------------------

inline nlohmann::ordered_json lda_model_to_json(const LdaModel& m) {
  nlohmann::ordered_json j;
  j["format"] = "finnews-lda";
  j["version"] = 1;
  j["seed"] = m.seed;
  j["config"] = {{"num_topics", m.config.num_topics},
                 {"passes", m.config.passes},
                 {"seed", m.config.seed},
                 {"alpha", m.config.alpha.str()},
                 {"beta", m.config.beta.str()},
                 {"delta", m.config.delta},
                 {"foldin_sweeps", m.config.foldin_sweeps}};
  j["vocabulary"] = m.vocabulary;
  j["alpha"] = m.alpha;
  j["beta"] = m.beta;
  auto counts = nlohmann::ordered_json::array();
  for (const auto& row : m.word_topic) counts.push_back({row[0], row[1]});
  j["word_topic"] = std::move(counts);
  auto dts = nlohmann::ordered_json::array();
  for (const auto& row : m.doc_topic) dts.push_back({row[0], row[1]});
  j["doc_topic"] = std::move(dts);
  j["topic_total"] = {m.topic_total[0], m.topic_total[1]};
  return j;
}

inline void save_lda_model(const LdaModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write LDA model: " + path);
  out << lda_model_to_json(m).dump(2) << "\n";
}

inline LdaModel load_lda_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open LDA model: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": malformed model file: " + std::string(e.what()));
  }
  if (j.value("format", "") != "finnews-lda")
    throw DataError(path + ": not a finnews LDA model file");
  LdaModel m;
  m.seed = j.at("seed").get<std::uint64_t>();
  const auto& jc = j.at("config");
  m.config.num_topics = jc.at("num_topics").get<std::size_t>();
  m.config.passes = jc.at("passes").get<std::size_t>();
  m.config.seed = jc.at("seed").get<std::uint64_t>();
  m.config.alpha = PriorSpec::parse(jc.at("alpha").get<std::string>());
  m.config.beta = PriorSpec::parse(jc.at("beta").get<std::string>());
  m.config.delta = jc.at("delta").get<double>();
  m.config.foldin_sweeps = jc.at("foldin_sweeps").get<std::size_t>();
  m.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
  for (std::size_t i = 0; i < m.vocabulary.size(); ++i) m.vindex[m.vocabulary[i]] = i;
  m.alpha = j.at("alpha").get<std::vector<double>>();
  m.beta = j.at("beta").get<std::vector<double>>();
  m.beta_sum = 0;
  for (double b : m.beta) m.beta_sum += b;
  for (const auto& row : j.at("word_topic"))
    m.word_topic.push_back({row[0].get<double>(), row[1].get<double>()});
  for (const auto& row : j.at("doc_topic"))
    m.doc_topic.push_back({row[0].get<double>(), row[1].get<double>()});
  m.topic_total = {j.at("topic_total")[0].get<double>(), j.at("topic_total")[1].get<double>()};
  if (m.word_topic.size() != m.vocabulary.size())
    throw DataError(path + ": count table does not match vocabulary size");
  return m;
}

// Count-table consistency: column sums of word_topic equal topic_total and
// per-document counts sum to the document length. Used by tests and the
// training observer.
inline bool lda_counts_consistent(const LdaModel& m,
                                  const std::vector<std::vector<std::string>>& segments) {
  double col[2] = {0, 0};
  for (const auto& row : m.word_topic) {
    if (row[0] < 0 || row[1] < 0) return false;
    col[0] += row[0];
    col[1] += row[1];
  }
  if (col[0] != m.topic_total[0] || col[1] != m.topic_total[1]) return false;
  if (m.doc_topic.size() != segments.size()) return false;
  for (std::size_t d = 0; d < segments.size(); ++d)
    if (m.doc_topic[d][0] + m.doc_topic[d][1] !=
        static_cast<double>(segments[d].size()))
      return false;
  return true;
}

}  // namespace finnews
