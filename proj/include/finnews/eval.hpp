#pragma once

// Measurement apparatus: ROUGE-L over token sequences, Krippendorff's alpha
// from a binary coincidence matrix, pairwise accuracy and the per-annotator
// system comparison report.

#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "finnews/baseline.hpp"
#include "finnews/corpus.hpp"
#include "finnews/text.hpp"

namespace finnews {

struct RougeScore {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

// Lowercased word tokens with punctuation stripped, the granularity the
// report scores at.
inline std::vector<std::string> rouge_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (ascii_alnum(c)) {
      cur.push_back(ascii_tolower(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

// ROUGE-L: recall = LCS/|ref|, precision = LCS/|cand|, F1 the harmonic mean.
// Empty candidate or reference scores zero.
inline RougeScore rouge_l(const std::vector<std::string>& candidate,
                          const std::vector<std::string>& reference) {
  RougeScore s;
  if (candidate.empty() || reference.empty()) return s;
  const std::size_t n = candidate.size(), m = reference.size();
  std::vector<std::size_t> prev(m + 1, 0), cur(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      if (candidate[i - 1] == reference[j - 1]) cur[j] = prev[j - 1] + 1;
      else cur[j] = std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  const double lcs = static_cast<double>(prev[m]);
  s.recall = lcs / static_cast<double>(m);
  s.precision = lcs / static_cast<double>(n);
  s.f1 = (s.precision + s.recall) > 0
             ? 2 * s.precision * s.recall / (s.precision + s.recall)
             : 0;
  return s;
}

// 2x2 coincidence matrix over {Relevant, Context}. Entries can be
// half-integral: a unit with m labels contributes 1/(m-1) per ordered pair.
struct CoincidenceMatrix {
  double cells[2][2] = {{0, 0}, {0, 0}};  // [Relevant=0][Context=1]
  double n = 0;

  double relevant_marginal() const { return cells[0][0] + cells[0][1]; }
  double context_marginal() const { return cells[1][0] + cells[1][1]; }
};

// Builds the matrix from per-unit binary labels (true = Relevant). Units
// with fewer than two labels are skipped.
inline CoincidenceMatrix coincidence_matrix(const std::vector<std::vector<bool>>& unit_labels) {
  CoincidenceMatrix cm;
  for (const auto& labels : unit_labels) {
    const std::size_t m = labels.size();
    if (m < 2) continue;
    const double frac = 1.0 / static_cast<double>(m - 1);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) {
        if (a == b) continue;
        int ra = labels[a] ? 0 : 1;
        int rb = labels[b] ? 0 : 1;
        cm.cells[ra][rb] += frac;
        cm.n += frac;
      }
  }
  return cm;
}

// Nominal-binary Krippendorff alpha = 1 - D_o/D_e with
// D_o = (o_RC + o_CR)/n and D_e = 2 n_R n_C / (n (n-1)).
inline double krippendorff_alpha(const CoincidenceMatrix& cm) {
  if (cm.n <= 1) throw DataError("alpha undefined: fewer than two pairable values");
  const double n_r = cm.relevant_marginal();
  const double n_c = cm.context_marginal();
  if (n_r == 0 || n_c == 0)
    throw DataError("alpha undefined: degenerate marginal (single category)");
  const double d_o = (cm.cells[0][1] + cm.cells[1][0]) / cm.n;
  const double d_e = 2.0 * n_r * n_c / (cm.n * (cm.n - 1.0));
  return 1.0 - d_o / d_e;
}

inline double pairwise_accuracy(const std::vector<bool>& a, const std::vector<bool>& b) {
  if (a.size() != b.size()) throw Error("pairwise accuracy: length mismatch");
  if (a.empty()) return 0;
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] == b[i]) ++same;
  return static_cast<double>(same) / static_cast<double>(a.size());
}

// --- system comparison ---------------------------------------------------------

// Per news item, what a system extracted: concatenated relevant text and
// concatenated prediction text, in document order.
struct SystemExtraction {
  std::map<std::string, std::string> relevant_by_item;
  std::map<std::string, std::string> prediction_by_item;
};

struct AnnotatorRouge {
  std::string annotator_id;
  RougeScore relevant;
  RougeScore predictions;
  std::size_t items = 0;
};

struct SystemReport {
  std::string system;
  std::vector<AnnotatorRouge> by_annotator;
  RougeScore relevant_avg;
  RougeScore predictions_avg;
};

struct EvalReport {
  std::vector<std::string> annotators;
  std::vector<SystemReport> systems;
  std::vector<std::vector<double>> alpha_matrix;     // -1 marks the diagonal
  std::vector<std::vector<double>> accuracy_matrix;  // -1 marks the diagonal
  double alpha_mean = 0;
  double accuracy_mean = 0;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::string concat_spans(const NewsItem& item, const std::vector<Span>& spans,
                                SpanLabel label) {
  std::vector<Span> picked;
  for (const Span& s : spans)
    if (s.label == label) picked.push_back(s);
  std::sort(picked.begin(), picked.end(),
            [](const Span& a, const Span& b) { return a.start < b.start; });
  std::string out;
  for (const Span& s : picked) {
    if (!out.empty()) out += ' ';
    out += item.body.substr(s.start, s.end - s.start);
  }
  return out;
}

inline RougeScore mean_rouge(const std::vector<RougeScore>& rs) {
  RougeScore m;
  if (rs.empty()) return m;
  for (const RougeScore& r : rs) {
    m.precision += r.precision;
    m.recall += r.recall;
    m.f1 += r.f1;
  }
  const double n = static_cast<double>(rs.size());
  m.precision /= n;
  m.recall /= n;
  m.f1 /= n;
  return m;
}

}  // namespace detail

// ROUGE-L between each system's extraction and each annotator's spans,
// computed per news item and averaged over the items that annotator labeled.
// Annotators with zero labeled items are skipped with a warning.
inline EvalReport compare_systems(
    const std::vector<std::pair<std::string, SystemExtraction>>& systems,
    const std::vector<NewsItem>& corpus, const std::vector<AnnotationSet>& annotations) {
  EvalReport report;
  std::map<std::string, const NewsItem*> items;
  for (const NewsItem& it : corpus) items[it.id] = &it;

  std::map<std::string, std::vector<const AnnotationSet*>> by_annotator;
  for (const AnnotationSet& a : annotations) by_annotator[a.annotator_id].push_back(&a);
  for (const auto& [ann, sets] : by_annotator) report.annotators.push_back(ann);

  for (const auto& [name, extraction] : systems) {
    SystemReport sr;
    sr.system = name;
    std::vector<RougeScore> rel_rows, pred_rows;
    for (const std::string& ann : report.annotators) {
      AnnotatorRouge row;
      row.annotator_id = ann;
      std::vector<RougeScore> rel, pred;
      for (const AnnotationSet* a : by_annotator[ann]) {
        auto item_it = items.find(a->news_id);
        if (item_it == items.end()) continue;
        const NewsItem& item = *item_it->second;
        const std::string ref_rel = detail::concat_spans(item, a->spans, SpanLabel::Relevant);
        const std::string ref_pred = detail::concat_spans(item, a->spans, SpanLabel::Prediction);
        auto sys_rel = extraction.relevant_by_item.find(a->news_id);
        auto sys_pred = extraction.prediction_by_item.find(a->news_id);
        rel.push_back(rouge_l(
            rouge_tokens(sys_rel == extraction.relevant_by_item.end() ? "" : sys_rel->second),
            rouge_tokens(ref_rel)));
        pred.push_back(rouge_l(
            rouge_tokens(sys_pred == extraction.prediction_by_item.end() ? "" : sys_pred->second),
            rouge_tokens(ref_pred)));
        ++row.items;
      }
      if (row.items == 0) {
        report.warnings.push_back("annotator " + ann + " has no annotated items; skipped");
        continue;
      }
      row.relevant = detail::mean_rouge(rel);
      row.predictions = detail::mean_rouge(pred);
      rel_rows.push_back(row.relevant);
      pred_rows.push_back(row.predictions);
      sr.by_annotator.push_back(std::move(row));
    }
    sr.relevant_avg = detail::mean_rouge(rel_rows);
    sr.predictions_avg = detail::mean_rouge(pred_rows);
    report.systems.push_back(std::move(sr));
  }
  return report;
}

// Sentence-level agreement matrices over all annotator pairs (the 50%-span
// projection shared with the supervised baseline defines the labels).
inline void add_agreement(EvalReport& report, const std::vector<NewsItem>& corpus,
                          const std::vector<AnnotationSet>& annotations) {
  std::map<std::string, std::map<std::string, const AnnotationSet*>> per_ann;
  for (const AnnotationSet& a : annotations) per_ann[a.annotator_id][a.news_id] = &a;
  std::vector<std::string> anns;
  for (const auto& [ann, sets] : per_ann) anns.push_back(ann);
  report.annotators = anns;

  // per annotator, per item: sentence labels
  std::map<std::string, std::map<std::string, std::vector<bool>>> labels;
  for (const NewsItem& item : corpus) {
    const std::vector<Sentence> sents = split_sentences(item.body);
    for (const std::string& ann : anns) {
      auto it = per_ann[ann].find(item.id);
      if (it == per_ann[ann].end()) continue;
      std::vector<bool> row;
      for (const Sentence& s : sents)
        row.push_back(sentence_covered(s, it->second->spans, SpanLabel::Relevant));
      labels[ann][item.id] = std::move(row);
    }
  }

  const std::size_t k = anns.size();
  report.alpha_matrix.assign(k, std::vector<double>(k, -1));
  report.accuracy_matrix.assign(k, std::vector<double>(k, -1));
  double alpha_sum = 0, acc_sum = 0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      std::vector<std::vector<bool>> units;
      std::vector<bool> flat_a, flat_b;
      for (const auto& [item_id, row_a] : labels[anns[i]]) {
        auto jt = labels[anns[j]].find(item_id);
        if (jt == labels[anns[j]].end()) continue;
        for (std::size_t s = 0; s < row_a.size(); ++s) {
          units.push_back({row_a[s], jt->second[s]});
          flat_a.push_back(row_a[s]);
          flat_b.push_back(jt->second[s]);
        }
      }
      if (units.empty()) continue;
      double alpha;
      try {
        alpha = krippendorff_alpha(coincidence_matrix(units));
      } catch (const DataError&) {
        continue;  // degenerate pair (single category)
      }
      double acc = pairwise_accuracy(flat_a, flat_b);
      report.alpha_matrix[i][j] = report.alpha_matrix[j][i] = alpha;
      report.accuracy_matrix[i][j] = report.accuracy_matrix[j][i] = acc;
      alpha_sum += alpha;
      acc_sum += acc;
      ++pairs;
    }
  }
  if (pairs > 0) {
    report.alpha_mean = alpha_sum / static_cast<double>(pairs);
    report.accuracy_mean = acc_sum / static_cast<double>(pairs);
  }
}

// --- rendering ------------------------------------------------------------------

inline nlohmann::ordered_json eval_report_to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["annotators"] = r.annotators;
  auto systems = nlohmann::ordered_json::array();
  for (const SystemReport& sr : r.systems) {
    nlohmann::ordered_json js;
    js["system"] = sr.system;
    auto rows = nlohmann::ordered_json::array();
    for (const AnnotatorRouge& row : sr.by_annotator) {
      rows.push_back({{"annotator", row.annotator_id},
                      {"items", row.items},
                      {"relevant", {{"precision", row.relevant.precision},
                                    {"recall", row.relevant.recall},
                                    {"f1", row.relevant.f1}}},
                      {"predictions", {{"precision", row.predictions.precision},
                                       {"recall", row.predictions.recall},
                                       {"f1", row.predictions.f1}}}});
    }
    js["by_annotator"] = std::move(rows);
    js["relevant_avg"] = {{"precision", sr.relevant_avg.precision},
                          {"recall", sr.relevant_avg.recall},
                          {"f1", sr.relevant_avg.f1}};
    js["predictions_avg"] = {{"precision", sr.predictions_avg.precision},
                             {"recall", sr.predictions_avg.recall},
                             {"f1", sr.predictions_avg.f1}};
    systems.push_back(std::move(js));
  }
  j["systems"] = std::move(systems);
  j["alpha_matrix"] = r.alpha_matrix;
  j["accuracy_matrix"] = r.accuracy_matrix;
  j["alpha_mean"] = r.alpha_mean;
  j["accuracy_mean"] = r.accuracy_mean;
  j["warnings"] = r.warnings;
  return j;
}

// Plain-text tables: one block per extraction target, systems as rows and
// annotators as columns, F1 as the headline number.
inline std::string render_eval_tables(const EvalReport& r) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  auto table = [&](const std::string& title, bool predictions) {
    os << title << "\n";
    os << std::left << std::setw(22) << "";
    for (std::size_t i = 0; i < r.annotators.size(); ++i)
      os << std::right << std::setw(8) << ("An." + std::to_string(i + 1));
    os << std::right << std::setw(8) << "Avg." << "\n";
    for (const SystemReport& sr : r.systems) {
      os << std::left << std::setw(22) << sr.system;
      for (const std::string& ann : r.annotators) {
        double v = 0;
        for (const AnnotatorRouge& row : sr.by_annotator)
          if (row.annotator_id == ann)
            v = predictions ? row.predictions.f1 : row.relevant.f1;
        os << std::right << std::setw(8) << v;
      }
      os << std::right << std::setw(8)
         << (predictions ? sr.predictions_avg.f1 : sr.relevant_avg.f1) << "\n";
    }
    os << "\n";
  };
  table("ROUGE-L, detection of relevant text (F1)", false);
  table("ROUGE-L, detection of predictions/forecasts (F1)", true);
  if (!r.alpha_matrix.empty()) {
    os << "Inter-annotator alpha (mean " << r.alpha_mean << "), accuracy (mean "
       << r.accuracy_mean << ")\n";
  }
  return os.str();
}

}  // namespace finnews
