#ifndef PAUSESEG_EVALKIT_HPP
#define PAUSESEG_EVALKIT_HPP

#include <cmath>
#include <cstddef>
#include <iomanip>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pauseseg/corpus.hpp"
#include "pauseseg/error.hpp"

namespace pauseseg {

struct EvalCounts {
  std::size_t gold_words = 0;
  std::size_t pred_words = 0;
  std::size_t correct_words = 0;
  std::size_t gold_oov = 0;
  std::size_t correct_oov = 0;
};

struct EvalReport {
  double precision = 1.0;
  double recall = 1.0;
  double f1 = 1.0;
  std::optional<double> oov_recall;  // absent when there are no gold OOV words
  EvalCounts counts;
};

namespace detail {

// (start, end) character offsets of each word; strictly increasing starts.
inline std::vector<std::pair<std::size_t, std::size_t>> word_spans(const SegmentedSentence& s) {
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  spans.reserve(s.words.size());
  std::size_t offset = 0;
  for (const std::string& w : s.words) {
    const std::size_t len = utf8::char_count(w);
    spans.emplace_back(offset, offset + len);
    offset += len;
  }
  return spans;
}

inline std::string joined(const SegmentedSentence& s) {
  std::string out;
  for (const std::string& w : s.words) out += w;
  return out;
}

}  // namespace detail

// Span-matched segmentation scoring: a word counts as correct when its
// (start, end) character interval appears in both segmentations of the
// same sentence. OOV accounting is done against `train_vocab` when given.
inline EvalReport evaluate(std::span<const SegmentedSentence> gold,
                           std::span<const SegmentedSentence> pred,
                           const std::unordered_set<std::string>* train_vocab = nullptr) {
  if (gold.size() != pred.size()) {
    throw DataError("evaluate: " + std::to_string(gold.size()) + " gold vs " +
                    std::to_string(pred.size()) + " predicted sentences");
  }
  EvalReport r;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (detail::joined(gold[i]) != detail::joined(pred[i])) {
      throw DataError("evaluate: line " + std::to_string(i + 1) + " (\"" + gold[i].id +
                      "\"): gold and predicted text differ");
    }
    const auto gold_spans = detail::word_spans(gold[i]);
    const auto pred_spans = detail::word_spans(pred[i]);
    r.counts.gold_words += gold_spans.size();
    r.counts.pred_words += pred_spans.size();
    std::vector<bool> gold_matched(gold_spans.size(), false);
    std::size_t a = 0, b = 0;
    while (a < gold_spans.size() && b < pred_spans.size()) {
      if (gold_spans[a] == pred_spans[b]) {
        gold_matched[a] = true;
        ++r.counts.correct_words;
        ++a;
        ++b;
      } else if (gold_spans[a].first < pred_spans[b].first) {
        ++a;
      } else {
        ++b;
      }
    }
    if (train_vocab) {
      for (std::size_t w = 0; w < gold[i].words.size(); ++w) {
        if (train_vocab->count(gold[i].words[w])) continue;
        ++r.counts.gold_oov;
        if (gold_matched[w]) ++r.counts.correct_oov;
      }
    }
  }
  const auto ratio = [](std::size_t num, std::size_t den) {
    return den ? static_cast<double>(num) / static_cast<double>(den) : 1.0;
  };
  r.precision = ratio(r.counts.correct_words, r.counts.pred_words);
  r.recall = ratio(r.counts.correct_words, r.counts.gold_words);
  r.f1 = (r.precision + r.recall > 0) ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  if (train_vocab && r.counts.gold_oov > 0) {
    r.oov_recall = static_cast<double>(r.counts.correct_oov) / static_cast<double>(r.counts.gold_oov);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Multi-seed aggregation
// ---------------------------------------------------------------------------

struct MetricSummary {
  double mean = 0.0;
  double stdev = 0.0;  // population standard deviation
};

struct AggregateReport {
  MetricSummary precision, recall, f1;
  std::optional<MetricSummary> oov_recall;
  std::size_t runs = 0;
};

namespace detail {
inline MetricSummary summarize(const std::vector<double>& xs) {
  MetricSummary s;
  for (const double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (const double x : xs) var += (x - s.mean) * (x - s.mean);
  s.stdev = std::sqrt(var / static_cast<double>(xs.size()));
  return s;
}
}  // namespace detail

inline AggregateReport aggregate_runs(std::span<const EvalReport> reports) {
  if (reports.empty()) throw DataError("aggregate_runs: no reports");
  AggregateReport agg;
  agg.runs = reports.size();
  std::vector<double> p, r, f, o;
  for (const EvalReport& rep : reports) {
    p.push_back(rep.precision);
    r.push_back(rep.recall);
    f.push_back(rep.f1);
    if (rep.oov_recall) o.push_back(*rep.oov_recall);
  }
  agg.precision = detail::summarize(p);
  agg.recall = detail::summarize(r);
  agg.f1 = detail::summarize(f);
  if (!o.empty()) agg.oov_recall = detail::summarize(o);
  return agg;
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

inline std::string format_percent(double fraction) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << 100.0 * fraction;
  return os.str();
}

inline std::string render_report(const EvalReport& r) {
  std::ostringstream os;
  os << "precision   " << format_percent(r.precision) << "  (" << r.counts.correct_words << "/"
     << r.counts.pred_words << ")\n";
  os << "recall      " << format_percent(r.recall) << "  (" << r.counts.correct_words << "/"
     << r.counts.gold_words << ")\n";
  os << "f1          " << format_percent(r.f1) << "\n";
  if (r.oov_recall) {
    os << "oov-recall  " << format_percent(*r.oov_recall) << "  (" << r.counts.correct_oov << "/"
       << r.counts.gold_oov << ")\n";
  } else {
    os << "oov-recall  -\n";
  }
  return os.str();
}

inline nlohmann::json report_to_json(const EvalReport& r) {
  nlohmann::json j{{"precision", r.precision},
                   {"recall", r.recall},
                   {"f1", r.f1},
                   {"counts",
                    {{"gold_words", r.counts.gold_words},
                     {"pred_words", r.counts.pred_words},
                     {"correct_words", r.counts.correct_words},
                     {"gold_oov", r.counts.gold_oov},
                     {"correct_oov", r.counts.correct_oov}}}};
  if (r.oov_recall) j["oov_recall"] = *r.oov_recall;
  return j;
}

// "89.21±0.12" style, percentages.
inline std::string format_mean_stdev(const MetricSummary& m) {
  return format_percent(m.mean) + "\xc2\xb1" + format_percent(m.stdev);
}

inline std::string render_aggregate(const AggregateReport& a) {
  std::ostringstream os;
  os << "runs        " << a.runs << "\n";
  os << "precision   " << format_mean_stdev(a.precision) << "\n";
  os << "recall      " << format_mean_stdev(a.recall) << "\n";
  os << "f1          " << format_mean_stdev(a.f1) << "\n";
  os << "oov-recall  " << (a.oov_recall ? format_mean_stdev(*a.oov_recall) : "-") << "\n";
  return os.str();
}

}  // namespace pauseseg

#endif  // PAUSESEG_EVALKIT_HPP
