#ifndef PAUSESEG_MINING_HPP
#define PAUSESEG_MINING_HPP

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "pauseseg/alignment.hpp"
#include "pauseseg/corpus.hpp"
#include "pauseseg/error.hpp"

namespace pauseseg {

// Thresholds of the two-condition pause rule: a gap is a word boundary
// when its pause is at least `min_ms` AND at least `alpha` times the
// sentence's mean character duration.
struct MiningConfig {
  double min_ms = 50.0;
  double alpha = 0.30;
};

// A sentence with a set of confirmed word boundaries. Boundaries are
// 1-based gap indices; gaps not listed are unknown, not "joined".
struct PartialAnnotation {
  std::string id;
  std::vector<std::string> chars;
  std::vector<std::size_t> boundaries;  // strictly increasing, within [1, n-1]
  friend bool operator==(const PartialAnnotation&, const PartialAnnotation&) = default;
};

inline PartialAnnotation mine_boundaries(const AlignedSentence& s, const MiningConfig& cfg) {
  const DurationProfile profile = duration_profile(s);
  PartialAnnotation pa{s.id, s.chars, {}};
  for (std::size_t gap = 1; gap < s.size(); ++gap) {
    const double pause = profile.pause_ms[gap - 1];
    if (pause >= cfg.min_ms && pause >= cfg.alpha * profile.mean_char_ms) {
      pa.boundaries.push_back(gap);
    }
  }
  return pa;
}

struct MiningStats {
  std::size_t sentences = 0;
  std::size_t boundaries = 0;
};

struct MiningResult {
  std::vector<PartialAnnotation> annotations;
  MiningStats stats;
};

// Sentences that yield no boundary are kept: their first/last-character
// constraints still matter downstream.
inline MiningResult mine_corpus(std::span<const AlignedSentence> sentences, const MiningConfig& cfg) {
  MiningResult result;
  result.annotations.reserve(sentences.size());
  for (const AlignedSentence& s : sentences) {
    PartialAnnotation pa = mine_boundaries(s, cfg);
    result.stats.boundaries += pa.boundaries.size();
    result.annotations.push_back(std::move(pa));
  }
  result.stats.sentences = sentences.size();
  return result;
}

// ---------------------------------------------------------------------------
// Boundary-level scoring against a gold segmentation
// ---------------------------------------------------------------------------

struct BoundaryQuality {
  double precision = 1.0;
  double recall = 1.0;
  double f1 = 1.0;
  std::size_t mined = 0;
  std::size_t gold = 0;
  std::size_t matched = 0;
};

// Scores mined boundary sets against gold segmentations. Inputs are
// index-aligned and must describe the same character sequences; an empty
// mined set scores precision 1.0 by convention.
inline BoundaryQuality boundary_quality(std::span<const PartialAnnotation> mined,
                                        std::span<const SegmentedSentence> gold) {
  if (mined.size() != gold.size()) {
    throw DataError("boundary_quality: " + std::to_string(mined.size()) + " mined vs " +
                    std::to_string(gold.size()) + " gold sentences");
  }
  BoundaryQuality q;
  for (std::size_t i = 0; i < mined.size(); ++i) {
    if (chars_of(gold[i]) != mined[i].chars) {
      throw DataError("boundary_quality: character mismatch for sentence \"" + mined[i].id + "\"");
    }
    const std::vector<std::size_t> gold_b = boundaries_of(gold[i]);
    q.mined += mined[i].boundaries.size();
    q.gold += gold_b.size();
    std::vector<std::size_t> both;
    std::set_intersection(mined[i].boundaries.begin(), mined[i].boundaries.end(), gold_b.begin(),
                          gold_b.end(), std::back_inserter(both));
    q.matched += both.size();
  }
  q.precision = q.mined ? static_cast<double>(q.matched) / static_cast<double>(q.mined) : 1.0;
  q.recall = q.gold ? static_cast<double>(q.matched) / static_cast<double>(q.gold) : 1.0;
  q.f1 = (q.precision + q.recall > 0)
             ? 2.0 * q.precision * q.recall / (q.precision + q.recall)
             : 0.0;
  return q;
}

// ---------------------------------------------------------------------------
// Threshold sweep
// ---------------------------------------------------------------------------

struct SweepRow {
  double min_ms = 0.0;
  double alpha = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t boundaries = 0;
};

inline const std::vector<double>& default_min_grid() {
  static const std::vector<double> grid{30, 40, 50, 60, 70};
  return grid;
}

inline const std::vector<double>& default_alpha_grid() {
  static const std::vector<double> grid{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  return grid;
}

inline std::vector<SweepRow> sweep_thresholds(std::span<const AlignedSentence> sentences,
                                              std::span<const SegmentedSentence> gold,
                                              std::span<const double> min_grid,
                                              std::span<const double> alpha_grid) {
  if (min_grid.empty() || alpha_grid.empty()) throw DataError("sweep_thresholds: empty grid");
  std::vector<SweepRow> rows;
  rows.reserve(min_grid.size() * alpha_grid.size());
  for (const double min_ms : min_grid) {
    for (const double alpha : alpha_grid) {
      const MiningResult mined = mine_corpus(sentences, {min_ms, alpha});
      const BoundaryQuality q = boundary_quality(mined.annotations, gold);
      rows.push_back({min_ms, alpha, q.precision, q.recall, q.f1, q.mined});
    }
  }
  return rows;
}

inline void write_sweep_tsv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "min_ms\talpha\tprecision\trecall\tf1\tboundaries\n";
  out << std::fixed;
  for (const SweepRow& r : rows) {
    out << std::setprecision(2) << r.min_ms << '\t' << r.alpha << '\t' << std::setprecision(6)
        << r.precision << '\t' << r.recall << '\t' << r.f1 << '\t' << r.boundaries << '\n';
  }
}

// ---------------------------------------------------------------------------
// Partial-annotation JSONL
//   {"id": "...", "text": "有人在倾听", "boundaries": [2, 3]}
// ---------------------------------------------------------------------------

inline nlohmann::json partial_to_json(const PartialAnnotation& pa) {
  std::string text;
  for (const std::string& c : pa.chars) text += c;
  return nlohmann::json{{"id", pa.id}, {"text", std::move(text)}, {"boundaries", pa.boundaries}};
}

inline PartialAnnotation partial_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("id") || !j.at("id").is_string() || !j.contains("text") ||
      !j.at("text").is_string() || !j.contains("boundaries") || !j.at("boundaries").is_array()) {
    throw DataError("partial annotation must be {\"id\", \"text\", \"boundaries\"}");
  }
  PartialAnnotation pa;
  pa.id = j.at("id").get<std::string>();
  pa.chars = utf8::split_chars(j.at("text").get<std::string>());
  if (pa.chars.empty()) throw DataError("record \"" + pa.id + "\": empty text");
  std::size_t prev = 0;
  for (const auto& b : j.at("boundaries")) {
    if (!b.is_number_unsigned() && !b.is_number_integer()) {
      throw DataError("record \"" + pa.id + "\": boundaries must be integers");
    }
    const auto v = b.get<std::int64_t>();
    if (v < 1 || static_cast<std::size_t>(v) >= pa.chars.size()) {
      throw DataError("record \"" + pa.id + "\": boundary " + std::to_string(v) + " outside [1, " +
                      std::to_string(pa.chars.size() - 1) + "]");
    }
    if (static_cast<std::size_t>(v) <= prev) {
      throw DataError("record \"" + pa.id + "\": boundaries must be strictly increasing");
    }
    prev = static_cast<std::size_t>(v);
    pa.boundaries.push_back(prev);
  }
  return pa;
}

inline std::vector<PartialAnnotation> read_partial_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open partial-annotation file: " + path);
  std::vector<PartialAnnotation> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      out.push_back(partial_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": invalid JSON: " + e.what());
    } catch (const DataError& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

inline void write_partial_file(const std::string& path, std::span<const PartialAnnotation> annotations) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write partial-annotation file: " + path);
  for (const PartialAnnotation& pa : annotations) out << partial_to_json(pa).dump() << '\n';
}

// Treats a fully segmented sentence as a (complete) set of boundary
// assertions.
inline PartialAnnotation partial_from_segmentation(const SegmentedSentence& s) {
  return PartialAnnotation{s.id, chars_of(s), boundaries_of(s)};
}

}  // namespace pauseseg

#endif  // PAUSESEG_MINING_HPP
