#ifndef PAUSESEG_ALIGNMENT_HPP
#define PAUSESEG_ALIGNMENT_HPP

#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pauseseg/error.hpp"
#include "pauseseg/utf8.hpp"

namespace pauseseg {

inline constexpr double kDefaultFrameOffsetMs = 5.0;

// Frame index range of one character: frames [begin, end].
struct FrameSpan {
  std::int64_t begin = 0;
  std::int64_t end = 0;
  friend bool operator==(const FrameSpan&, const FrameSpan&) = default;
};

// One transcript sentence with a per-character frame span, as produced by a
// character-level forced aligner.
struct AlignedSentence {
  std::string id;
  std::vector<std::string> chars;  // one character per entry
  std::vector<FrameSpan> spans;    // same length as chars
  double frame_offset_ms = kDefaultFrameOffsetMs;

  std::size_t size() const { return chars.size(); }
  friend bool operator==(const AlignedSentence&, const AlignedSentence&) = default;
};

// Why `s` is malformed, or nullopt if it is well-formed. With
// `allow_negative_gaps`, span overlap between neighbours is tolerated
// (the resulting negative pauses fail every mining threshold anyway).
inline std::optional<std::string> invariant_violation(const AlignedSentence& s,
                                                      bool allow_negative_gaps = false) {
  if (s.chars.empty()) return "sentence has no characters";
  if (s.spans.size() != s.chars.size()) {
    return "spans/chars length mismatch (" + std::to_string(s.spans.size()) + " vs " +
           std::to_string(s.chars.size()) + ")";
  }
  if (!(s.frame_offset_ms > 0)) return "frame_offset_ms must be positive";
  for (std::size_t i = 0; i < s.chars.size(); ++i) {
    if (!utf8::is_single_char(s.chars[i])) {
      return "chars[" + std::to_string(i) + "] is not a single character";
    }
    if (s.spans[i].begin < 0) return "negative frame index at char " + std::to_string(i + 1);
    if (s.spans[i].begin > s.spans[i].end) {
      return "span begin exceeds end at char " + std::to_string(i + 1);
    }
  }
  if (!allow_negative_gaps) {
    for (std::size_t i = 0; i + 1 < s.spans.size(); ++i) {
      if (s.spans[i].end > s.spans[i + 1].begin) {
        return "overlapping spans at gap " + std::to_string(i + 1);
      }
    }
  }
  return std::nullopt;
}

// Pause between characters `gap` and `gap`+1 in milliseconds; gap indices
// are 1-based, 1 <= gap <= n-1, matching the wire format.
inline double pause_duration(const AlignedSentence& s, std::size_t gap) {
  if (gap < 1 || gap >= s.size()) {
    throw std::out_of_range("pause_duration: gap " + std::to_string(gap) + " outside [1, " +
                            std::to_string(s.size() == 0 ? 0 : s.size() - 1) + "]");
  }
  return static_cast<double>(s.spans[gap].begin - s.spans[gap - 1].end) * s.frame_offset_ms;
}

// Time spent pronouncing character `index` (1-based) in milliseconds.
inline double char_duration(const AlignedSentence& s, std::size_t index) {
  if (index < 1 || index > s.size()) {
    throw std::out_of_range("char_duration: index " + std::to_string(index) + " outside [1, " +
                            std::to_string(s.size()) + "]");
  }
  const FrameSpan& sp = s.spans[index - 1];
  return static_cast<double>(sp.end - sp.begin) * s.frame_offset_ms;
}

struct DurationProfile {
  std::vector<double> pause_ms;  // pause_ms[k-1] is the gap between chars k and k+1
  std::vector<double> char_ms;
  double mean_char_ms = 0.0;
};

inline DurationProfile duration_profile(const AlignedSentence& s) {
  const std::size_t n = s.size();
  DurationProfile p;
  p.char_ms.reserve(n);
  if (n > 1) p.pause_ms.reserve(n - 1);
  double total = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const double d = char_duration(s, i);
    p.char_ms.push_back(d);
    total += d;
  }
  for (std::size_t k = 1; k < n; ++k) p.pause_ms.push_back(pause_duration(s, k));
  p.mean_char_ms = total / static_cast<double>(n);
  return p;
}

// ---------------------------------------------------------------------------
// JSONL I/O
//   {"id": "...", "chars": ["有","人"], "spans": [[0,40],[50,90]], "frame_offset_ms": 5}
// ---------------------------------------------------------------------------

struct RecordRejection {
  std::size_t line = 0;
  std::string reason;
};

struct AlignmentParseResult {
  std::vector<AlignedSentence> sentences;
  std::vector<RecordRejection> rejections;
};

struct AlignmentParseOptions {
  double default_frame_offset_ms = kDefaultFrameOffsetMs;
  bool allow_negative_gaps = false;
};

inline AlignedSentence alignment_from_json(const nlohmann::json& j,
                                           double default_frame_offset_ms = kDefaultFrameOffsetMs) {
  if (!j.is_object()) throw DataError("record is not a JSON object");
  AlignedSentence s;
  if (!j.contains("id") || !j.at("id").is_string()) throw DataError("missing string field \"id\"");
  s.id = j.at("id").get<std::string>();
  if (!j.contains("chars") || !j.at("chars").is_array()) throw DataError("missing array field \"chars\"");
  for (const auto& c : j.at("chars")) {
    if (!c.is_string()) throw DataError("\"chars\" entries must be strings");
    s.chars.push_back(c.get<std::string>());
  }
  if (!j.contains("spans") || !j.at("spans").is_array()) throw DataError("missing array field \"spans\"");
  for (const auto& sp : j.at("spans")) {
    if (!sp.is_array() || sp.size() != 2 || !sp[0].is_number_integer() || !sp[1].is_number_integer()) {
      throw DataError("\"spans\" entries must be [begin, end] integer pairs");
    }
    s.spans.push_back({sp[0].get<std::int64_t>(), sp[1].get<std::int64_t>()});
  }
  if (j.contains("frame_offset_ms")) {
    if (!j.at("frame_offset_ms").is_number()) throw DataError("\"frame_offset_ms\" must be a number");
    s.frame_offset_ms = j.at("frame_offset_ms").get<double>();
  } else {
    s.frame_offset_ms = default_frame_offset_ms;
  }
  return s;
}

inline nlohmann::json alignment_to_json(const AlignedSentence& s) {
  nlohmann::json spans = nlohmann::json::array();
  for (const FrameSpan& sp : s.spans) spans.push_back({sp.begin, sp.end});
  return nlohmann::json{{"id", s.id},
                        {"chars", s.chars},
                        {"spans", std::move(spans)},
                        {"frame_offset_ms", s.frame_offset_ms}};
}

// Reads one record per line. Records that fail to parse or violate the
// span invariants are skipped and reported in `rejections`; blank lines
// are ignored.
inline AlignmentParseResult parse_alignment_stream(std::istream& in,
                                                   const AlignmentParseOptions& opts = {}) {
  AlignmentParseResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    AlignedSentence s;
    try {
      s = alignment_from_json(nlohmann::json::parse(line), opts.default_frame_offset_ms);
    } catch (const nlohmann::json::exception& e) {
      result.rejections.push_back({line_no, std::string("invalid JSON: ") + e.what()});
      continue;
    } catch (const DataError& e) {
      result.rejections.push_back({line_no, e.what()});
      continue;
    }
    if (auto why = invariant_violation(s, opts.allow_negative_gaps)) {
      result.rejections.push_back({line_no, "record \"" + s.id + "\": " + *why});
      continue;
    }
    result.sentences.push_back(std::move(s));
  }
  return result;
}

inline AlignmentParseResult parse_alignment_file(const std::string& path,
                                                 const AlignmentParseOptions& opts = {}) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open alignment file: " + path);
  return parse_alignment_stream(in, opts);
}

inline void write_alignment_stream(std::ostream& out, std::span<const AlignedSentence> sentences) {
  for (const AlignedSentence& s : sentences) out << alignment_to_json(s).dump() << '\n';
}

inline void write_alignment_file(const std::string& path, std::span<const AlignedSentence> sentences) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write alignment file: " + path);
  write_alignment_stream(out, sentences);
}

inline void write_rejection_report(const std::string& path, std::span<const RecordRejection> rejections) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write rejection report: " + path);
  for (const RecordRejection& r : rejections) out << r.line << '\t' << r.reason << '\n';
}

}  // namespace pauseseg

#endif  // PAUSESEG_ALIGNMENT_HPP
