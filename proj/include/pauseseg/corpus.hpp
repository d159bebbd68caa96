#ifndef PAUSESEG_CORPUS_HPP
#define PAUSESEG_CORPUS_HPP

#include <fstream>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "pauseseg/error.hpp"
#include "pauseseg/utf8.hpp"

namespace pauseseg {

// A gold- or system-segmented sentence.
struct SegmentedSentence {
  std::string id;
  std::vector<std::string> words;
  friend bool operator==(const SegmentedSentence&, const SegmentedSentence&) = default;
};

inline std::vector<std::string> chars_of(const SegmentedSentence& s) {
  std::vector<std::string> chars;
  for (const std::string& w : s.words) {
    for (auto& c : utf8::split_chars(w)) chars.push_back(std::move(c));
  }
  return chars;
}

// Gap indices (1-based) at which `words` place a boundary.
inline std::vector<std::size_t> boundaries_of(const SegmentedSentence& s) {
  std::vector<std::size_t> out;
  std::size_t offset = 0;
  for (std::size_t w = 0; w + 1 < s.words.size(); ++w) {
    offset += utf8::char_count(s.words[w]);
    out.push_back(offset);
  }
  return out;
}

// Inverse of boundaries_of: splits chars at the given (sorted, 1-based)
// gap indices.
inline std::vector<std::string> split_words(std::span<const std::string> chars,
                                            std::span<const std::size_t> boundaries) {
  std::vector<std::string> words;
  std::string current;
  std::size_t next = 0;
  for (std::size_t i = 0; i < chars.size(); ++i) {
    current += chars[i];
    if (next < boundaries.size() && boundaries[next] == i + 1) {
      words.push_back(std::move(current));
      current.clear();
      ++next;
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

// One sentence per line, words separated by a single ASCII space, UTF-8.
inline std::vector<SegmentedSentence> read_segmented_stream(std::istream& in,
                                                            const std::string& id_prefix = "s") {
  std::vector<SegmentedSentence> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    SegmentedSentence s;
    s.id = id_prefix + std::to_string(line_no);
    std::size_t pos = 0;
    while (pos < line.size()) {
      const std::size_t sp = line.find(' ', pos);
      const std::size_t end = (sp == std::string::npos) ? line.size() : sp;
      if (end > pos) s.words.push_back(line.substr(pos, end - pos));
      pos = end + 1;
    }
    if (!s.words.empty()) out.push_back(std::move(s));
  }
  return out;
}

inline std::vector<SegmentedSentence> read_segmented_file(const std::string& path,
                                                          const std::string& id_prefix = "s") {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open segmented corpus: " + path);
  return read_segmented_stream(in, id_prefix);
}

inline void write_segmented_stream(std::ostream& out, std::span<const SegmentedSentence> sentences) {
  for (const SegmentedSentence& s : sentences) {
    for (std::size_t w = 0; w < s.words.size(); ++w) {
      if (w) out << ' ';
      out << s.words[w];
    }
    out << '\n';
  }
}

inline void write_segmented_file(const std::string& path, std::span<const SegmentedSentence> sentences) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write segmented corpus: " + path);
  write_segmented_stream(out, sentences);
}

// Raw, unsegmented input: one sentence per line.
inline std::vector<std::string> read_raw_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open input file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

inline std::unordered_set<std::string> word_vocabulary(std::span<const SegmentedSentence> corpus) {
  std::unordered_set<std::string> vocab;
  for (const SegmentedSentence& s : corpus) vocab.insert(s.words.begin(), s.words.end());
  return vocab;
}

}  // namespace pauseseg

#endif  // PAUSESEG_CORPUS_HPP
