#ifndef PAUSESEG_UTF8_HPP
#define PAUSESEG_UTF8_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pauseseg/error.hpp"

namespace pauseseg {
namespace utf8 {

// Bytes in the sequence started by `lead`, or 0 if `lead` cannot start one.
inline int sequence_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x06) return 2;
  if ((lead >> 4) == 0x0e) return 3;
  if ((lead >> 3) == 0x1e) return 4;
  return 0;
}

// Decodes the code point starting at byte `pos`; advances `pos` past it.
inline char32_t decode_at(std::string_view text, std::size_t& pos) {
  const auto lead = static_cast<unsigned char>(text[pos]);
  const int len = sequence_length(lead);
  if (len == 0 || pos + static_cast<std::size_t>(len) > text.size()) {
    throw DataError("malformed UTF-8 at byte offset " + std::to_string(pos));
  }
  static constexpr unsigned char kLeadMask[5] = {0, 0x7f, 0x1f, 0x0f, 0x07};
  char32_t cp = lead & kLeadMask[len];
  for (int k = 1; k < len; ++k) {
    const auto cont = static_cast<unsigned char>(text[pos + k]);
    if ((cont >> 6) != 0x02) {
      throw DataError("malformed UTF-8 at byte offset " + std::to_string(pos + k));
    }
    cp = (cp << 6) | (cont & 0x3f);
  }
  pos += static_cast<std::size_t>(len);
  return cp;
}

inline std::string encode(char32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xc0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3f));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xe0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
    out += static_cast<char>(0x80 | (cp & 0x3f));
  } else {
    out += static_cast<char>(0xf0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3f));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
    out += static_cast<char>(0x80 | (cp & 0x3f));
  }
  return out;
}

// Splits text into single-code-point strings. Throws DataError on bad input.
inline std::vector<std::string> split_chars(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t start = pos;
    (void)decode_at(text, pos);
    out.emplace_back(text.substr(start, pos - start));
  }
  return out;
}

inline std::size_t char_count(std::string_view text) {
  std::size_t n = 0, pos = 0;
  while (pos < text.size()) {
    (void)decode_at(text, pos);
    ++n;
  }
  return n;
}

inline bool is_single_char(std::string_view text) {
  if (text.empty()) return false;
  std::size_t pos = 0;
  const int len = sequence_length(static_cast<unsigned char>(text[0]));
  if (len == 0 || static_cast<std::size_t>(len) != text.size()) return false;
  try {
    (void)decode_at(text, pos);
  } catch (const DataError&) {
    return false;
  }
  return true;
}

// Code point of a single-character string.
inline char32_t code_point(std::string_view single) {
  std::size_t pos = 0;
  const char32_t cp = decode_at(single, pos);
  if (pos != single.size()) throw DataError("expected a single character, got \"" + std::string(single) + "\"");
  return cp;
}

}  // namespace utf8
}  // namespace pauseseg

#endif  // PAUSESEG_UTF8_HPP
