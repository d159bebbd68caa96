#ifndef PAUSESEG_NORMALIZE_HPP
#define PAUSESEG_NORMALIZE_HPP

#include <algorithm>
#include <string>
#include <string_view>

#include "pauseseg/chinese_numerals.hpp"
#include "pauseseg/error.hpp"
#include "pauseseg/utf8.hpp"

namespace pauseseg {

namespace detail {

struct CodePointRange {
  char32_t lo;
  char32_t hi;
};

// Principal Unicode blocks whose contents are punctuation (P*) or symbols
// (S*). Block-level granularity; letter/digit code points inside mixed
// blocks (e.g. 々 U+3005, 〇 U+3007, circled digits U+2460..) are kept out.
inline constexpr CodePointRange kPunctSymbolRanges[] = {
    {0x0021, 0x002F}, {0x003A, 0x0040}, {0x005B, 0x0060}, {0x007B, 0x007E},
    {0x00A1, 0x00A9}, {0x00AB, 0x00AC}, {0x00AE, 0x00B1}, {0x00B4, 0x00B4},
    {0x00B6, 0x00B8}, {0x00BB, 0x00BB}, {0x00BF, 0x00BF},
    {0x2010, 0x2027}, {0x2030, 0x205E},
    {0x20A0, 0x20BF},                    // currency
    {0x2190, 0x245F},                    // arrows, math, technical
    {0x2500, 0x2BFF},                    // box drawing .. misc symbols
    {0x2E00, 0x2E7F},                    // supplemental punctuation
    {0x3001, 0x3004}, {0x3008, 0x3020}, {0x3030, 0x3030},
    {0x3036, 0x3037}, {0x303D, 0x303F},  // CJK symbols and punctuation
    {0xFE10, 0xFE19}, {0xFE30, 0xFE4F}, {0xFE50, 0xFE6B},
    {0xFF01, 0xFF0F}, {0xFF1A, 0xFF20}, {0xFF3B, 0xFF40}, {0xFF5B, 0xFF65},
    {0xFFE0, 0xFFE6}, {0xFFE8, 0xFFEE},  // fullwidth/halfwidth forms
};

inline constexpr CodePointRange kWhitespaceRanges[] = {
    {0x0009, 0x000D}, {0x0020, 0x0020}, {0x0085, 0x0085}, {0x00A0, 0x00A0},
    {0x1680, 0x1680}, {0x2000, 0x200A}, {0x2028, 0x2029}, {0x202F, 0x202F},
    {0x205F, 0x205F}, {0x3000, 0x3000},
};

// Invisible format controls dropped alongside whitespace: zero-width
// space/joiners and the BOM.
inline constexpr CodePointRange kFormatControlRanges[] = {
    {0x200B, 0x200D}, {0xFEFF, 0xFEFF},
};

template <std::size_t N>
inline bool in_ranges(const CodePointRange (&ranges)[N], char32_t cp) {
  auto it = std::upper_bound(std::begin(ranges), std::end(ranges), cp,
                             [](char32_t c, const CodePointRange& r) { return c < r.lo; });
  return it != std::begin(ranges) && cp <= std::prev(it)->hi;
}

}  // namespace detail

inline bool is_punct_or_symbol(char32_t cp) {
  return detail::in_ranges(detail::kPunctSymbolRanges, cp);
}

inline bool is_whitespace(char32_t cp) {
  return detail::in_ranges(detail::kWhitespaceRanges, cp);
}

// Everything normalize_transcript drops.
inline bool is_removable(char32_t cp) {
  return is_whitespace(cp) || is_punct_or_symbol(cp) ||
         detail::in_ranges(detail::kFormatControlRanges, cp);
}

// Transcript cleanup: each maximal ASCII digit run becomes its spoken
// Chinese reading, punctuation/symbols/whitespace are dropped, everything
// else passes through. Idempotent. Throws DataError when a digit run is
// too large to read (> 99,999,999).
inline std::string normalize_transcript(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char c = text[pos];
    if (c >= '0' && c <= '9') {
      std::size_t end = pos;
      while (end < text.size() && text[end] >= '0' && text[end] <= '9') ++end;
      const std::string_view run = text.substr(pos, end - pos);
      std::string_view significant = run;
      while (significant.size() > 1 && significant.front() == '0') significant.remove_prefix(1);
      if (significant.size() > 8) {
        throw DataError("digit run \"" + std::string(run) + "\" exceeds the supported magnitude");
      }
      std::uint64_t value = 0;
      for (const char d : significant) value = value * 10 + static_cast<std::uint64_t>(d - '0');
      out += chinese_numeral(value);
      pos = end;
      continue;
    }
    const std::size_t start = pos;
    const char32_t cp = utf8::decode_at(text, pos);
    if (!is_removable(cp)) out.append(text.substr(start, pos - start));
  }
  return out;
}

}  // namespace pauseseg

#endif  // PAUSESEG_NORMALIZE_HPP
