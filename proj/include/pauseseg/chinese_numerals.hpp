#ifndef PAUSESEG_CHINESE_NUMERALS_HPP
#define PAUSESEG_CHINESE_NUMERALS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pauseseg {

inline constexpr std::uint64_t kMaxChineseNumeral = 99'999'999ULL;

namespace detail {

inline const char* const kNumeralDigits[10] = {"零", "一", "二", "三", "四",
                                               "五", "六", "七", "八", "九"};

// Reads a group of 1..9999. `spell_leading_ten` forces 一十 for a leading
// tens digit of 1 (needed when the group follows 万, e.g. 一万零一十三).
inline std::string read_group(unsigned v, bool spell_leading_ten) {
  static const char* const kUnits[4] = {"", "十", "百", "千"};
  const unsigned digits[4] = {v % 10, (v / 10) % 10, (v / 100) % 10, (v / 1000) % 10};
  std::string out;
  bool emitted = false;   // a nonzero digit has been written
  bool zero_gap = false;  // zeros skipped since the last written digit
  for (int place = 3; place >= 0; --place) {
    const unsigned d = digits[place];
    if (d == 0) {
      if (emitted) zero_gap = true;
      continue;
    }
    if (zero_gap) {
      out += "零";
      zero_gap = false;
    }
    if (place == 1 && d == 1 && !emitted && !spell_leading_ten) {
      out += "十";  // 10..19 at the head of the number: bare 十
    } else {
      // colloquial 两 in the hundreds position: 200 -> 两百, 1200 -> 一千两百
      out += (place == 2 && d == 2) ? "两" : kNumeralDigits[d];
      out += kUnits[place];
    }
    emitted = true;
  }
  return out;
}

}  // namespace detail

// Spoken-Chinese reading of an integer in [0, 99'999'999].
//   0 -> 零, 10 -> 十, 1200 -> 一千两百, 10013 -> 一万零一十三, 120000 -> 十二万
inline std::string chinese_numeral(std::uint64_t value) {
  if (value > kMaxChineseNumeral) {
    throw std::out_of_range("chinese_numeral: " + std::to_string(value) + " exceeds " +
                            std::to_string(kMaxChineseNumeral));
  }
  if (value == 0) return "零";
  const auto high = static_cast<unsigned>(value / 10000);
  const auto low = static_cast<unsigned>(value % 10000);
  if (high == 0) return detail::read_group(low, false);
  std::string out = detail::read_group(high, false) + "万";
  if (low == 0) return out;
  if (low < 1000) out += "零";  // gap between 万 and a short tail: 10013 -> 一万零一十三
  out += detail::read_group(low, true);
  return out;
}

}  // namespace pauseseg

#endif  // PAUSESEG_CHINESE_NUMERALS_HPP
