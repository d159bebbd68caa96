#ifndef PAUSESEG_LATTICE_HPP
#define PAUSESEG_LATTICE_HPP

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pauseseg/logsumexp.hpp"
#include "pauseseg/mining.hpp"

namespace pauseseg {

// BMES tagging scheme. Codes are fixed and survive serialization.
enum class Label : int { B = 0, M = 1, E = 2, S = 3 };

inline constexpr int kNumLabels = 4;
inline constexpr char kLabelChars[kNumLabels + 1] = "BMES";

inline int code(Label y) { return static_cast<int>(y); }

// Word-internal continuity: B and M must be continued (M/E), E and S must
// be followed by a word start (B/S). Scheme-intrinsic, never learned.
inline constexpr bool kLegalTransition[kNumLabels][kNumLabels] = {
    //          B      M      E      S
    /* B */ {false, true, true, false},
    /* M */ {false, true, true, false},
    /* E */ {true, false, false, true},
    /* S */ {true, false, false, true},
};

using ScoreRow = std::array<double, kNumLabels>;
using EmissionMatrix = std::vector<ScoreRow>;     // [position][label]
using TransitionMatrix = std::array<ScoreRow, kNumLabels>;

namespace detail {
inline constexpr std::uint8_t label_bit(int y) { return static_cast<std::uint8_t>(1u << y); }
inline constexpr std::uint8_t kAllLabels = 0x0f;
inline constexpr std::uint8_t kWordStart = label_bit(0) | label_bit(3);  // {B,S}
inline constexpr std::uint8_t kWordEnd = label_bit(2) | label_bit(3);    // {E,S}
}  // namespace detail

// Per-position allowed label sets over the BMES transition relation. The
// first position may only start a word, the last may only end one, and a
// confirmed boundary at gap k forces {E,S} on its left and {B,S} on its
// right. Every lattice built here admits at least one legal path (all-S
// always survives the constraints).
class LabelLattice {
 public:
  static LabelLattice unconstrained(std::size_t n) { return LabelLattice(n); }

  static LabelLattice from_boundaries(std::size_t n, std::span<const std::size_t> boundaries) {
    LabelLattice lat(n);
    for (const std::size_t k : boundaries) {
      if (k < 1 || k >= n) {
        throw std::out_of_range("lattice boundary " + std::to_string(k) + " outside [1, " +
                                std::to_string(n - 1) + "]");
      }
      lat.masks_[k - 1] &= detail::kWordEnd;
      lat.masks_[k] &= detail::kWordStart;
    }
    return lat;
  }

  std::size_t size() const { return masks_.size(); }

  bool allows(std::size_t pos, Label y) const {
    return (masks_[pos] & detail::label_bit(code(y))) != 0;
  }

  bool allows(std::size_t pos, int y) const { return (masks_[pos] & detail::label_bit(y)) != 0; }

  std::uint8_t mask(std::size_t pos) const { return masks_[pos]; }

  // True when `labels` respects both the allowed sets and the transition
  // relation.
  bool contains(std::span<const Label> labels) const {
    if (labels.size() != size()) return false;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (!allows(i, labels[i])) return false;
      if (i > 0 && !kLegalTransition[code(labels[i - 1])][code(labels[i])]) return false;
    }
    return true;
  }

  friend bool operator==(const LabelLattice&, const LabelLattice&) = default;

 private:
  explicit LabelLattice(std::size_t n) : masks_(n, detail::kAllLabels) {
    if (n == 0) throw std::invalid_argument("lattice length must be >= 1");
    masks_.front() &= detail::kWordStart;
    masks_.back() &= detail::kWordEnd;
  }

  std::vector<std::uint8_t> masks_;
};

inline LabelLattice build_lattice(const PartialAnnotation& pa) {
  return LabelLattice::from_boundaries(pa.chars.size(), pa.boundaries);
}

// Exact number of legal label sequences. Guarded to short lattices; the
// count is only used as a cross-check.
inline std::uint64_t count_legal_paths(const LabelLattice& lat) {
  if (lat.size() > 20) {
    throw std::invalid_argument("count_legal_paths: lattice too long (" +
                                std::to_string(lat.size()) + " > 20)");
  }
  std::array<std::uint64_t, kNumLabels> counts{};
  for (int y = 0; y < kNumLabels; ++y) counts[y] = lat.allows(0, y) ? 1 : 0;
  for (std::size_t i = 1; i < lat.size(); ++i) {
    std::array<std::uint64_t, kNumLabels> next{};
    for (int y = 0; y < kNumLabels; ++y) {
      if (!lat.allows(i, y)) continue;
      for (int p = 0; p < kNumLabels; ++p) {
        if (kLegalTransition[p][y]) next[y] += counts[p];
      }
    }
    counts = next;
  }
  std::uint64_t total = 0;
  for (int y = 0; y < kNumLabels; ++y) total += counts[y];
  return total;
}

namespace detail {
inline void check_dp_inputs(const EmissionMatrix& emissions, const LabelLattice& lat) {
  if (emissions.size() != lat.size()) {
    throw std::invalid_argument("emission rows (" + std::to_string(emissions.size()) +
                                ") do not match lattice length (" + std::to_string(lat.size()) + ")");
  }
}
}  // namespace detail

// Highest-scoring legal path: argmax of sum(emissions[i][y_i]) +
// sum(trans[y_i][y_{i+1}]) over the lattice. Ties are broken toward the
// smallest label code at the latest differing position, so decoding is
// reproducible.
inline std::vector<Label> constrained_viterbi(const EmissionMatrix& emissions,
                                              const TransitionMatrix& trans,
                                              const LabelLattice& lat) {
  detail::check_dp_inputs(emissions, lat);
  const std::size_t n = lat.size();
  std::array<double, kNumLabels> delta;
  std::vector<std::array<int, kNumLabels>> back(n, {-1, -1, -1, -1});
  for (int y = 0; y < kNumLabels; ++y) {
    delta[y] = lat.allows(0, y) ? emissions[0][y] : kLogZero;
  }
  for (std::size_t i = 1; i < n; ++i) {
    std::array<double, kNumLabels> next;
    for (int y = 0; y < kNumLabels; ++y) {
      next[y] = kLogZero;
      if (!lat.allows(i, y)) continue;
      double best = kLogZero;
      int best_prev = -1;
      for (int p = 0; p < kNumLabels; ++p) {
        if (!kLegalTransition[p][y] || is_log_zero(delta[p])) continue;
        const double cand = delta[p] + trans[p][y];
        if (cand > best) {  // strict: first (smallest) code wins ties
          best = cand;
          best_prev = p;
        }
      }
      if (best_prev >= 0) {
        next[y] = best + emissions[i][y];
        back[i][y] = best_prev;
      }
    }
    delta = next;
  }
  int best_final = -1;
  double best_score = kLogZero;
  for (int y = 0; y < kNumLabels; ++y) {
    if (!is_log_zero(delta[y]) && delta[y] > best_score) {
      best_score = delta[y];
      best_final = y;
    }
  }
  if (best_final < 0) throw std::logic_error("constrained_viterbi: no legal path");
  std::vector<Label> path(n);
  path[n - 1] = static_cast<Label>(best_final);
  for (std::size_t i = n - 1; i > 0; --i) {
    path[i - 1] = static_cast<Label>(back[i][code(path[i])]);
  }
  return path;
}

// log sum over legal paths of exp(path score); the constrained partition
// value.
inline double constrained_log_forward(const EmissionMatrix& emissions, const TransitionMatrix& trans,
                                      const LabelLattice& lat) {
  detail::check_dp_inputs(emissions, lat);
  const std::size_t n = lat.size();
  std::array<double, kNumLabels> alpha;
  for (int y = 0; y < kNumLabels; ++y) {
    alpha[y] = lat.allows(0, y) ? emissions[0][y] : kLogZero;
  }
  for (std::size_t i = 1; i < n; ++i) {
    std::array<double, kNumLabels> next;
    for (int y = 0; y < kNumLabels; ++y) {
      next[y] = kLogZero;
      if (!lat.allows(i, y)) continue;
      double acc = kLogZero;
      for (int p = 0; p < kNumLabels; ++p) {
        if (!kLegalTransition[p][y] || is_log_zero(alpha[p])) continue;
        acc = log_add(acc, alpha[p] + trans[p][y]);
      }
      if (!is_log_zero(acc)) next[y] = acc + emissions[i][y];
    }
    alpha = next;
  }
  return log_sum(std::span<const double>(alpha.data(), kNumLabels));
}

// Posterior expectations under the lattice-restricted path distribution.
struct LatticeMarginals {
  double log_partition = kLogZero;
  EmissionMatrix unigram;                               // P(y at i)
  std::vector<std::array<ScoreRow, kNumLabels>> pairwise;  // P(y at i, y' at i+1)
};

inline LatticeMarginals constrained_marginals(const EmissionMatrix& emissions,
                                              const TransitionMatrix& trans,
                                              const LabelLattice& lat) {
  detail::check_dp_inputs(emissions, lat);
  const std::size_t n = lat.size();
  EmissionMatrix alpha(n), beta(n);
  for (int y = 0; y < kNumLabels; ++y) {
    alpha[0][y] = lat.allows(0, y) ? emissions[0][y] : kLogZero;
    beta[n - 1][y] = lat.allows(n - 1, y) ? 0.0 : kLogZero;
  }
  for (std::size_t i = 1; i < n; ++i) {
    for (int y = 0; y < kNumLabels; ++y) {
      alpha[i][y] = kLogZero;
      if (!lat.allows(i, y)) continue;
      double acc = kLogZero;
      for (int p = 0; p < kNumLabels; ++p) {
        if (!kLegalTransition[p][y] || is_log_zero(alpha[i - 1][p])) continue;
        acc = log_add(acc, alpha[i - 1][p] + trans[p][y]);
      }
      if (!is_log_zero(acc)) alpha[i][y] = acc + emissions[i][y];
    }
  }
  for (std::size_t i = n - 1; i > 0; --i) {
    for (int p = 0; p < kNumLabels; ++p) {
      beta[i - 1][p] = kLogZero;
      if (!lat.allows(i - 1, p)) continue;
      double acc = kLogZero;
      for (int y = 0; y < kNumLabels; ++y) {
        if (!kLegalTransition[p][y] || is_log_zero(beta[i][y]) || !lat.allows(i, y)) continue;
        acc = log_add(acc, trans[p][y] + emissions[i][y] + beta[i][y]);
      }
      beta[i - 1][p] = acc;
    }
  }
  LatticeMarginals m;
  m.log_partition = log_sum(std::span<const double>(alpha[n - 1].data(), kNumLabels));
  m.unigram.assign(n, ScoreRow{0, 0, 0, 0});
  for (std::size_t i = 0; i < n; ++i) {
    for (int y = 0; y < kNumLabels; ++y) {
      if (is_log_zero(alpha[i][y]) || is_log_zero(beta[i][y])) continue;
      m.unigram[i][y] = std::exp(alpha[i][y] + beta[i][y] - m.log_partition);
    }
  }
  if (n > 1) {
    m.pairwise.assign(n - 1, {});
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (int p = 0; p < kNumLabels; ++p) {
        for (int y = 0; y < kNumLabels; ++y) {
          m.pairwise[i][p][y] = 0.0;
          if (!kLegalTransition[p][y] || is_log_zero(alpha[i][p]) || is_log_zero(beta[i + 1][y]) ||
              !lat.allows(i + 1, y)) {
            continue;
          }
          m.pairwise[i][p][y] =
              std::exp(alpha[i][p] + trans[p][y] + emissions[i + 1][y] + beta[i + 1][y] -
                       m.log_partition);
        }
      }
    }
  }
  return m;
}

// Debug rendering: one row per label, '#' where the label is allowed.
inline std::string lattice_grid(const LabelLattice& lat) {
  std::string out;
  for (int y = 0; y < kNumLabels; ++y) {
    out += kLabelChars[y];
    for (std::size_t i = 0; i < lat.size(); ++i) {
      out += ' ';
      out += lat.allows(i, y) ? '#' : '.';
    }
    out += '\n';
  }
  return out;
}

}  // namespace pauseseg

#endif  // PAUSESEG_LATTICE_HPP
