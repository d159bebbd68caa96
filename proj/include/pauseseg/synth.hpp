#ifndef PAUSESEG_SYNTH_HPP
#define PAUSESEG_SYNTH_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_set>
#include <vector>

#include "pauseseg/alignment.hpp"
#include "pauseseg/corpus.hpp"
#include "pauseseg/error.hpp"
#include "pauseseg/rng.hpp"
#include "pauseseg/utf8.hpp"

namespace pauseseg {

// Two-domain synthetic benchmark: a shared core vocabulary plus one
// disjoint tail per domain, gold-segmented text for both, and alignments
// for the target-domain "speech" whose inter-word pauses come from a long
// distribution and intra-word pauses from a short one. `noise` is the
// probability that a gap draws from the wrong distribution.
struct SynthSpec {
  std::size_t core_char_count = 80;
  std::size_t src_tail_char_count = 40;
  std::size_t tgt_tail_char_count = 40;
  std::size_t core_word_count = 120;
  std::size_t src_tail_word_count = 40;
  std::size_t tgt_tail_word_count = 40;

  std::size_t src_train_sentences = 800;
  std::size_t tgt_dev_sentences = 150;
  std::size_t tgt_test_sentences = 150;
  std::size_t speech_sentences = 1000;
  std::size_t min_words = 6;
  std::size_t max_words = 12;
  double tail_fraction = 0.30;

  double noise = 0.0;
  double char_ms_mean = 200, char_ms_stdev = 25, char_ms_min = 150, char_ms_max = 250;
  double intra_ms_mean = 20, intra_ms_stdev = 6, intra_ms_min = 5, intra_ms_max = 35;
  double inter_ms_mean = 90, inter_ms_stdev = 12, inter_ms_min = 65, inter_ms_max = 130;
  double frame_offset_ms = 5.0;

  std::uint64_t seed = 1;
};

struct SynthCorpus {
  std::vector<SegmentedSentence> src_train;
  std::vector<SegmentedSentence> tgt_dev;
  std::vector<SegmentedSentence> tgt_test;
  std::vector<SegmentedSentence> speech_gold;  // id-aligned with `speech`
  std::vector<AlignedSentence> speech;
};

namespace detail {

inline std::vector<std::string> char_pool(char32_t first, std::size_t count) {
  std::vector<std::string> pool;
  pool.reserve(count);
  for (std::size_t i = 0; i < count; ++i) pool.push_back(utf8::encode(first + static_cast<char32_t>(i)));
  return pool;
}

inline std::size_t pick_word_length(Rng& rng) {
  const double u = rng.uniform();
  if (u < 0.40) return 1;
  if (u < 0.85) return 2;
  return 3;
}

inline std::vector<std::string> make_vocab(const std::vector<std::string>& pool, std::size_t count,
                                           Rng& rng) {
  std::vector<std::string> vocab;
  std::unordered_set<std::string> seen;
  std::size_t attempts = 0;
  while (vocab.size() < count) {
    if (++attempts > count * 200 + 1000) {
      throw DataError("synth: character pool too small for " + std::to_string(count) + " words");
    }
    std::string w;
    const std::size_t len = pick_word_length(rng);
    for (std::size_t k = 0; k < len; ++k) w += pool[rng.below(pool.size())];
    if (seen.insert(w).second) vocab.push_back(std::move(w));
  }
  return vocab;
}

inline double clamped_normal(Rng& rng, double mean, double stdev, double lo, double hi) {
  return std::clamp(rng.normal(mean, stdev), lo, hi);
}

}  // namespace detail

inline SynthCorpus synthesize(const SynthSpec& spec) {
  if (spec.core_char_count == 0 || spec.core_word_count == 0) {
    throw DataError("synth: degenerate spec (empty core vocabulary)");
  }
  if (spec.min_words == 0 || spec.max_words < spec.min_words) {
    throw DataError("synth: degenerate spec (bad sentence length range)");
  }
  if (!(spec.frame_offset_ms > 0)) throw DataError("synth: frame_offset_ms must be positive");

  Rng rng(spec.seed);
  const auto core_chars = detail::char_pool(U'一', spec.core_char_count);
  const auto src_chars = detail::char_pool(U'一' + spec.core_char_count, spec.src_tail_char_count);
  const auto tgt_chars = detail::char_pool(
      U'一' + spec.core_char_count + spec.src_tail_char_count, spec.tgt_tail_char_count);

  const auto core_vocab = detail::make_vocab(core_chars, spec.core_word_count, rng);
  const auto src_tail = spec.src_tail_word_count
                            ? detail::make_vocab(src_chars, spec.src_tail_word_count, rng)
                            : std::vector<std::string>{};
  const auto tgt_tail = spec.tgt_tail_word_count
                            ? detail::make_vocab(tgt_chars, spec.tgt_tail_word_count, rng)
                            : std::vector<std::string>{};

  const auto sample_sentence = [&](const std::vector<std::string>& tail) {
    std::vector<std::string> words;
    const std::size_t n = spec.min_words + rng.below(spec.max_words - spec.min_words + 1);
    for (std::size_t w = 0; w < n; ++w) {
      const bool from_tail = !tail.empty() && rng.bernoulli(spec.tail_fraction);
      const auto& vocab = from_tail ? tail : core_vocab;
      words.push_back(vocab[rng.below(vocab.size())]);
    }
    return words;
  };

  SynthCorpus out;
  for (std::size_t i = 0; i < spec.src_train_sentences; ++i) {
    out.src_train.push_back({"src" + std::to_string(i + 1), sample_sentence(src_tail)});
  }
  for (std::size_t i = 0; i < spec.tgt_dev_sentences; ++i) {
    out.tgt_dev.push_back({"dev" + std::to_string(i + 1), sample_sentence(tgt_tail)});
  }
  for (std::size_t i = 0; i < spec.tgt_test_sentences; ++i) {
    out.tgt_test.push_back({"test" + std::to_string(i + 1), sample_sentence(tgt_tail)});
  }

  for (std::size_t i = 0; i < spec.speech_sentences; ++i) {
    SegmentedSentence gold{"sp" + std::to_string(i + 1), sample_sentence(tgt_tail)};
    AlignedSentence aligned;
    aligned.id = gold.id;
    aligned.chars = chars_of(gold);
    aligned.frame_offset_ms = spec.frame_offset_ms;

    // word-boundary gap set
    std::unordered_set<std::size_t> boundary_gaps;
    for (const std::size_t b : boundaries_of(gold)) boundary_gaps.insert(b);

    std::int64_t t = 0;
    for (std::size_t c = 0; c < aligned.chars.size(); ++c) {
      if (c > 0) {
        const bool at_boundary = boundary_gaps.count(c) > 0;
        const bool draw_long = at_boundary != rng.bernoulli(spec.noise);
        const double ms =
            draw_long ? detail::clamped_normal(rng, spec.inter_ms_mean, spec.inter_ms_stdev,
                                               spec.inter_ms_min, spec.inter_ms_max)
                      : detail::clamped_normal(rng, spec.intra_ms_mean, spec.intra_ms_stdev,
                                               spec.intra_ms_min, spec.intra_ms_max);
        t += static_cast<std::int64_t>(std::lround(ms / spec.frame_offset_ms));
      }
      const double char_ms = detail::clamped_normal(rng, spec.char_ms_mean, spec.char_ms_stdev,
                                                    spec.char_ms_min, spec.char_ms_max);
      const auto frames =
          std::max<std::int64_t>(1, std::lround(char_ms / spec.frame_offset_ms));
      aligned.spans.push_back({t, t + frames});
      t += frames;
    }
    out.speech_gold.push_back(std::move(gold));
    out.speech.push_back(std::move(aligned));
  }
  return out;
}

// File layout written by the synth command.
struct SynthPaths {
  std::string src_train;
  std::string tgt_dev;
  std::string tgt_test;
  std::string speech;
  std::string speech_gold;
};

inline SynthPaths synth_paths(const std::string& dir) {
  return {dir + "/src_train.seg", dir + "/tgt_dev.seg", dir + "/tgt_test.seg",
          dir + "/speech.jsonl", dir + "/speech_gold.seg"};
}

inline SynthPaths write_synth_corpus(const SynthCorpus& corpus, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const SynthPaths paths = synth_paths(dir);
  write_segmented_file(paths.src_train, corpus.src_train);
  write_segmented_file(paths.tgt_dev, corpus.tgt_dev);
  write_segmented_file(paths.tgt_test, corpus.tgt_test);
  write_alignment_file(paths.speech, corpus.speech);
  write_segmented_file(paths.speech_gold, corpus.speech_gold);
  return paths;
}

}  // namespace pauseseg

#endif  // PAUSESEG_SYNTH_HPP
