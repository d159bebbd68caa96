#include <catch2/catch.hpp>

#include <sstream>

#include "pauseseg/alignment.hpp"
#include "pauseseg/rng.hpp"
#include "oracles.hpp"

using namespace pauseseg;

namespace {

AlignedSentence random_sentence(Rng& rng, std::size_t n) {
  AlignedSentence s;
  s.id = "r" + std::to_string(rng.below(100000));
  s.chars = oracle::random_chars(rng, n);
  std::int64_t t = static_cast<std::int64_t>(rng.below(20));
  for (std::size_t i = 0; i < n; ++i) {
    const auto dur = static_cast<std::int64_t>(rng.below(60));
    s.spans.push_back({t, t + dur});
    t += dur + static_cast<std::int64_t>(rng.below(30));
  }
  s.frame_offset_ms = 5.0;
  return s;
}

}  // namespace

TEST_CASE("parse accepts a minimal well-formed record") {
  std::istringstream in(
      R"({"id":"s1","chars":["有","人"],"spans":[[0,40],[50,90]],"frame_offset_ms":5})");
  const auto result = parse_alignment_stream(in);
  REQUIRE(result.sentences.size() == 1);
  REQUIRE(result.rejections.empty());
  const AlignedSentence& s = result.sentences[0];
  CHECK(s.id == "s1");
  CHECK(s.size() == 2);
  CHECK(s.chars[0] == "有");
  CHECK(s.spans[1] == FrameSpan{50, 90});
  CHECK(s.frame_offset_ms == 5.0);
}

TEST_CASE("parse rejects a record whose span begins after it ends") {
  std::istringstream in(R"({"id":"bad","chars":["x"],"spans":[[10,5]],"frame_offset_ms":5})");
  const auto result = parse_alignment_stream(in);
  CHECK(result.sentences.empty());
  REQUIRE(result.rejections.size() == 1);
  CHECK(result.rejections[0].line == 1);
  CHECK(result.rejections[0].reason.find("begin exceeds end") != std::string::npos);
}

TEST_CASE("parse of an empty stream yields nothing and no rejections") {
  std::istringstream in("");
  const auto result = parse_alignment_stream(in);
  CHECK(result.sentences.empty());
  CHECK(result.rejections.empty());
}

TEST_CASE("malformed JSON lines are reported with their line number") {
  std::istringstream in(
      "{\"id\":\"a\",\"chars\":[\"x\"],\"spans\":[[0,1]]}\n"
      "not json at all\n"
      "{\"id\":\"b\",\"chars\":[\"y\"],\"spans\":[[0,2]]}\n");
  const auto result = parse_alignment_stream(in);
  CHECK(result.sentences.size() == 2);
  REQUIRE(result.rejections.size() == 1);
  CHECK(result.rejections[0].line == 2);
}

TEST_CASE("frame_offset_ms defaults to 5 when absent") {
  std::istringstream in(R"({"id":"a","chars":["x"],"spans":[[0,10]]})");
  const auto result = parse_alignment_stream(in);
  REQUIRE(result.sentences.size() == 1);
  CHECK(result.sentences[0].frame_offset_ms == 5.0);
}

TEST_CASE("unreadable alignment file is a fatal error") {
  CHECK_THROWS_AS(parse_alignment_file("/nonexistent/alignments.jsonl"), DataError);
}

TEST_CASE("overlapping spans are rejected unless negative gaps are allowed") {
  const std::string line = R"({"id":"o","chars":["x","y"],"spans":[[0,30],[20,50]]})";
  {
    std::istringstream in(line);
    const auto strict = parse_alignment_stream(in);
    CHECK(strict.sentences.empty());
    REQUIRE(strict.rejections.size() == 1);
  }
  {
    std::istringstream in(line);
    AlignmentParseOptions opts;
    opts.allow_negative_gaps = true;
    const auto lax = parse_alignment_stream(in, opts);
    REQUIRE(lax.sentences.size() == 1);
    CHECK(pause_duration(lax.sentences[0], 1) == -50.0);  // (20-30)*5
  }
}

TEST_CASE("pause duration follows the gap formula") {
  AlignedSentence s{"s", {"a", "b"}, {{0, 40}, {50, 90}}, 5.0};
  CHECK(pause_duration(s, 1) == 50.0);
  s.spans = {{0, 40}, {40, 80}};
  CHECK(pause_duration(s, 1) == 0.0);
  s.spans = {{0, 10}, {25, 30}};
  s.frame_offset_ms = 10.0;
  CHECK(pause_duration(s, 1) == 150.0);
  CHECK_THROWS_AS(pause_duration(s, 0), std::out_of_range);
  CHECK_THROWS_AS(pause_duration(s, 2), std::out_of_range);
}

TEST_CASE("character duration follows the span formula") {
  AlignedSentence s{"s", {"a"}, {{0, 48}}, 5.0};
  CHECK(char_duration(s, 1) == 240.0);
  s.spans = {{7, 7}};
  CHECK(char_duration(s, 1) == 0.0);
  s.spans = {{10, 30}};
  CHECK(char_duration(s, 1) == 100.0);
  CHECK_THROWS_AS(char_duration(s, 0), std::out_of_range);
  CHECK_THROWS_AS(char_duration(s, 2), std::out_of_range);
}

TEST_CASE("duration profile composes the per-gap and per-char values") {
  AlignedSentence s{"s", {"a", "b"}, {{0, 40}, {50, 90}}, 5.0};
  const DurationProfile p = duration_profile(s);
  REQUIRE(p.pause_ms.size() == 1);
  REQUIRE(p.char_ms.size() == 2);
  CHECK(p.pause_ms[0] == 50.0);
  CHECK(p.char_ms[0] == 200.0);
  CHECK(p.char_ms[1] == 200.0);
  CHECK(p.mean_char_ms == Approx(200.0));
}

TEST_CASE("single-character profile has no pauses and mean equal to its char") {
  AlignedSentence s{"s", {"a"}, {{3, 9}}, 5.0};
  const DurationProfile p = duration_profile(s);
  CHECK(p.pause_ms.empty());
  CHECK(p.mean_char_ms == Approx(30.0));
}

TEST_CASE("eight equal characters give the expected mean duration") {
  AlignedSentence s;
  s.id = "m";
  std::int64_t t = 0;
  for (int i = 0; i < 8; ++i) {
    s.chars.push_back("字");
    s.spans.push_back({t, t + 48});
    t += 48 + 10;
  }
  CHECK(duration_profile(s).mean_char_ms == Approx(240.0));
}

TEST_CASE("profile pauses agree with pause_duration at every gap") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const AlignedSentence s = random_sentence(rng, 1 + rng.below(12));
    const DurationProfile p = duration_profile(s);
    REQUIRE(p.pause_ms.size() == s.size() - 1);
    for (std::size_t k = 1; k < s.size(); ++k) {
      CHECK(p.pause_ms[k - 1] == pause_duration(s, k));
      CHECK(pause_duration(s, k) >= 0.0);
    }
  }
}

TEST_CASE("parse-serialize-parse round-trips to identical values") {
  Rng rng(23);
  std::vector<AlignedSentence> sentences;
  for (int i = 0; i < 40; ++i) sentences.push_back(random_sentence(rng, 1 + rng.below(10)));
  std::ostringstream out;
  write_alignment_stream(out, sentences);
  std::istringstream in(out.str());
  const auto result = parse_alignment_stream(in);
  CHECK(result.rejections.empty());
  CHECK(result.sentences == sentences);
}
