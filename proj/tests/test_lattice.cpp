#include <catch2/catch.hpp>

#include "pauseseg/lattice.hpp"
#include "pauseseg/rng.hpp"
#include "oracles.hpp"

using namespace pauseseg;

namespace {

TransitionMatrix zero_transitions() {
  TransitionMatrix t;
  for (int p = 0; p < kNumLabels; ++p) {
    for (int y = 0; y < kNumLabels; ++y) t[p][y] = kLegalTransition[p][y] ? 0.0 : kLogZero;
  }
  return t;
}

std::vector<int> codes(const std::vector<Label>& labels) {
  std::vector<int> out;
  for (const Label y : labels) out.push_back(code(y));
  return out;
}

bool set_equals(const LabelLattice& lat, std::size_t pos, std::initializer_list<Label> labels) {
  int want = 0;
  for (const Label y : labels) want |= 1 << code(y);
  return lat.mask(pos) == want;
}

}  // namespace

TEST_CASE("lattice for two confirmed boundaries matches the constrained grid") {
  PartialAnnotation pa{"w", {"有", "人", "在", "细", "细", "地", "倾", "听"}, {2, 6}};
  const LabelLattice lat = build_lattice(pa);
  REQUIRE(lat.size() == 8);
  CHECK(set_equals(lat, 0, {Label::B, Label::S}));
  CHECK(set_equals(lat, 1, {Label::E, Label::S}));
  CHECK(set_equals(lat, 2, {Label::B, Label::S}));
  CHECK(set_equals(lat, 3, {Label::B, Label::M, Label::E, Label::S}));
  CHECK(set_equals(lat, 4, {Label::B, Label::M, Label::E, Label::S}));
  CHECK(set_equals(lat, 5, {Label::E, Label::S}));
  CHECK(set_equals(lat, 6, {Label::B, Label::S}));
  CHECK(set_equals(lat, 7, {Label::E, Label::S}));
}

TEST_CASE("lattice without boundaries only constrains the endpoints") {
  const LabelLattice lat = build_lattice({"x", {"a", "b", "c"}, {}});
  CHECK(set_equals(lat, 0, {Label::B, Label::S}));
  CHECK(set_equals(lat, 1, {Label::B, Label::M, Label::E, Label::S}));
  CHECK(set_equals(lat, 2, {Label::E, Label::S}));
}

TEST_CASE("single-character lattice forces S") {
  const LabelLattice lat = build_lattice({"x", {"一"}, {}});
  CHECK(set_equals(lat, 0, {Label::S}));
  CHECK(count_legal_paths(lat) == 1);
}

TEST_CASE("legal path counts match enumeration") {
  CHECK(count_legal_paths(LabelLattice::unconstrained(2)) == 2);  // B-E and S-S
  Rng rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(8);
    const auto boundaries = oracle::random_boundaries(rng, n);
    const LabelLattice lat = LabelLattice::from_boundaries(n, boundaries);
    CHECK(count_legal_paths(lat) == oracle::enumerate_paths(n, boundaries).size());
  }
  // the constrained grid above, against full enumeration over 4^8
  const LabelLattice fig = build_lattice({"w", std::vector<std::string>(8, "字"), {2, 6}});
  CHECK(count_legal_paths(fig) == oracle::enumerate_paths(8, {2, 6}).size());
  CHECK_THROWS_AS(count_legal_paths(LabelLattice::unconstrained(21)), std::invalid_argument);
}

TEST_CASE("every lattice admits the all-S path") {
  Rng rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.below(10);
    const LabelLattice lat = LabelLattice::from_boundaries(n, oracle::random_boundaries(rng, n));
    const std::vector<Label> all_s(n, Label::S);
    CHECK(lat.contains(all_s));
    CHECK(count_legal_paths(lat) >= 1);
  }
}

TEST_CASE("adding a boundary never enlarges an allowed set") {
  Rng rng(47);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.below(9);
    auto boundaries = oracle::random_boundaries(rng, n);
    const LabelLattice before = LabelLattice::from_boundaries(n, boundaries);
    std::size_t extra = 1 + rng.below(n - 1);
    if (std::find(boundaries.begin(), boundaries.end(), extra) == boundaries.end()) {
      boundaries.insert(std::lower_bound(boundaries.begin(), boundaries.end(), extra), extra);
    }
    const LabelLattice after = LabelLattice::from_boundaries(n, boundaries);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK((after.mask(i) & ~before.mask(i)) == 0);
    }
  }
}

TEST_CASE("viterbi on a single position returns S") {
  const EmissionMatrix em(1, ScoreRow{0, 0, 0, 0});
  const auto path = constrained_viterbi(em, zero_transitions(), LabelLattice::unconstrained(1));
  REQUIRE(path.size() == 1);
  CHECK(path[0] == Label::S);
}

TEST_CASE("viterbi tie-break is the smallest code at the latest differing position") {
  const LabelLattice lat = build_lattice({"w", std::vector<std::string>(8, "字"), {2, 6}});
  const EmissionMatrix em(8, ScoreRow{0, 0, 0, 0});
  const TransitionMatrix trans = zero_transitions();
  const auto got = codes(constrained_viterbi(em, trans, lat));
  const auto paths = oracle::enumerate_paths(8, {2, 6});
  double best_score = 0.0;
  const auto want = oracle::best_path(paths, em, trans, &best_score);
  CHECK(got == want);
  CHECK(oracle::path_score(got, em, trans) == Approx(best_score));
}

TEST_CASE("viterbi attains the enumerated maximum on random problems") {
  Rng rng(53);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng.below(8);
    const auto boundaries = oracle::random_boundaries(rng, n);
    const LabelLattice lat = LabelLattice::from_boundaries(n, boundaries);
    const EmissionMatrix em = oracle::random_emissions(rng, n);
    const TransitionMatrix trans = oracle::random_transitions(rng);
    const auto got = constrained_viterbi(em, trans, lat);
    REQUIRE(lat.contains(got));
    double best_score = 0.0;
    (void)oracle::best_path(oracle::enumerate_paths(n, boundaries), em, trans, &best_score);
    CHECK(oracle::path_score(codes(got), em, trans) == Approx(best_score).margin(1e-9));
  }
}

TEST_CASE("forward value matches enumeration") {
  Rng rng(59);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng.below(8);
    const auto boundaries = oracle::random_boundaries(rng, n);
    const LabelLattice lat = LabelLattice::from_boundaries(n, boundaries);
    const EmissionMatrix em = oracle::random_emissions(rng, n);
    const TransitionMatrix trans = oracle::random_transitions(rng);
    std::vector<double> scores;
    for (const auto& p : oracle::enumerate_paths(n, boundaries)) {
      scores.push_back(oracle::path_score(p, em, trans));
    }
    const double want = oracle::log_sum_exp(scores);
    const double got = constrained_log_forward(em, trans, lat);
    CHECK(got == Approx(want).epsilon(1e-8));
  }
}

TEST_CASE("fully constrained lattice reduces the forward value to the path score") {
  // one legal path: B E S for "ab|c" with boundary {2}
  const LabelLattice lat = LabelLattice::from_boundaries(3, std::vector<std::size_t>{2});
  Rng rng(61);
  const EmissionMatrix em = oracle::random_emissions(rng, 3);
  TransitionMatrix trans = zero_transitions();
  // make non-S labels dominate so the single B-E path is distinct
  const auto paths = oracle::enumerate_paths(3, {2});
  std::vector<double> scores;
  for (const auto& p : paths) scores.push_back(oracle::path_score(p, em, trans));
  CHECK(constrained_log_forward(em, trans, lat) == Approx(oracle::log_sum_exp(scores)));

  // a lattice narrowed to singleton sets along one path
  const LabelLattice narrow = LabelLattice::from_boundaries(2, std::vector<std::size_t>{1});
  // positions: {E,S} then {B,S}; with boundary at 1 the only paths are
  // S-S, S-B(illegal end)... enumerate instead of hand-reasoning:
  const auto narrow_paths = oracle::enumerate_paths(2, {1});
  REQUIRE(narrow_paths.size() == 1);  // S S
  const EmissionMatrix em2 = oracle::random_emissions(rng, 2);
  CHECK(constrained_log_forward(em2, trans, narrow) ==
        Approx(oracle::path_score(narrow_paths[0], em2, trans)));
}

TEST_CASE("constraining a lattice never raises the forward value") {
  Rng rng(67);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.below(7);
    const auto boundaries = oracle::random_boundaries(rng, n);
    const LabelLattice full = LabelLattice::unconstrained(n);
    const LabelLattice constrained = LabelLattice::from_boundaries(n, boundaries);
    const EmissionMatrix em = oracle::random_emissions(rng, n);
    const TransitionMatrix trans = oracle::random_transitions(rng);
    const double z_full = constrained_log_forward(em, trans, full);
    const double z_con = constrained_log_forward(em, trans, constrained);
    CHECK(z_full >= z_con - 1e-12);
    // max path <= log-sum-exp
    const auto path = constrained_viterbi(em, trans, constrained);
    CHECK(oracle::path_score(codes(path), em, trans) <= z_con + 1e-12);
  }
}

TEST_CASE("marginals are correctly normalized and supported") {
  Rng rng(71);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.below(7);
    const auto boundaries = oracle::random_boundaries(rng, n);
    const LabelLattice lat = LabelLattice::from_boundaries(n, boundaries);
    const EmissionMatrix em = oracle::random_emissions(rng, n);
    const TransitionMatrix trans = oracle::random_transitions(rng);
    const LatticeMarginals m = constrained_marginals(em, trans, lat);
    CHECK(m.log_partition == Approx(constrained_log_forward(em, trans, lat)));
    for (std::size_t i = 0; i < n; ++i) {
      double total = 0.0;
      for (int y = 0; y < kNumLabels; ++y) {
        if (!lat.allows(i, y)) CHECK(m.unigram[i][y] == 0.0);
        total += m.unigram[i][y];
      }
      CHECK(total == Approx(1.0));
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
      double total = 0.0;
      for (int p = 0; p < kNumLabels; ++p) {
        for (int y = 0; y < kNumLabels; ++y) total += m.pairwise[i][p][y];
      }
      CHECK(total == Approx(1.0));
    }
  }
}

TEST_CASE("grid rendering marks allowed cells") {
  const LabelLattice lat = build_lattice({"x", {"a", "b"}, {1}});
  CHECK(lattice_grid(lat) ==
        "B . .\n"
        "M . .\n"
        "E . .\n"
        "S # #\n");
}
