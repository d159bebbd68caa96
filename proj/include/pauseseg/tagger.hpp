#ifndef PAUSESEG_TAGGER_HPP
#define PAUSESEG_TAGGER_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pauseseg/corpus.hpp"
#include "pauseseg/error.hpp"
#include "pauseseg/evalkit.hpp"
#include "pauseseg/features.hpp"
#include "pauseseg/lattice.hpp"
#include "pauseseg/mining.hpp"
#include "pauseseg/rng.hpp"

namespace pauseseg {

// ---------------------------------------------------------------------------
// BMES <-> word sequences
// ---------------------------------------------------------------------------

inline std::vector<Label> words_to_labels(std::span<const std::string> words) {
  std::vector<Label> labels;
  for (const std::string& w : words) {
    const std::size_t len = utf8::char_count(w);
    if (len == 0) throw DataError("words_to_labels: empty word");
    if (len == 1) {
      labels.push_back(Label::S);
      continue;
    }
    labels.push_back(Label::B);
    for (std::size_t k = 2; k < len; ++k) labels.push_back(Label::M);
    labels.push_back(Label::E);
  }
  return labels;
}

// Position (1-based) of the first scheme violation, or nullopt.
inline std::optional<std::size_t> scheme_violation(std::span<const Label> labels) {
  if (labels.empty()) return 1;
  if (labels.front() == Label::M || labels.front() == Label::E) return 1;
  for (std::size_t i = 1; i < labels.size(); ++i) {
    if (!kLegalTransition[code(labels[i - 1])][code(labels[i])]) return i + 1;
  }
  if (labels.back() == Label::B || labels.back() == Label::M) return labels.size();
  return std::nullopt;
}

enum class SchemeMode { Strict, Lenient };

// Inverse of words_to_labels. Strict mode rejects scheme-illegal input;
// lenient mode starts a new word at any illegal junction.
inline std::vector<std::string> labels_to_words(std::span<const std::string> chars,
                                                std::span<const Label> labels,
                                                SchemeMode mode = SchemeMode::Strict) {
  if (chars.size() != labels.size()) {
    throw DataError("labels_to_words: " + std::to_string(chars.size()) + " chars vs " +
                    std::to_string(labels.size()) + " labels");
  }
  if (mode == SchemeMode::Strict) {
    if (const auto pos = scheme_violation(labels)) {
      throw DataError("labels_to_words: scheme-illegal label sequence at position " +
                      std::to_string(*pos));
    }
  }
  std::vector<std::string> words;
  std::string current;
  for (std::size_t i = 0; i < chars.size(); ++i) {
    const Label y = labels[i];
    if ((y == Label::B || y == Label::S) && !current.empty()) {
      words.push_back(std::move(current));
      current.clear();
    }
    current += chars[i];
    if (y == Label::E || y == Label::S) {
      words.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

struct LabeledSentence {
  std::string id;
  std::vector<std::string> chars;
  std::vector<Label> labels;
  friend bool operator==(const LabeledSentence&, const LabeledSentence&) = default;
};

inline LabeledSentence labeled_from_segmented(const SegmentedSentence& s) {
  return {s.id, chars_of(s), words_to_labels(s.words)};
}

inline SegmentedSentence segmented_from_labeled(const LabeledSentence& s) {
  return {s.id, labels_to_words(s.chars, s.labels)};
}

// ---------------------------------------------------------------------------
// Model
// ---------------------------------------------------------------------------

inline constexpr std::array<std::pair<int, int>, 8> kLegalTransitionPairs = {{
    {0, 1}, {0, 2},  // B -> M, E
    {1, 1}, {1, 2},  // M -> M, E
    {2, 0}, {2, 3},  // E -> B, S
    {3, 0}, {3, 3},  // S -> B, S
}};

// Linear-chain CRF with a feature-template emission scorer. The decoder
// and both losses consume only (emission matrix, transition matrix), so an
// alternative emission scorer plugs in by producing those rows and
// absorbing d(loss)/d(emission); this linear model is the default. Weights
// for scheme-illegal transitions stay pinned at kLogZero and are never
// treated as parameters.
class CrfModel {
 public:
  CrfModel() {
    for (int p = 0; p < kNumLabels; ++p) {
      for (int y = 0; y < kNumLabels; ++y) {
        transitions[p][y] = kLegalTransition[p][y] ? 0.0 : kLogZero;
      }
    }
  }

  FeatureVocab vocab;
  std::vector<ScoreRow> emission_weights;  // [feature id][label]
  TransitionMatrix transitions{};
  double l2 = 1e-4;

  EmissionMatrix emissions(const ActiveFeatures& active) const {
    EmissionMatrix em(active.size(), ScoreRow{0, 0, 0, 0});
    for (std::size_t i = 0; i < active.size(); ++i) {
      for (const std::int32_t f : active[i]) {
        for (int y = 0; y < kNumLabels; ++y) em[i][y] += emission_weights[f][y];
      }
    }
    return em;
  }

  EmissionMatrix emissions(const std::vector<std::string>& chars) const {
    return emissions(index_features(vocab, chars));
  }
};

// ---------------------------------------------------------------------------
// Losses
// ---------------------------------------------------------------------------

struct CrfGradient {
  std::vector<ScoreRow> emission;
  TransitionMatrix transition{};

  void reset(std::size_t features) {
    emission.assign(features, ScoreRow{0, 0, 0, 0});
    for (auto& row : transition) row.fill(0.0);
  }
};

namespace detail {

inline double path_score(const EmissionMatrix& em, const TransitionMatrix& trans,
                         std::span<const Label> labels) {
  double score = em[0][code(labels[0])];
  for (std::size_t i = 1; i < labels.size(); ++i) {
    score += trans[code(labels[i - 1])][code(labels[i])] + em[i][code(labels[i])];
  }
  return score;
}

inline void ensure_gradient(const CrfModel& model, CrfGradient* grad) {
  if (grad && grad->emission.size() < model.vocab.size()) {
    grad->emission.resize(model.vocab.size(), ScoreRow{0, 0, 0, 0});
  }
}

// 0.5 * l2 * ||w||^2 over emission weights and legal transition weights;
// adds l2 * w to the gradient when requested.
inline double l2_penalty(const CrfModel& model, CrfGradient* grad) {
  double sq = 0.0;
  for (std::size_t f = 0; f < model.emission_weights.size(); ++f) {
    for (int y = 0; y < kNumLabels; ++y) {
      const double w = model.emission_weights[f][y];
      sq += w * w;
      if (grad) grad->emission[f][y] += model.l2 * w;
    }
  }
  for (const auto& [p, y] : kLegalTransitionPairs) {
    const double t = model.transitions[p][y];
    sq += t * t;
    if (grad) grad->transition[p][y] += model.l2 * t;
  }
  return 0.5 * model.l2 * sq;
}

}  // namespace detail

// Negative log-likelihood of a single gold path against all scheme-legal
// paths, plus the model's L2 penalty (unless with_l2 is false). Gradient:
// model expectation minus empirical counts (+ l2 * w).
inline double nll_full(const CrfModel& model, const ActiveFeatures& active,
                       const EmissionMatrix& em, std::span<const Label> gold,
                       CrfGradient* grad = nullptr, bool with_l2 = true) {
  if (em.size() != gold.size() || em.empty()) throw DataError("nll_full: size mismatch");
  if (const auto pos = scheme_violation(gold)) {
    throw DataError("nll_full: scheme-illegal gold sequence at position " + std::to_string(*pos));
  }
  detail::ensure_gradient(model, grad);
  const LabelLattice full = LabelLattice::unconstrained(em.size());
  const LatticeMarginals marg = constrained_marginals(em, model.transitions, full);
  double loss = marg.log_partition - detail::path_score(em, model.transitions, gold);
  if (grad) {
    for (std::size_t i = 0; i < em.size(); ++i) {
      for (int y = 0; y < kNumLabels; ++y) {
        const double coef = marg.unigram[i][y] - (code(gold[i]) == y ? 1.0 : 0.0);
        if (coef == 0.0) continue;
        for (const std::int32_t f : active[i]) grad->emission[f][y] += coef;
      }
    }
    for (std::size_t i = 0; i + 1 < em.size(); ++i) {
      for (const auto& [p, y] : kLegalTransitionPairs) {
        grad->transition[p][y] += marg.pairwise[i][p][y];
      }
      grad->transition[code(gold[i])][code(gold[i + 1])] -= 1.0;
    }
  }
  if (with_l2) loss += detail::l2_penalty(model, grad);
  return loss;
}

inline double nll_full(const CrfModel& model, const std::vector<std::string>& chars,
                       std::span<const Label> gold, CrfGradient* grad = nullptr,
                       bool with_l2 = true) {
  if (chars.size() != gold.size()) throw DataError("nll_full: chars/labels length mismatch");
  const ActiveFeatures active = index_features(model.vocab, chars);
  return nll_full(model, active, model.emissions(active), gold, grad, with_l2);
}

// Marginal-likelihood loss over a constrained lattice: -log of the mass of
// lattice paths relative to all scheme-legal paths, plus L2. Gradient:
// full-space expectation minus lattice-restricted expectation (+ l2 * w).
inline double nll_partial(const CrfModel& model, const ActiveFeatures& active,
                          const EmissionMatrix& em, const LabelLattice& lat,
                          CrfGradient* grad = nullptr, bool with_l2 = true) {
  if (em.size() != lat.size() || em.empty()) throw DataError("nll_partial: size mismatch");
  detail::ensure_gradient(model, grad);
  const LabelLattice full = LabelLattice::unconstrained(em.size());
  const LatticeMarginals marg_full = constrained_marginals(em, model.transitions, full);
  const LatticeMarginals marg_lat = constrained_marginals(em, model.transitions, lat);
  double loss = marg_full.log_partition - marg_lat.log_partition;
  if (grad) {
    for (std::size_t i = 0; i < em.size(); ++i) {
      for (int y = 0; y < kNumLabels; ++y) {
        const double coef = marg_full.unigram[i][y] - marg_lat.unigram[i][y];
        if (coef == 0.0) continue;
        for (const std::int32_t f : active[i]) grad->emission[f][y] += coef;
      }
    }
    for (std::size_t i = 0; i + 1 < em.size(); ++i) {
      for (const auto& [p, y] : kLegalTransitionPairs) {
        grad->transition[p][y] += marg_full.pairwise[i][p][y] - marg_lat.pairwise[i][p][y];
      }
    }
  }
  if (with_l2) loss += detail::l2_penalty(model, grad);
  return loss;
}

inline double nll_partial(const CrfModel& model, const std::vector<std::string>& chars,
                          const LabelLattice& lat, CrfGradient* grad = nullptr,
                          bool with_l2 = true) {
  if (chars.size() != lat.size()) throw DataError("nll_partial: chars/lattice length mismatch");
  const ActiveFeatures active = index_features(model.vocab, chars);
  return nll_partial(model, active, model.emissions(active), lat, grad, with_l2);
}

// ---------------------------------------------------------------------------
// Decoding
// ---------------------------------------------------------------------------

inline std::vector<Label> decode(const CrfModel& model, const std::vector<std::string>& chars) {
  return constrained_viterbi(model.emissions(chars), model.transitions,
                             LabelLattice::unconstrained(chars.size()));
}

inline std::vector<std::string> tag(const CrfModel& model, const std::vector<std::string>& chars) {
  if (chars.empty()) return {};
  return labels_to_words(chars, decode(model, chars));
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

struct TrainConfig {
  double learning_rate = 0.002;
  std::size_t batch_size = 256;
  std::size_t patience = 10;
  std::size_t max_epochs = 100;
  double l2 = 1e-4;
  std::uint64_t seed = 1;
};

struct TrainStats {
  std::size_t epochs_run = 0;
  std::size_t best_epoch = 0;
  double best_dev_f1 = 0.0;
};

namespace detail {

// Adam with bias correction, applied once per mini-batch to every
// parameter (legal transitions included, pinned ones excluded).
struct AdamState {
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;

  std::vector<ScoreRow> m_em, v_em;
  TransitionMatrix m_tr{}, v_tr{};
  std::uint64_t t = 0;

  void reset(std::size_t features) {
    m_em.assign(features, ScoreRow{0, 0, 0, 0});
    v_em.assign(features, ScoreRow{0, 0, 0, 0});
    for (auto& row : m_tr) row.fill(0.0);
    for (auto& row : v_tr) row.fill(0.0);
    t = 0;
  }

  void update(double& w, double& m, double& v, double g, double lr) {
    m = kBeta1 * m + (1.0 - kBeta1) * g;
    v = kBeta2 * v + (1.0 - kBeta2) * g * g;
    const double mhat = m / (1.0 - std::pow(kBeta1, static_cast<double>(t)));
    const double vhat = v / (1.0 - std::pow(kBeta2, static_cast<double>(t)));
    w -= lr * mhat / (std::sqrt(vhat) + kEps);
  }

  void step(CrfModel& model, const CrfGradient& grad, double inv_batch, double lr) {
    ++t;
    for (std::size_t f = 0; f < model.emission_weights.size(); ++f) {
      for (int y = 0; y < kNumLabels; ++y) {
        const double g = grad.emission[f][y] * inv_batch + model.l2 * model.emission_weights[f][y];
        update(model.emission_weights[f][y], m_em[f][y], v_em[f][y], g, lr);
      }
    }
    for (const auto& [p, y] : kLegalTransitionPairs) {
      const double g = grad.transition[p][y] * inv_batch + model.l2 * model.transitions[p][y];
      update(model.transitions[p][y], m_tr[p][y], v_tr[p][y], g, lr);
    }
  }
};

}  // namespace detail

// Mini-batch training over fully labeled sentences plus, optionally,
// partially annotated ones trained with the marginal-likelihood objective.
// Keeps the snapshot with peak dev F1 and stops once the peak has not
// improved for `patience` epochs. Deterministic for a fixed seed.
inline CrfModel train(std::span<const LabeledSentence> labeled,
                      std::span<const PartialAnnotation> partial,
                      std::span<const SegmentedSentence> dev, const TrainConfig& cfg,
                      TrainStats* stats = nullptr) {
  if (labeled.empty() && partial.empty()) throw DataError("train: empty training corpus");
  if (dev.empty()) throw DataError("train: a dev corpus is required for early stopping");
  if (cfg.batch_size < 1 || cfg.patience < 1 || cfg.max_epochs < 1 || !(cfg.learning_rate > 0)) {
    throw DataError("train: invalid training configuration");
  }

  CrfModel model;
  model.l2 = cfg.l2;

  struct Item {
    const std::vector<std::string>* chars;
    const std::vector<Label>* gold = nullptr;  // null => marginal objective
    const LabelLattice* lattice = nullptr;
    ActiveFeatures active;
  };
  std::vector<LabelLattice> lattices;
  lattices.reserve(partial.size());
  std::vector<Item> items;
  items.reserve(labeled.size() + partial.size());
  for (const LabeledSentence& s : labeled) {
    if (s.chars.empty()) throw DataError("train: empty sentence \"" + s.id + "\"");
    if (const auto pos = scheme_violation(s.labels)) {
      throw DataError("train: sentence \"" + s.id + "\" has a scheme-illegal label at position " +
                      std::to_string(*pos));
    }
    items.push_back({&s.chars, &s.labels, nullptr, intern_features(model.vocab, s.chars)});
  }
  for (const PartialAnnotation& pa : partial) {
    lattices.push_back(build_lattice(pa));
    items.push_back({&pa.chars, nullptr, &lattices.back(), intern_features(model.vocab, pa.chars)});
  }
  model.emission_weights.assign(model.vocab.size(), ScoreRow{0, 0, 0, 0});

  std::vector<std::vector<std::string>> dev_chars;
  dev_chars.reserve(dev.size());
  for (const SegmentedSentence& s : dev) dev_chars.push_back(chars_of(s));

  detail::AdamState adam;
  adam.reset(model.vocab.size());
  CrfGradient grad;
  Rng rng(cfg.seed);
  std::vector<std::size_t> order(items.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::vector<ScoreRow> best_emission = model.emission_weights;
  TransitionMatrix best_transitions = model.transitions;
  double best_f1 = -1.0;
  std::size_t best_epoch = 0;
  std::size_t since_best = 0;
  std::size_t epoch = 0;

  for (epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      grad.reset(model.vocab.size());
      for (std::size_t k = start; k < stop; ++k) {
        const Item& it = items[order[k]];
        const EmissionMatrix em = model.emissions(it.active);
        if (it.gold) {
          nll_full(model, it.active, em, *it.gold, &grad, /*with_l2=*/false);
        } else {
          nll_partial(model, it.active, em, *it.lattice, &grad, /*with_l2=*/false);
        }
      }
      adam.step(model, grad, 1.0 / static_cast<double>(stop - start), cfg.learning_rate);
    }

    std::vector<SegmentedSentence> pred;
    pred.reserve(dev.size());
    for (std::size_t i = 0; i < dev.size(); ++i) {
      pred.push_back({dev[i].id, tag(model, dev_chars[i])});
    }
    const double f1 = evaluate(dev, pred).f1;
    if (f1 > best_f1) {
      best_f1 = f1;
      best_epoch = epoch;
      best_emission = model.emission_weights;
      best_transitions = model.transitions;
      since_best = 0;
    } else {
      ++since_best;
    }
    if (since_best >= cfg.patience) break;
  }

  model.emission_weights = std::move(best_emission);
  model.transitions = best_transitions;
  if (stats) {
    stats->epochs_run = std::min(epoch, cfg.max_epochs);
    stats->best_epoch = best_epoch;
    stats->best_dev_f1 = best_f1;
  }
  return model;
}

inline CrfModel train(std::span<const LabeledSentence> labeled,
                      std::span<const SegmentedSentence> dev, const TrainConfig& cfg,
                      TrainStats* stats = nullptr) {
  return train(labeled, std::span<const PartialAnnotation>{}, dev, cfg, stats);
}

// ---------------------------------------------------------------------------
// Completion and the complete-then-train strategy
// ---------------------------------------------------------------------------

// Turns partial annotations into full label sequences with the model's
// constrained Viterbi path. With constrained=false ("no label constraint"
// ablation) the mined boundaries are ignored and plain Viterbi pseudo-labels
// come back instead.
inline std::vector<LabeledSentence> complete(const CrfModel& model,
                                             std::span<const PartialAnnotation> partial,
                                             bool constrained = true) {
  std::vector<LabeledSentence> out;
  out.reserve(partial.size());
  for (const PartialAnnotation& pa : partial) {
    const LabelLattice lat =
        constrained ? build_lattice(pa) : LabelLattice::unconstrained(pa.chars.size());
    out.push_back(
        {pa.id, pa.chars, constrained_viterbi(model.emissions(pa.chars), model.transitions, lat)});
  }
  return out;
}

struct CompleteThenTrainResult {
  CrfModel base_model;
  CrfModel final_model;
  std::vector<LabeledSentence> completed;
  TrainStats base_stats;
  TrainStats final_stats;
};

// 1. train a basic model on the base corpus alone; 2. complete the partial
// annotations with it; 3. train the final model on base + completed.
inline CompleteThenTrainResult complete_then_train(std::span<const LabeledSentence> base_corpus,
                                                   std::span<const PartialAnnotation> partial_corpus,
                                                   std::span<const SegmentedSentence> dev,
                                                   const TrainConfig& cfg,
                                                   bool constrained_completion = true) {
  if (base_corpus.empty()) throw DataError("complete_then_train: empty base corpus");
  CompleteThenTrainResult r;
  r.base_model = train(base_corpus, dev, cfg, &r.base_stats);
  r.completed = complete(r.base_model, partial_corpus, constrained_completion);
  std::vector<LabeledSentence> merged(base_corpus.begin(), base_corpus.end());
  merged.insert(merged.end(), r.completed.begin(), r.completed.end());
  r.final_model = train(merged, dev, cfg, &r.final_stats);
  return r;
}

// ---------------------------------------------------------------------------
// Model persistence
// ---------------------------------------------------------------------------

inline constexpr const char* kModelFormat = "pauseseg-crf";
inline constexpr int kModelVersion = 1;

inline void save_model(const CrfModel& model, const std::string& path) {
  nlohmann::json j;
  j["format"] = kModelFormat;
  j["version"] = kModelVersion;
  j["l2"] = model.l2;
  j["features"] = model.vocab.names();
  nlohmann::json em = nlohmann::json::array();
  for (const ScoreRow& row : model.emission_weights) em.push_back(row);
  j["emission_weights"] = std::move(em);
  nlohmann::json tr = nlohmann::json::array();
  for (const ScoreRow& row : model.transitions) tr.push_back(row);
  j["transitions"] = std::move(tr);
  std::ofstream out(path);
  if (!out) throw DataError("cannot write model file: " + path);
  out << j.dump() << '\n';
}

inline CrfModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("model file " + path + " is not valid JSON: " + e.what());
  }
  if (!j.is_object() || j.value("format", "") != kModelFormat) {
    throw DataError("model file " + path + " is not a " + std::string(kModelFormat) + " container");
  }
  if (j.value("version", -1) != kModelVersion) {
    const std::string got = j.contains("version") ? j["version"].dump() : "none";
    throw DataError("model file " + path + " has version " + got + ", expected " +
                    std::to_string(kModelVersion));
  }
  CrfModel model;
  model.l2 = j.value("l2", 1e-4);
  model.vocab = FeatureVocab::from_names(j.at("features").get<std::vector<std::string>>());
  const auto& em = j.at("emission_weights");
  if (!em.is_array() || em.size() != model.vocab.size()) {
    throw DataError("model file " + path + ": emission weights do not match the vocabulary");
  }
  model.emission_weights.reserve(em.size());
  for (const auto& row : em) model.emission_weights.push_back(row.get<ScoreRow>());
  const auto& tr = j.at("transitions");
  if (!tr.is_array() || tr.size() != kNumLabels) {
    throw DataError("model file " + path + ": bad transition matrix");
  }
  for (int p = 0; p < kNumLabels; ++p) {
    const ScoreRow row = tr[p].get<ScoreRow>();
    for (int y = 0; y < kNumLabels; ++y) {
      model.transitions[p][y] = kLegalTransition[p][y] ? row[y] : kLogZero;
    }
  }
  return model;
}

// ---------------------------------------------------------------------------
// Pipeline strategies
// ---------------------------------------------------------------------------

enum class Strategy { BaseOnly, DirectlyTrain, CompleteThenTrain, NoConstraintAblation };

inline Strategy parse_strategy(const std::string& name) {
  if (name == "base-only") return Strategy::BaseOnly;
  if (name == "directly-train") return Strategy::DirectlyTrain;
  if (name == "complete-then-train") return Strategy::CompleteThenTrain;
  if (name == "no-constraint-ablation") return Strategy::NoConstraintAblation;
  throw DataError("unknown strategy \"" + name + "\"");
}

inline const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::BaseOnly: return "base-only";
    case Strategy::DirectlyTrain: return "directly-train";
    case Strategy::CompleteThenTrain: return "complete-then-train";
    case Strategy::NoConstraintAblation: return "no-constraint-ablation";
  }
  return "?";
}

}  // namespace pauseseg

#endif  // PAUSESEG_TAGGER_HPP
