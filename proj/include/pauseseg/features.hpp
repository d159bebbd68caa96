#ifndef PAUSESEG_FEATURES_HPP
#define PAUSESEG_FEATURES_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace pauseseg {

// Character-window templates for the linear emission scorer: unigrams in
// [-2, +2], the two adjacent bigrams and the skip bigram, with sentence
// boundary sentinels.
inline void position_features(const std::vector<std::string>& chars, std::size_t i,
                              std::vector<std::string>& out) {
  static const std::string kBos = "<s>";
  static const std::string kEos = "</s>";
  const auto at = [&](std::ptrdiff_t k) -> const std::string& {
    if (k < 0) return kBos;
    if (k >= static_cast<std::ptrdiff_t>(chars.size())) return kEos;
    return chars[static_cast<std::size_t>(k)];
  };
  const auto p = static_cast<std::ptrdiff_t>(i);
  out.clear();
  out.push_back("u-2=" + at(p - 2));
  out.push_back("u-1=" + at(p - 1));
  out.push_back("u0=" + at(p));
  out.push_back("u+1=" + at(p + 1));
  out.push_back("u+2=" + at(p + 2));
  out.push_back("b-10=" + at(p - 1) + at(p));
  out.push_back("b0+1=" + at(p) + at(p + 1));
  out.push_back("b-1+1=" + at(p - 1) + at(p + 1));
}

// Interned feature names. Ids are assigned in first-seen order, which
// makes vocabulary construction deterministic for a fixed corpus order.
class FeatureVocab {
 public:
  std::int32_t intern(const std::string& name) {
    auto [it, inserted] = index_.try_emplace(name, static_cast<std::int32_t>(names_.size()));
    if (inserted) names_.push_back(name);
    return it->second;
  }

  // -1 when unseen.
  std::int32_t find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
  }

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  static FeatureVocab from_names(std::vector<std::string> names) {
    FeatureVocab v;
    v.names_ = std::move(names);
    for (std::size_t i = 0; i < v.names_.size(); ++i) {
      v.index_.emplace(v.names_[i], static_cast<std::int32_t>(i));
    }
    return v;
  }

 private:
  std::unordered_map<std::string, std::int32_t> index_;
  std::vector<std::string> names_;
};

// Feature ids active at each position.
using ActiveFeatures = std::vector<std::vector<std::int32_t>>;

// Vocabulary-building pass: unseen features are interned.
inline ActiveFeatures intern_features(FeatureVocab& vocab, const std::vector<std::string>& chars) {
  ActiveFeatures active(chars.size());
  std::vector<std::string> names;
  for (std::size_t i = 0; i < chars.size(); ++i) {
    position_features(chars, i, names);
    active[i].reserve(names.size());
    for (const std::string& f : names) active[i].push_back(vocab.intern(f));
  }
  return active;
}

// Lookup-only pass: features outside the vocabulary are skipped, so unseen
// text simply scores zero.
inline ActiveFeatures index_features(const FeatureVocab& vocab, const std::vector<std::string>& chars) {
  ActiveFeatures active(chars.size());
  std::vector<std::string> names;
  for (std::size_t i = 0; i < chars.size(); ++i) {
    position_features(chars, i, names);
    active[i].reserve(names.size());
    for (const std::string& f : names) {
      const std::int32_t id = vocab.find(f);
      if (id >= 0) active[i].push_back(id);
    }
  }
  return active;
}

}  // namespace pauseseg

#endif  // PAUSESEG_FEATURES_HPP
