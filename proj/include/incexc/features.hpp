#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "incexc/types.hpp"

namespace incexc::features {

// Sparse feature vector; indicator features carry value 1.0, embedding
// components their real value. Zero-valued entries are never stored.
using FeatureVector = std::map<std::string, double>;

struct EmbeddingTable {
  int dimension = 0;
  std::unordered_map<std::string, std::vector<double>> vectors;

  const std::vector<double>* find(const std::string& lowercase_word) const {
    auto it = vectors.find(lowercase_word);
    return it == vectors.end() ? nullptr : &it->second;
  }
};

// Text format: one "word v1 v2 ... vD" per line, space separated. The first
// line fixes D unless expected_dim is given.
EmbeddingTable load_embeddings(std::string_view text,
                               std::optional<int> expected_dim = std::nullopt);

struct FeatureConfig {
  int window = 1;           // word-identity context radius, at most 3
  bool use_affixes = true;  // prefixes/suffixes of lengths 2 and 3
  bool use_shape = true;
  std::shared_ptr<const EmbeddingTable> embeddings;
};

// Emission features for token i of the sentence.
FeatureVector token_features(const Sentence& sentence, int i,
                             const FeatureConfig& cfg);

// Features for a phrase span: span unigrams/bigrams, character 3-5-grams of
// the space-padded lowercased text, and up to two context tokens per side.
FeatureVector phrase_features(const Phrase& phrase, const Sentence& sentence);
FeatureVector phrase_features(std::span<const std::string> tokens, int start,
                              int end);

// Word shape: uppercase -> X, lowercase -> x, digit -> d, other -> '.',
// consecutive runs collapsed.
std::string word_shape(std::string_view token);

// Feature-name interning. Grows during training, read-only afterwards.
class SymbolTable {
 public:
  int intern(const std::string& name) {
    auto [it, inserted] = ids_.emplace(name, static_cast<int>(names_.size()));
    if (inserted) names_.push_back(name);
    return it->second;
  }

  std::optional<int> find(const std::string& name) const {
    auto it = ids_.find(name);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  int size() const { return static_cast<int>(names_.size()); }
  const std::string& name(int id) const { return names_[id]; }

 private:
  std::unordered_map<std::string, int> ids_;
  std::vector<std::string> names_;
};

}  // namespace incexc::features
