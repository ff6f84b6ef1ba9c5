#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "sqlaug/nn.hpp"
#include "sqlaug/text.hpp"

namespace sqlaug::nn {

/// Word embeddings backed by a closed vocabulary plus hashed character
/// trigrams, so identifiers never seen in training still get a vector.
/// Words are lowercased before lookup.
class TokenEmbedder {
 public:
  TokenEmbedder() = default;
  TokenEmbedder(ParameterSet& ps, const std::string& name, text::Vocabulary vocab, int dim,
                int buckets, Rng& rng);

  int dim() const { return dim_; }
  const text::Vocabulary& vocab() const { return vocab_; }

  Graph::Var embed(Graph& g, const std::string& word) const;

 private:
  text::Vocabulary vocab_;
  Parameter* words_ = nullptr;     // dim x |vocab|
  Parameter* trigrams_ = nullptr;  // dim x buckets
  int dim_ = 0;
  int buckets_ = 0;
};

/// Per-graph memo of word and phrase embeddings.
class EmbedCache {
 public:
  EmbedCache(Graph& g, const TokenEmbedder& e) : g_(g), e_(e) {}
  Graph::Var word(const std::string& w);
  /// Mean of the word embeddings of a whitespace-separated phrase.
  Graph::Var phrase(const std::string& p);

 private:
  Graph& g_;
  const TokenEmbedder& e_;
  std::unordered_map<std::string, Graph::Var> words_;
  std::unordered_map<std::string, Graph::Var> phrases_;
};

/// Vocabulary of lowercased words appearing in the given phrases.
text::Vocabulary build_word_vocab(const std::vector<std::string>& phrases);

}  // namespace sqlaug::nn
