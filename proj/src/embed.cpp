#include "sqlaug/embed.hpp"

#include <cstdint>

#include "sqlaug/common.hpp"

namespace sqlaug::nn {
namespace {

std::uint32_t fnv1a(std::string_view s) {
  std::uint32_t h = 2166136261u;
  for (unsigned char c : s) {
    h ^= c;
    h *= 16777619u;
  }
  return h;
}

}  // namespace

TokenEmbedder::TokenEmbedder(ParameterSet& ps, const std::string& name, text::Vocabulary vocab,
                             int dim, int buckets, Rng& rng)
    : vocab_(std::move(vocab)), dim_(dim), buckets_(buckets) {
  words_ = &ps.add(name + ".words", dim, vocab_.size(), 0.1, rng);
  trigrams_ = &ps.add(name + ".trigrams", dim, buckets, 0.1, rng);
}

Graph::Var TokenEmbedder::embed(Graph& g, const std::string& word) const {
  const std::string w = to_lower(word);
  const Graph::Var base = g.column(*words_, vocab_.id(w));
  const std::string padded = "#" + w + "#";
  std::vector<Graph::Var> grams;
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
    const auto bucket = static_cast<int>(fnv1a(std::string_view(padded).substr(i, 3)) %
                                         static_cast<std::uint32_t>(buckets_));
    grams.push_back(g.column(*trigrams_, bucket));
  }
  if (grams.empty()) return base;
  return g.add(base, g.mean(grams));
}

Graph::Var EmbedCache::word(const std::string& w) {
  auto it = words_.find(w);
  if (it != words_.end()) return it->second;
  const Graph::Var v = e_.embed(g_, w);
  words_.emplace(w, v);
  return v;
}

Graph::Var EmbedCache::phrase(const std::string& p) {
  auto it = phrases_.find(p);
  if (it != phrases_.end()) return it->second;
  std::vector<Graph::Var> parts;
  for (const auto& w : split_whitespace(p)) parts.push_back(word(w));
  if (parts.empty()) parts.push_back(word(""));
  const Graph::Var v = parts.size() == 1 ? parts[0] : g_.mean(parts);
  phrases_.emplace(p, v);
  return v;
}

text::Vocabulary build_word_vocab(const std::vector<std::string>& phrases) {
  text::Vocabulary v;
  for (const auto& p : phrases) {
    for (const auto& w : split_whitespace(p)) v.add(to_lower(w));
  }
  return v;
}

}  // namespace sqlaug::nn
