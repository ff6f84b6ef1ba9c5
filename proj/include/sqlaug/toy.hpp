#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sqlaug/schema.hpp"

namespace sqlaug {

struct ToyConfig {
  int pairs_per_domain = 100;
  int rows_per_table = 24;
  std::uint64_t seed = 0;
};

/// Synthetic multi-domain corpus: template questions paired with SQL over
/// seven small two-table schemas. The last domain is held out: its pairs are
/// only for evaluation and its schema is the zero-shot target.
struct ToyCorpus {
  std::vector<SchemaGraph> schemas;  // train domains first, held-out domain last
  std::vector<AnnotatedPair> train;
  std::vector<AnnotatedPair> held_out;
  std::vector<std::string> train_domains;
  std::string zero_shot_domain;

  std::vector<SchemaGraph> train_schemas() const;
  std::vector<SchemaGraph> zero_shot_schemas() const;
};

ToyCorpus make_toy_corpus(const ToyConfig& config);

/// Writes <dir>/<db_id>/<db_id>.sqlite for every schema, filled with
/// deterministic rows. Existing files are replaced.
void write_toy_databases(const ToyCorpus& corpus, const std::string& dir, const ToyConfig& config);

/// tables.json, train.json, heldout.json and database/ under `dir`.
void save_toy_corpus(const ToyCorpus& corpus, const std::string& dir, const ToyConfig& config);

}  // namespace sqlaug
