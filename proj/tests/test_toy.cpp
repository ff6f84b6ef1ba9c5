#include <filesystem>
#include <map>
#include <set>

#include "doctest.h"
#include "sqlaug/analysis.hpp"
#include "sqlaug/parser.hpp"
#include "sqlaug/toy.hpp"

using namespace sqlaug;

TEST_CASE("toy corpus shape") {
  const ToyConfig cfg;
  const ToyCorpus c = make_toy_corpus(cfg);
  CHECK(c.schemas.size() >= 7);
  CHECK(c.train_domains.size() + 1 == c.schemas.size());
  CHECK(c.zero_shot_domain == c.schemas.back().db_id());
  std::map<std::string, int> per_db;
  for (const auto& p : c.train) ++per_db[p.db_id];
  for (const auto& p : c.held_out) {
    CHECK(p.db_id == c.zero_shot_domain);
    ++per_db[p.db_id];
  }
  REQUIRE(per_db.size() == c.schemas.size());
  for (const auto& [db, n] : per_db) CHECK(n == cfg.pairs_per_domain);
  CHECK(c.train_schemas().size() == c.train_domains.size());
  REQUIRE(c.zero_shot_schemas().size() == 1);

  // paraphrases: fewer distinct queries than questions
  std::set<std::string> sqls, questions;
  for (const auto& p : c.train) {
    sqls.insert(p.db_id + p.sql);
    questions.insert(p.question);
  }
  CHECK(questions.size() == c.train.size());
  CHECK(sqls.size() < c.train.size());
}

TEST_CASE("toy corpus is deterministic and seed dependent") {
  ToyConfig a;
  const ToyCorpus x = make_toy_corpus(a);
  const ToyCorpus y = make_toy_corpus(a);
  CHECK(x.train == y.train);
  CHECK(x.held_out == y.held_out);
  a.seed = 99;
  CHECK_FALSE(make_toy_corpus(a).train == x.train);
}

TEST_CASE("every toy query is decodable and executes") {
  const ToyConfig cfg;
  const ToyCorpus c = make_toy_corpus(cfg);
  const std::string dir = (std::filesystem::temp_directory_path() / "sqlaug_toy_test").string();
  save_toy_corpus(c, dir, cfg);
  const auto schemas = load_schemas(dir + "/tables.json");
  REQUIRE(schemas.size() == c.schemas.size());
  CHECK(load_examples(dir + "/train.json", schemas) == c.train);

  ExecEnvironment env(schemas);
  env.add_directory(dir + "/database");
  std::vector<AnnotatedPair> all = c.train;
  all.insert(all.end(), c.held_out.begin(), c.held_out.end());
  for (const auto& p : all) {
    CAPTURE(p.sql);
    const SchemaGraph& s = require_schema(schemas, p.db_id);
    REQUIRE(env.has_database(p.db_id));
    CHECK(env.execute(p.db_id, p.sql).empty());
    CHECK(grammar::linearize(p.sql, s).has_value());
  }
  const analysis::DatasetStats st = analysis::dataset_stats(c.train, schemas);
  CHECK(st.n_skipped == 0);
  CHECK(st.h_col > 0.0);
  CHECK(st.h_col < 1.0);
  // concentrated usage: popular queries are asked several times
  CHECK(st.h_col < 0.9);
  std::map<std::string, int> asked;
  int max_asked = 0;
  for (const auto& p : c.train) max_asked = std::max(max_asked, ++asked[p.db_id + "|" + p.sql]);
  CHECK(max_asked >= 4);
  CHECK(asked.size() < c.train.size());
}
