#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "sqlaug/analysis.hpp"

using namespace sqlaug;
using namespace sqlaug::analysis;

TEST_CASE("sketch masks identifiers and keeps structure") {
  CHECK(sketch("SELECT perpetrator.location FROM perpetrator ORDER BY perpetrator.location").masked_sql ==
        "SELECT _COL_ FROM _TAB_ ORDER BY _COL_");
  CHECK(sketch("SELECT count(*) FROM t").masked_sql == "SELECT count(*) FROM _TAB_");
  CHECK(sketch("SELECT a.x FROM a WHERE a.y = 'v'").masked_sql ==
        sketch("SELECT b.z FROM b WHERE b.w = 'other'").masked_sql);
  CHECK_THROWS_AS(sketch("SELECT 'x FROM t"), SqlError);
}

TEST_CASE("sketch is invariant to consistent renaming of schema identifiers") {
  const std::vector<std::pair<std::string, std::string>> renamed = {
      {"SELECT T1.name FROM singer AS T1 JOIN concert AS T2 ON T1.id = T2.sid WHERE T2.year > 2000",
       "SELECT T1.label FROM artist AS T1 JOIN show AS T2 ON T1.key = T2.akey WHERE T2.yr > 2000"},
      {"SELECT name FROM a WHERE id IN (SELECT aid FROM b) INTERSECT SELECT name FROM a",
       "SELECT title FROM p WHERE pk IN (SELECT pid FROM q) INTERSECT SELECT title FROM p"},
  };
  for (const auto& [a, b] : renamed) {
    CHECK(sketch(a).masked_sql == sketch(b).masked_sql);
    CHECK(sketch(a).parts == sketch(b).parts);
  }
}

TEST_CASE("sketch with a schema rejects unresolvable identifiers") {
  const auto s = fixtures::concert_singer();
  CHECK_NOTHROW(sketch("SELECT name FROM singer", s));
  CHECK_THROWS_AS(sketch("SELECT height FROM singer", s), ResolutionError);
}

TEST_CASE("deconstruct splits set operations and nested subqueries") {
  CHECK(deconstruct("SELECT a FROM t").size() == 1);
  CHECK(deconstruct("SELECT a FROM t UNION SELECT b FROM u").size() == 2);
  const auto parts = deconstruct("SELECT a FROM t WHERE b NOT IN (SELECT c FROM u)");
  REQUIRE(parts.size() == 2);
  CHECK(parts[0] == "SELECT _COL_ FROM _TAB_ WHERE _COL_ NOT IN _SUB_");
  CHECK(parts[1] == "SELECT _COL_ FROM _TAB_");
  CHECK_THROWS_WITH_AS(deconstruct("SELECT a FROM t WHERE EXISTS (SELECT 1 FROM u)"),
                       doctest::Contains("EXISTS"), SqlError);
}

TEST_CASE("normalized entropy closed forms") {
  CHECK(normalized_entropy(std::map<std::string, int>{{"a", 2}, {"b", 2}, {"c", 2}, {"d", 2}}) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(normalized_entropy(std::map<std::string, int>{{"a", 7}}) == 0.0);
  // -(0.75 log2 0.75 + 0.25 log2 0.25) / log2 2
  const double expected = -(0.75 * std::log2(0.75) + 0.25 * std::log2(0.25));
  CHECK(normalized_entropy(std::map<std::string, int>{{"a", 3}, {"b", 1}}) ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(0.8113).epsilon(1e-4));
  CHECK_THROWS_AS(normalized_entropy(std::map<std::string, int>{}), Error);
  CHECK_THROWS_AS(normalized_entropy(std::map<std::string, int>{{"a", 0}}), Error);
}

TEST_CASE("normalized mutual information closed forms") {
  using Joint = std::map<std::pair<int, int>, int>;
  CHECK(normalized_mutual_information(Joint{{{0, 0}, 3}, {{1, 1}, 2}, {{2, 2}, 5}}) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(normalized_mutual_information(Joint{{{0, 0}, 1}, {{0, 1}, 1}, {{1, 0}, 1}, {{1, 1}, 1}}) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(normalized_mutual_information(Joint{{{0, 0}, 4}}) == 0.0);
  const double oracle = oracles::normalized_mutual_information({{2, 1}, {0, 1}});
  using SJoint = std::map<std::pair<std::string, int>, int>;
  CHECK(normalized_mutual_information(SJoint{{{"a", 1}, 2}, {{"a", 2}, 1}, {{"b", 2}, 1}}) ==
        doctest::Approx(oracle).epsilon(1e-12));
  CHECK_THROWS_AS(normalized_mutual_information(Joint{}), Error);
}

TEST_CASE("statistics stay in [0,1] on random tables") {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 2000; ++trial) {
    const int rows = 1 + static_cast<int>(rng() % 8);
    const int cols = 1 + static_cast<int>(rng() % 8);
    std::map<std::pair<int, int>, int> joint;
    std::map<int, int> marginal;
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const int n = static_cast<int>(rng() % 20);
        if (n) joint[{r, c}] = n;
        marginal[r] += n;
      }
    }
    if (joint.empty()) continue;
    const double nmi = normalized_mutual_information(joint);
    const double h = normalized_entropy(marginal);
    CHECK(nmi >= 0.0);
    CHECK(nmi <= 1.0);
    CHECK(h >= 0.0);
    CHECK(h <= 1.0);
  }
}

TEST_CASE("dataset_stats on a single example gives zeros") {
  const std::vector<SchemaGraph> schemas = {fixtures::concert_singer()};
  const auto stats = dataset_stats({{"q", "SELECT name FROM singer", "concert_singer"}}, schemas);
  CHECK(stats.n_instances == 1);
  CHECK(stats.h_db == 0.0);
  CHECK(stats.h_col == 0.0);
  CHECK(stats.h_sketch == 0.0);
  CHECK(stats.i_db_sketch == 0.0);
  CHECK(stats.i_col_sketch == 0.0);
}

TEST_CASE("dataset_stats counts, skips and averages per database") {
  const std::vector<SchemaGraph> schemas = {fixtures::concert_singer(),
                                            fixtures::department_management()};
  const std::vector<AnnotatedPair> data = {
      {"q1", "SELECT name FROM singer", "concert_singer"},
      {"q2", "SELECT name FROM singer ORDER BY age", "concert_singer"},
      {"q3", "SELECT country FROM singer", "concert_singer"},
      {"q4", "SELECT name FROM head", "department_management"},
      {"q5", "SELECT name FROM head", "department_management"},
      {"bad", "SELECT height FROM singer", "concert_singer"},
  };
  const auto stats = dataset_stats(data, schemas);
  CHECK(stats.n_instances == 5);
  CHECK(stats.n_skipped == 1);
  CHECK(stats.n_unique_sketches == 2);
  CHECK(stats.n_unique_column_sets == 4);
  REQUIRE(stats.per_db.size() == 2);
  // concert_singer column sets {name}, {age,name}, {country}: uniform over 3.
  CHECK(stats.per_db[0].h_col == doctest::Approx(1.0));
  CHECK(stats.per_db[1].h_col == 0.0);
  CHECK(stats.h_col == doctest::Approx(0.5));
  const double sketch_h = oracles::normalized_entropy({2, 1});
  CHECK(stats.per_db[0].h_sketch == doctest::Approx(sketch_h));
  const double nmi = oracles::normalized_mutual_information({{1, 0}, {0, 1}, {1, 0}});
  CHECK(stats.per_db[0].i_col_sketch == doctest::Approx(nmi));
  CHECK(stats.i_col_sketch == doctest::Approx(nmi / 2));
  const auto report = format_report({{"train", stats}});
  CHECK(report.find("# instances") != std::string::npos);
  CHECK(per_db_csv({{"train", stats}}).find("concert_singer") != std::string::npos);
}
