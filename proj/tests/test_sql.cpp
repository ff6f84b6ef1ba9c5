#include "doctest.h"
#include "sqlaug/sql.hpp"

using namespace sqlaug::sql;

TEST_CASE("tokenizer handles identifiers, literals and two-char operators") {
  const auto toks = tokenize("SELECT T1.name FROM a AS T1 WHERE x >= 3.5 AND y != \"abc\"");
  REQUIRE(toks.size() == 17);  // includes the end marker
  CHECK(toks[1].text == "T1");
  CHECK(toks[2].text == ".");
  CHECK(toks[10].text == ">=");
  CHECK(toks[11].kind == TokenKind::kNumber);
  CHECK(toks[14].text == "!=");
  CHECK(toks[15].kind == TokenKind::kString);
  CHECK_THROWS_AS(tokenize("SELECT 'open"), sqlaug::SqlError);
  CHECK_THROWS_AS(tokenize("SELECT a # b"), sqlaug::SqlError);
}

TEST_CASE("printing a parsed query reproduces canonical text") {
  const std::vector<std::string> queries = {
      "SELECT captain.name, captain.age FROM captain",
      "SELECT DISTINCT perpetrator.location FROM perpetrator",
      "SELECT count(*) FROM singer WHERE age > 30 AND country = 'France'",
      "SELECT T1.name FROM singer AS T1 JOIN concert AS T2 ON T1.singer_id = T2.singer_id "
      "GROUP BY T1.name HAVING count(*) > 1 ORDER BY count(*) DESC LIMIT 1",
      "SELECT name FROM a WHERE id NOT IN (SELECT aid FROM b) UNION SELECT name FROM c",
      "SELECT avg(x) FROM t WHERE y BETWEEN 1 AND 5 OR z LIKE '%a%'",
      "SELECT count(DISTINCT name) FROM t",
  };
  for (const auto& q : queries) CHECK(to_string(parse(q)) == q);
}

TEST_CASE("parser rejects constructs outside the subset") {
  CHECK_THROWS_WITH_AS(parse("SELECT a - b FROM t"), doctest::Contains("arithmetic"),
                       sqlaug::SqlError);
  CHECK_THROWS_AS(parse("SELECT a FROM t WHERE x IN (1, 2)"), sqlaug::SqlError);
  CHECK_THROWS_AS(parse("SELECT a FROM"), sqlaug::SqlError);
  CHECK_THROWS_AS(parse("SELECT a FROM t LEFT JOIN u"), sqlaug::SqlError);
}

TEST_CASE("masking hides identifiers and values") {
  PrintOptions o;
  o.mask_tables = o.mask_columns = o.mask_values = true;
  CHECK(to_string(parse("SELECT perpetrator.location FROM perpetrator ORDER BY perpetrator.location"), o) ==
        "SELECT _COL_ FROM _TAB_ ORDER BY _COL_");
  CHECK(to_string(parse("SELECT count(*) FROM t"), o) == "SELECT count(*) FROM _TAB_");
  CHECK(to_string(parse("SELECT T1.a FROM x AS T1 JOIN y AS T2 ON T1.k = T2.k WHERE T2.b = 'q'"), o) ==
        "SELECT _COL_ FROM _TAB_ JOIN _TAB_ ON _COL_ = _COL_ WHERE _COL_ = _VAL_");
}

TEST_CASE("resolve_aliases rewrites qualifiers to table names per scope") {
  Query q = parse(
      "SELECT T1.name FROM singer AS T1 WHERE T1.id IN (SELECT T1.sid FROM concert AS T1)");
  resolve_aliases(q);
  CHECK(to_string(q) == "SELECT singer.name FROM singer WHERE singer.id IN (SELECT concert.sid FROM concert)");
  Query bare = parse("SELECT name FROM singer ORDER BY age");
  resolve_aliases(bare);
  CHECK(to_string(bare) == "SELECT singer.name FROM singer ORDER BY singer.age");
}

TEST_CASE("split_parts separates set operations and subqueries") {
  PrintOptions o;
  o.mask_tables = o.mask_columns = o.mask_values = true;
  CHECK(split_parts(parse("SELECT a FROM t"), o).size() == 1);
  const auto two = split_parts(parse("SELECT a FROM t UNION SELECT b FROM u"), o);
  REQUIRE(two.size() == 2);
  CHECK(two[0] == "SELECT _COL_ FROM _TAB_");
  const auto nested = split_parts(parse("SELECT a FROM t WHERE b > (SELECT avg(b) FROM t)"), o);
  REQUIRE(nested.size() == 2);
  CHECK(nested[0] == "SELECT _COL_ FROM _TAB_ WHERE _COL_ > _SUB_");
  CHECK(nested[1] == "SELECT avg(_COL_) FROM _TAB_");
}

TEST_CASE("column visitor walks references in textual order") {
  std::vector<std::string> seen;
  for_each_column(parse("SELECT a, count(*) FROM t JOIN u ON t.k = u.k WHERE b = 1 ORDER BY c"),
                  [&](const ColumnRef& c, const std::vector<const SelectCore*>&) {
                    seen.push_back(c.qualifier.empty() ? c.column : c.qualifier + "." + c.column);
                  });
  const std::vector<std::string> expected = {"a", "*", "t.k", "u.k", "b", "c"};
  CHECK(seen == expected);
}
