#include <filesystem>

#include "doctest.h"
#include "fixtures.hpp"
#include "sqlaug/schema.hpp"

using namespace sqlaug;

namespace {

const char* kConcertJson = R"([
  {
    "column_names": [[-1, "*"], [0, "singer id"], [0, "name"], [0, "age"], [1, "concert id"], [1, "singer id"]],
    "column_names_original": [[-1, "*"], [0, "Singer_ID"], [0, "Name"], [0, "Age"], [1, "concert_ID"], [1, "Singer_ID"]],
    "column_types": ["text", "number", "text", "number", "number", "number"],
    "db_id": "concert_singer",
    "foreign_keys": [[5, 1]],
    "primary_keys": [1, 4],
    "table_names": ["singer", "concert"],
    "table_names_original": ["singer", "concert"]
  }
])";

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("sqlaug_test_" + name)).string();
}

}  // namespace

TEST_CASE("load_schemas maps a Spider record onto a SchemaGraph") {
  const auto schemas = parse_schemas(kConcertJson);
  REQUIRE(schemas.size() == 1);
  const auto& s = schemas[0];
  CHECK(s.db_id() == "concert_singer");
  CHECK(s.num_tables() == 2);
  CHECK(s.num_columns() == 5);
  CHECK(s.columns()[1].name == "Name");
  CHECK(s.columns()[2].type == ColumnType::kNumber);
  CHECK(s.primary_keys() == std::set<int>{0, 3});
  CHECK(s.foreign_keys() == std::set<std::pair<int, int>>{{4, 0}});
  CHECK(s.join_columns(0, 1) == std::make_pair(0, 4));
}

TEST_CASE("load_schemas reports out-of-range foreign keys with the db_id") {
  std::string bad = kConcertJson;
  bad.replace(bad.find("[[5, 1]]"), 8, "[[99, 1]]");
  CHECK_THROWS_WITH_AS(parse_schemas(bad), doctest::Contains("concert_singer"), InvariantError);
  CHECK_THROWS_AS(parse_schemas("[{\"db_id\": 3}]"), ParseError);
  CHECK_THROWS_AS(parse_schemas("not json"), ParseError);
}

TEST_CASE("schema invariants are enforced at construction") {
  CHECK_THROWS_AS(SchemaGraph("", {"t"}, {{0, "a", "", ColumnType::kText}}, {}, {}), InvariantError);
  CHECK_THROWS_AS(SchemaGraph("d", {"t"}, {{1, "a", "", ColumnType::kText}}, {}, {}), InvariantError);
  CHECK_THROWS_AS(SchemaGraph("d", {"t"}, {{0, "a", "", ColumnType::kText}, {0, "A", "", ColumnType::kText}}, {}, {}),
                  InvariantError);
  CHECK_THROWS_AS(SchemaGraph("d", {"t"}, {{0, "a", "", ColumnType::kText}, {0, "b", "", ColumnType::kText}}, {},
                              {{1, 1}}),
                  InvariantError);
}

TEST_CASE("unknown column types fall back to others") {
  CHECK(parse_column_type("number") == ColumnType::kNumber);
  CHECK(parse_column_type("blob") == ColumnType::kOthers);
}

TEST_CASE("schema and example files round-trip bit-exactly") {
  const auto schemas = parse_schemas(kConcertJson);
  const std::string once = dump_schemas(schemas);
  CHECK(dump_schemas(parse_schemas(once)) == once);

  std::vector<AnnotatedPair> pairs = {
      {"How many singers are there?", "SELECT count(*) FROM singer", "concert_singer"},
      {"Names of singers \"quoted\" é?", "SELECT Name FROM singer", "concert_singer"}};
  const std::string path = temp_path("examples.json");
  save_examples(path, pairs);
  const auto loaded = load_examples(path, schemas);
  CHECK(loaded == pairs);
  CHECK(dump_examples(loaded) == read_file(path));
}

TEST_CASE("load_examples edge cases") {
  const auto schemas = parse_schemas(kConcertJson);
  const std::string empty = temp_path("empty.json");
  write_file(empty, "");
  CHECK(load_examples(empty, schemas).empty());
  CHECK(parse_examples("[]", schemas).empty());
  CHECK_THROWS_AS(parse_examples(R"([{"question": "q", "query": "SELECT 1", "db_id": "nope"}])", schemas),
                  ResolutionError);
  CHECK_THROWS_AS(parse_examples(R"([{"question": "q"}])", schemas), ParseError);
}

TEST_CASE("extract_entity_sequence keeps first appearance order without duplicates") {
  const auto captain = fixtures::single_table(
      "ship_1", "captain", {{"name", ColumnType::kText}, {"age", ColumnType::kNumber}});
  auto seq = extract_entity_sequence("SELECT captain.name, captain.age FROM captain", captain);
  CHECK(seq.db_name == "ship_1");
  REQUIRE(seq.entities.size() == 2);
  CHECK(seq.entities[0] == Entity{"captain", "name"});
  CHECK(seq.entities[1] == Entity{"captain", "age"});

  const auto t = fixtures::single_table("d", "t", {{"x", ColumnType::kNumber}});
  CHECK(extract_entity_sequence("SELECT t.x FROM t", t).entities == std::vector<Entity>{{"t", "x"}});
  const auto a = fixtures::single_table("d", "a", {{"x", ColumnType::kNumber}});
  CHECK(extract_entity_sequence("SELECT a.x FROM a ORDER BY a.x", a).entities ==
        std::vector<Entity>{{"a", "x"}});
}

TEST_CASE("extract_entity_sequence resolves aliases, bare columns and ambiguity") {
  const auto s = fixtures::concert_singer();
  const auto seq = extract_entity_sequence(
      "SELECT T1.name, count(*) FROM singer AS T1 JOIN concert AS T2 ON T1.singer_id = "
      "T2.singer_id WHERE year = 2014 GROUP BY T1.name",
      s);
  const std::vector<Entity> expected = {{"singer", "Name"},
                                        {"singer", "Singer_ID"},
                                        {"concert", "Singer_ID"},
                                        {"concert", "Year"}};
  CHECK(seq.entities == expected);
  CHECK_THROWS_AS(extract_entity_sequence(
                      "SELECT singer_id FROM singer JOIN concert ON singer.singer_id = concert.singer_id", s),
                  ResolutionError);
  CHECK_THROWS_AS(extract_entity_sequence("SELECT nonexistent.col FROM singer", s), ResolutionError);
  CHECK_THROWS_AS(extract_entity_sequence("SELECT height FROM singer", s), ResolutionError);
  CHECK_THROWS_AS(extract_entity_sequence("SELECT 'oops FROM singer", s), SqlError);
  CHECK(extract_entity_sequence("SELECT count(*) FROM singer", s).entities.empty());
}

TEST_CASE("extraction is idempotent on queries built from an entity sequence") {
  const auto s = fixtures::department_management();
  const auto first = extract_entity_sequence(
      "SELECT head.name, head.born_state FROM head ORDER BY head.age", s);
  std::vector<std::string> cols;
  for (const auto& e : first.entities) cols.push_back(e.table + "." + e.column);
  const auto rebuilt = extract_entity_sequence("SELECT " + join(cols, ", ") + " FROM head", s);
  CHECK(rebuilt == first);
}

TEST_CASE("format_generator_input matches the generator input layout") {
  const auto s = fixtures::department_management();
  EntitySequence seq{"department_management",
                     {{"head", "name"}, {"head", "age"}, {"head", "born_state"}},
                     true};
  CHECK(format_generator_input(seq, s) ==
        "department management : head name text | head age number | head born state text");

  std::vector<Column> movie = {{0, "year", "", ColumnType::kNumber}, {0, "director", "", ColumnType::kText}};
  SchemaGraph culture("culture_company", {"movie"}, movie, {}, {});
  EntitySequence mseq{"culture_company", {{"movie", "year"}, {"movie", "director"}}, true};
  CHECK(format_generator_input(mseq, culture) == "culture company : movie year number | movie director text");

  const auto d = fixtures::single_table("d", "t", {{"x", ColumnType::kNumber}});
  const std::string one = format_generator_input({"d", {{"t", "x"}}, true}, d);
  CHECK(one == "d : t x number");
  CHECK(std::count(one.begin(), one.end(), '|') == 0);
  CHECK_THROWS_AS(format_generator_input({"d", {{"t", "y"}}, true}, d), ResolutionError);
}
