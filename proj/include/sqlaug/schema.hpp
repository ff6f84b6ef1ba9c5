#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sqlaug/common.hpp"

namespace sqlaug {

enum class ColumnType { kText, kNumber, kTime, kBoolean, kOthers };

std::string_view column_type_name(ColumnType t);
/// Maps unknown type names to kOthers (with a warning on stderr).
ColumnType parse_column_type(std::string_view name);

struct Column {
  int table = 0;
  std::string name;        // original identifier as used in SQL
  std::string human_name;  // display name; derived from name when absent
  ColumnType type = ColumnType::kOthers;
};

struct Entity {
  std::string table;
  std::string column;

  std::string to_string() const { return table + "." + column; }
  friend bool operator==(const Entity&, const Entity&) = default;
  friend auto operator<=>(const Entity&, const Entity&) = default;
};

/// One database: tables, typed columns, primary and foreign keys.
/// Immutable after construction; the constructor enforces every invariant.
class SchemaGraph {
 public:
  SchemaGraph(std::string db_id, std::vector<std::string> tables, std::vector<Column> columns,
              std::set<int> primary_keys, std::set<std::pair<int, int>> foreign_keys,
              std::vector<std::string> table_human_names = {});

  const std::string& db_id() const { return db_id_; }
  const std::vector<std::string>& tables() const { return tables_; }
  const std::vector<std::string>& table_human_names() const { return table_human_; }
  const std::vector<Column>& columns() const { return columns_; }
  const std::set<int>& primary_keys() const { return primary_keys_; }
  const std::set<std::pair<int, int>>& foreign_keys() const { return foreign_keys_; }

  std::size_t num_columns() const { return columns_.size(); }
  std::size_t num_tables() const { return tables_.size(); }

  /// Case-insensitive lookups.
  std::optional<int> find_table(std::string_view name) const;
  std::optional<int> find_column(int table, std::string_view name) const;
  std::optional<int> find_entity(const Entity& e) const;

  Entity entity(int column) const;
  std::vector<int> columns_of(int table) const;

  /// First foreign-key pair connecting the two tables, oriented (a-side, b-side).
  std::optional<std::pair<int, int>> join_columns(int table_a, int table_b) const;
  bool is_primary_key(int column) const { return primary_keys_.count(column) > 0; }
  bool is_foreign_key(int column) const;

 private:
  std::string db_id_;
  std::vector<std::string> tables_;
  std::vector<std::string> table_human_;
  std::vector<Column> columns_;
  std::set<int> primary_keys_;
  std::set<std::pair<int, int>> foreign_keys_;
};

/// Entities of one question/query: <DB_NAME> prefix, ordered unique
/// entities, optional <EOS> terminator.
struct EntitySequence {
  std::string db_name;
  std::vector<Entity> entities;
  bool terminated = true;

  friend bool operator==(const EntitySequence&, const EntitySequence&) = default;
  std::string to_string() const;
};

struct AnnotatedPair {
  std::string question;
  std::string sql;
  std::string db_id;

  friend bool operator==(const AnnotatedPair&, const AnnotatedPair&) = default;
};

/// Spider-compatible tables file.
std::vector<SchemaGraph> load_schemas(const std::string& path);
std::vector<SchemaGraph> parse_schemas(std::string_view json_text);
std::string dump_schemas(const std::vector<SchemaGraph>& schemas);
void save_schemas(const std::string& path, const std::vector<SchemaGraph>& schemas);

/// Spider-compatible examples file (question, query, db_id).
std::vector<AnnotatedPair> load_examples(const std::string& path,
                                         const std::vector<SchemaGraph>& schemas);
std::vector<AnnotatedPair> parse_examples(std::string_view json_text,
                                          const std::vector<SchemaGraph>& schemas);
std::string dump_examples(const std::vector<AnnotatedPair>& pairs);
void save_examples(const std::string& path, const std::vector<AnnotatedPair>& pairs);

const SchemaGraph* find_schema(const std::vector<SchemaGraph>& schemas, std::string_view db_id);
const SchemaGraph& require_schema(const std::vector<SchemaGraph>& schemas, std::string_view db_id);

/// Entities in first-appearance order with duplicates and "*" removed.
/// Throws SqlError on untokenizable SQL and ResolutionError on references
/// that do not resolve (or resolve ambiguously) in the schema.
EntitySequence extract_entity_sequence(std::string_view sql, const SchemaGraph& schema);

/// "<db> : <table> <column> <type> | ..." with underscores turned into spaces.
std::string format_generator_input(const EntitySequence& seq, const SchemaGraph& schema);

}  // namespace sqlaug
