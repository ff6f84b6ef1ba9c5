#include "sqlaug/schema.hpp"

#include <algorithm>
#include <iostream>
#include <map>

#include "json.hpp"
#include "sqlaug/sql.hpp"

namespace sqlaug {

using ordered_json = nlohmann::ordered_json;

std::string_view column_type_name(ColumnType t) {
  switch (t) {
    case ColumnType::kText: return "text";
    case ColumnType::kNumber: return "number";
    case ColumnType::kTime: return "time";
    case ColumnType::kBoolean: return "boolean";
    case ColumnType::kOthers: return "others";
  }
  return "others";
}

ColumnType parse_column_type(std::string_view name) {
  const std::string lowered = to_lower(name);
  if (lowered == "text") return ColumnType::kText;
  if (lowered == "number") return ColumnType::kNumber;
  if (lowered == "time") return ColumnType::kTime;
  if (lowered == "boolean") return ColumnType::kBoolean;
  if (lowered != "others") {
    std::cerr << "WARNING: unknown column type '" << name << "', using 'others'\n";
  }
  return ColumnType::kOthers;
}

SchemaGraph::SchemaGraph(std::string db_id, std::vector<std::string> tables,
                         std::vector<Column> columns, std::set<int> primary_keys,
                         std::set<std::pair<int, int>> foreign_keys,
                         std::vector<std::string> table_human_names)
    : db_id_(std::move(db_id)),
      tables_(std::move(tables)),
      table_human_(std::move(table_human_names)),
      columns_(std::move(columns)),
      primary_keys_(std::move(primary_keys)),
      foreign_keys_(std::move(foreign_keys)) {
  auto violation = [this](const std::string& what) {
    return InvariantError("schema '" + db_id_ + "': " + what);
  };
  if (db_id_.empty()) throw InvariantError("schema with empty db_id");
  if (table_human_.empty()) {
    for (const auto& t : tables_) table_human_.push_back(human_name(t));
  }
  if (table_human_.size() != tables_.size()) throw violation("table name lists differ in length");
  std::set<std::string> seen_tables;
  for (const auto& t : tables_) {
    if (t.empty()) throw violation("empty table name");
    if (!seen_tables.insert(to_lower(t)).second) throw violation("duplicate table " + t);
  }
  const int n = static_cast<int>(columns_.size());
  std::set<std::pair<int, std::string>> seen;
  for (auto& c : columns_) {
    if (c.table < 0 || c.table >= static_cast<int>(tables_.size())) {
      throw violation("column '" + c.name + "' has invalid table index " +
                      std::to_string(c.table));
    }
    if (c.name.empty()) throw violation("empty column name");
    if (!seen.emplace(c.table, to_lower(c.name)).second) {
      throw violation("duplicate column " + tables_[c.table] + "." + c.name);
    }
    if (c.human_name.empty()) c.human_name = human_name(c.name);
  }
  for (int pk : primary_keys_) {
    if (pk < 0 || pk >= n) throw violation("primary key index " + std::to_string(pk) + " out of range");
  }
  for (const auto& [a, b] : foreign_keys_) {
    if (a < 0 || a >= n || b < 0 || b >= n) {
      throw violation("foreign key (" + std::to_string(a) + ", " + std::to_string(b) +
                      ") out of range for " + std::to_string(n) + " columns");
    }
    if (a == b) throw violation("self-referential foreign key " + std::to_string(a));
  }
}

std::optional<int> SchemaGraph::find_table(std::string_view name) const {
  const std::string key = to_lower(name);
  for (std::size_t i = 0; i < tables_.size(); ++i) {
    if (to_lower(tables_[i]) == key) return static_cast<int>(i);
  }
  return std::nullopt;
}

std::optional<int> SchemaGraph::find_column(int table, std::string_view name) const {
  const std::string key = to_lower(name);
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].table == table && to_lower(columns_[i].name) == key) return static_cast<int>(i);
  }
  return std::nullopt;
}

std::optional<int> SchemaGraph::find_entity(const Entity& e) const {
  auto t = find_table(e.table);
  if (!t) return std::nullopt;
  return find_column(*t, e.column);
}

Entity SchemaGraph::entity(int column) const {
  const Column& c = columns_.at(static_cast<std::size_t>(column));
  return Entity{tables_[c.table], c.name};
}

std::vector<int> SchemaGraph::columns_of(int table) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].table == table) out.push_back(static_cast<int>(i));
  }
  return out;
}

std::optional<std::pair<int, int>> SchemaGraph::join_columns(int table_a, int table_b) const {
  for (const auto& [x, y] : foreign_keys_) {
    const int tx = columns_[x].table;
    const int ty = columns_[y].table;
    if (tx == table_a && ty == table_b) return std::make_pair(x, y);
    if (tx == table_b && ty == table_a) return std::make_pair(y, x);
  }
  return std::nullopt;
}

bool SchemaGraph::is_foreign_key(int column) const {
  return std::any_of(foreign_keys_.begin(), foreign_keys_.end(),
                     [column](const auto& fk) { return fk.first == column || fk.second == column; });
}

std::string EntitySequence::to_string() const {
  std::vector<std::string> parts;
  parts.reserve(entities.size());
  for (const auto& e : entities) parts.push_back(e.to_string());
  return db_name + " : " + join(parts, ", ");
}

// ------------------------------------------------------------------ files

namespace {

std::vector<int> flatten_keys(const ordered_json& j) {
  std::vector<int> out;
  for (const auto& item : j) {
    if (item.is_array()) {
      for (const auto& inner : item) out.push_back(inner.get<int>());
    } else {
      out.push_back(item.get<int>());
    }
  }
  return out;
}

SchemaGraph schema_from_json(const ordered_json& rec) {
  const std::string db_id = rec.at("db_id").get<std::string>();
  std::vector<std::string> tables = rec.at("table_names_original").get<std::vector<std::string>>();
  std::vector<std::string> human_tables;
  if (rec.contains("table_names")) human_tables = rec.at("table_names").get<std::vector<std::string>>();
  const auto& originals = rec.at("column_names_original");
  const ordered_json* humans = rec.contains("column_names") ? &rec.at("column_names") : nullptr;
  const auto& types = rec.at("column_types");
  if (types.size() != originals.size()) {
    throw InvariantError("schema '" + db_id + "': column_types length mismatch");
  }

  // File indices include the "*" pseudo-column (table -1); in-memory indices do not.
  std::map<int, int> remap;
  std::vector<Column> columns;
  for (std::size_t i = 0; i < originals.size(); ++i) {
    const int table = originals[i].at(0).get<int>();
    const std::string name = originals[i].at(1).get<std::string>();
    if (table == -1 && name == "*") continue;
    Column c;
    c.table = table;
    c.name = name;
    if (humans && i < humans->size()) c.human_name = (*humans)[i].at(1).get<std::string>();
    c.type = parse_column_type(types[i].get<std::string>());
    remap[static_cast<int>(i)] = static_cast<int>(columns.size());
    columns.push_back(std::move(c));
  }
  auto mapped = [&](int file_index) {
    auto it = remap.find(file_index);
    if (it == remap.end()) {
      // Out-of-range indices are kept so the constructor reports them.
      return file_index >= static_cast<int>(originals.size()) ? file_index : -1;
    }
    return it->second;
  };
  std::set<int> pks;
  if (rec.contains("primary_keys")) {
    for (int k : flatten_keys(rec.at("primary_keys"))) pks.insert(mapped(k));
  }
  std::set<std::pair<int, int>> fks;
  if (rec.contains("foreign_keys")) {
    for (const auto& fk : rec.at("foreign_keys")) {
      fks.emplace(mapped(fk.at(0).get<int>()), mapped(fk.at(1).get<int>()));
    }
  }
  return SchemaGraph(db_id, std::move(tables), std::move(columns), std::move(pks), std::move(fks),
                     std::move(human_tables));
}

ordered_json schema_to_json(const SchemaGraph& s) {
  ordered_json originals = ordered_json::array({ordered_json::array({-1, "*"})});
  ordered_json humans = ordered_json::array({ordered_json::array({-1, "*"})});
  ordered_json types = ordered_json::array({"text"});
  for (const auto& c : s.columns()) {
    originals.push_back(ordered_json::array({c.table, c.name}));
    humans.push_back(ordered_json::array({c.table, c.human_name}));
    types.push_back(std::string(column_type_name(c.type)));
  }
  ordered_json fks = ordered_json::array();
  for (const auto& [a, b] : s.foreign_keys()) fks.push_back(ordered_json::array({a + 1, b + 1}));
  ordered_json pks = ordered_json::array();
  for (int k : s.primary_keys()) pks.push_back(k + 1);
  ordered_json rec;
  rec["column_names"] = humans;
  rec["column_names_original"] = originals;
  rec["column_types"] = types;
  rec["db_id"] = s.db_id();
  rec["foreign_keys"] = fks;
  rec["primary_keys"] = pks;
  rec["table_names"] = s.table_human_names();
  rec["table_names_original"] = s.tables();
  return rec;
}

ordered_json parse_json_text(std::string_view text, const std::string& what) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(what + ": " + e.what());
  }
}

}  // namespace

std::vector<SchemaGraph> parse_schemas(std::string_view json_text) {
  const ordered_json doc = parse_json_text(json_text, "schema file");
  if (!doc.is_array()) throw ParseError("schema file: expected a JSON array");
  std::vector<SchemaGraph> out;
  out.reserve(doc.size());
  std::set<std::string> ids;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    try {
      out.push_back(schema_from_json(doc[i]));
    } catch (const InvariantError&) {
      throw;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("schema entry " + std::to_string(i) + ": " + e.what());
    }
    if (!ids.insert(out.back().db_id()).second) {
      throw InvariantError("duplicate db_id '" + out.back().db_id() + "'");
    }
  }
  return out;
}

std::vector<SchemaGraph> load_schemas(const std::string& path) {
  return parse_schemas(read_file(path));
}

std::string dump_schemas(const std::vector<SchemaGraph>& schemas) {
  ordered_json doc = ordered_json::array();
  for (const auto& s : schemas) doc.push_back(schema_to_json(s));
  return doc.dump(2) + "\n";
}

void save_schemas(const std::string& path, const std::vector<SchemaGraph>& schemas) {
  write_file(path, dump_schemas(schemas));
}

const SchemaGraph* find_schema(const std::vector<SchemaGraph>& schemas, std::string_view db_id) {
  for (const auto& s : schemas) {
    if (s.db_id() == db_id) return &s;
  }
  return nullptr;
}

const SchemaGraph& require_schema(const std::vector<SchemaGraph>& schemas, std::string_view db_id) {
  const SchemaGraph* s = find_schema(schemas, db_id);
  if (!s) throw ResolutionError("unknown db_id '" + std::string(db_id) + "'");
  return *s;
}

std::vector<AnnotatedPair> parse_examples(std::string_view json_text,
                                          const std::vector<SchemaGraph>& schemas) {
  if (trim(json_text).empty()) return {};
  const ordered_json doc = parse_json_text(json_text, "examples file");
  if (!doc.is_array()) throw ParseError("examples file: expected a JSON array");
  std::vector<AnnotatedPair> out;
  out.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    AnnotatedPair p;
    try {
      p.question = doc[i].at("question").get<std::string>();
      p.sql = doc[i].at("query").get<std::string>();
      p.db_id = doc[i].at("db_id").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("example " + std::to_string(i) + ": " + e.what());
    }
    if (!find_schema(schemas, p.db_id)) {
      throw ResolutionError("example " + std::to_string(i) + ": unknown db_id '" + p.db_id + "'");
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<AnnotatedPair> load_examples(const std::string& path,
                                         const std::vector<SchemaGraph>& schemas) {
  return parse_examples(read_file(path), schemas);
}

std::string dump_examples(const std::vector<AnnotatedPair>& pairs) {
  ordered_json doc = ordered_json::array();
  for (const auto& p : pairs) {
    ordered_json rec;
    rec["db_id"] = p.db_id;
    rec["query"] = p.sql;
    rec["question"] = p.question;
    doc.push_back(std::move(rec));
  }
  return doc.dump(2) + "\n";
}

void save_examples(const std::string& path, const std::vector<AnnotatedPair>& pairs) {
  write_file(path, dump_examples(pairs));
}

// --------------------------------------------------------------- entities

namespace {

struct ScopeTables {
  std::vector<std::pair<std::string, int>> names;  // lowered alias/table -> table index
  std::vector<int> tables;
};

ScopeTables scope_tables(const sql::SelectCore& core, const SchemaGraph& schema) {
  ScopeTables out;
  auto add = [&](const sql::TableRef& r) {
    if (r.subquery) return;
    auto t = schema.find_table(r.table);
    if (!t) throw ResolutionError("unknown table '" + r.table + "' in " + schema.db_id());
    out.tables.push_back(*t);
    out.names.emplace_back(to_lower(r.table), *t);
    if (!r.alias.empty()) out.names.emplace_back(to_lower(r.alias), *t);
  };
  add(core.from);
  for (const auto& j : core.joins) add(j.ref);
  return out;
}

}  // namespace

EntitySequence extract_entity_sequence(std::string_view sql_text, const SchemaGraph& schema) {
  const sql::Query query = sql::parse(sql_text);
  EntitySequence seq;
  seq.db_name = schema.db_id();
  std::set<int> seen;
  sql::for_each_column(query, [&](const sql::ColumnRef& ref,
                                  const std::vector<const sql::SelectCore*>& scopes) {
    if (ref.is_star()) return;
    std::optional<int> column;
    if (!ref.qualifier.empty()) {
      const std::string key = to_lower(ref.qualifier);
      for (auto it = scopes.rbegin(); it != scopes.rend() && !column; ++it) {
        const ScopeTables st = scope_tables(**it, schema);
        for (const auto& [name, table] : st.names) {
          if (name != key) continue;
          column = schema.find_column(table, ref.column);
          if (!column) {
            throw ResolutionError("column '" + ref.qualifier + "." + ref.column +
                                  "' not found in " + schema.db_id());
          }
          break;
        }
      }
      if (!column) {
        throw ResolutionError("unresolvable qualifier '" + ref.qualifier + "' in " + schema.db_id());
      }
    } else {
      for (auto it = scopes.rbegin(); it != scopes.rend() && !column; ++it) {
        const ScopeTables st = scope_tables(**it, schema);
        std::vector<int> hits;
        for (int t : st.tables) {
          if (auto c = schema.find_column(t, ref.column)) {
            if (std::find(hits.begin(), hits.end(), *c) == hits.end()) hits.push_back(*c);
          }
        }
        if (hits.size() > 1) {
          throw ResolutionError("ambiguous column '" + ref.column + "' in " + schema.db_id());
        }
        if (hits.size() == 1) column = hits.front();
      }
      if (!column) {
        throw ResolutionError("unresolvable column '" + ref.column + "' in " + schema.db_id());
      }
    }
    if (seen.insert(*column).second) seq.entities.push_back(schema.entity(*column));
  });
  return seq;
}

std::string format_generator_input(const EntitySequence& seq, const SchemaGraph& schema) {
  std::vector<std::string> segments;
  segments.reserve(seq.entities.size());
  for (const auto& e : seq.entities) {
    auto idx = schema.find_entity(e);
    if (!idx) {
      throw ResolutionError("entity '" + e.to_string() + "' not in schema " + schema.db_id());
    }
    const Column& c = schema.columns()[*idx];
    segments.push_back(human_name(schema.tables()[c.table]) + " " + human_name(c.name) + " " +
                       std::string(column_type_name(c.type)));
  }
  return human_name(seq.db_name) + " : " + join(segments, " | ");
}

}  // namespace sqlaug
