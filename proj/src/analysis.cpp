#include "sqlaug/analysis.hpp"

#include <algorithm>
#include <functional>
#include <iomanip>
#include <set>
#include <sstream>

#include "sqlaug/sql.hpp"

namespace sqlaug::analysis {
namespace {

sql::PrintOptions mask_all() {
  sql::PrintOptions o;
  o.mask_tables = true;
  o.mask_columns = true;
  o.mask_values = true;
  o.drop_aliases = true;
  return o;
}

struct Observation {
  std::string tables;
  std::string columns;
  std::vector<std::string> parts;
};

std::string fmt(double v) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(3) << v;
  return ss.str();
}

}  // namespace

Sketch sketch(std::string_view sql_text) {
  const sql::Query q = sql::parse(sql_text);
  const auto opts = mask_all();
  return Sketch{sql::to_string(q, opts), sql::split_parts(q, opts)};
}

Sketch sketch(std::string_view sql_text, const SchemaGraph& schema) {
  extract_entity_sequence(sql_text, schema);
  return sketch(sql_text);
}

std::vector<std::string> deconstruct(std::string_view sql_text) {
  return sql::split_parts(sql::parse(sql_text), mask_all());
}

std::vector<std::string> deconstruct(std::string_view sql_text, const SchemaGraph& schema) {
  extract_entity_sequence(sql_text, schema);
  return deconstruct(sql_text);
}

double entropy_bits(const std::vector<double>& counts) {
  double total = 0.0;
  for (double c : counts) total += c;
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (double c : counts) {
    if (c <= 0.0) continue;
    const double p = c / total;
    h -= p * std::log2(p);
  }
  return h;
}

double normalized_entropy_from_counts(const std::vector<double>& counts) {
  if (counts.empty()) throw Error("normalized_entropy: empty counts");
  double total = 0.0;
  std::size_t support = 0;
  for (double c : counts) {
    if (c < 0.0) throw Error("normalized_entropy: negative count");
    total += c;
    if (c > 0.0) ++support;
  }
  if (total <= 0.0) throw Error("normalized_entropy: zero total count");
  if (support <= 1) return 0.0;
  const double h = entropy_bits(counts) / std::log2(static_cast<double>(support));
  return std::min(1.0, std::max(0.0, h));
}

DatasetStats dataset_stats(const std::vector<AnnotatedPair>& examples,
                           const std::vector<SchemaGraph>& schemas) {
  DatasetStats stats;
  std::map<std::string, std::vector<Observation>> by_db;
  std::set<std::string> unique_parts;
  std::set<std::string> unique_colsets;
  for (const auto& ex : examples) {
    Observation obs;
    try {
      const SchemaGraph& schema = require_schema(schemas, ex.db_id);
      const EntitySequence seq = extract_entity_sequence(ex.sql, schema);
      std::vector<std::string> cols;
      for (const auto& e : seq.entities) cols.push_back(to_lower(e.to_string()));
      std::sort(cols.begin(), cols.end());
      obs.columns = join(cols, ",");
      const sql::Query q = sql::parse(ex.sql);
      std::vector<std::string> tables = sql::referenced_tables(q);
      std::sort(tables.begin(), tables.end());
      obs.tables = join(tables, ",");
      obs.parts = sql::split_parts(q, mask_all());
    } catch (const Error&) {
      ++stats.n_skipped;
      continue;
    }
    ++stats.n_instances;
    unique_parts.insert(obs.parts.begin(), obs.parts.end());
    unique_colsets.insert(ex.db_id + ":" + obs.columns);
    by_db[ex.db_id].push_back(std::move(obs));
  }
  stats.n_unique_sketches = unique_parts.size();
  stats.n_unique_column_sets = unique_colsets.size();

  for (const auto& [db, observations] : by_db) {
    std::map<std::string, double> tables, cols, parts;
    std::map<std::pair<std::string, std::string>, double> tables_parts, cols_parts;
    for (const auto& o : observations) {
      tables[o.tables] += 1.0;
      cols[o.columns] += 1.0;
      for (const auto& p : o.parts) {
        parts[p] += 1.0;
        tables_parts[{o.tables, p}] += 1.0;
        cols_parts[{o.columns, p}] += 1.0;
      }
    }
    DatabaseStats d;
    d.db_id = db;
    d.n_instances = observations.size();
    d.h_tables = normalized_entropy(tables);
    d.h_col = normalized_entropy(cols);
    d.h_sketch = normalized_entropy(parts);
    d.i_tables_sketch = normalized_mutual_information(tables_parts);
    d.i_col_sketch = normalized_mutual_information(cols_parts);
    stats.per_db.push_back(std::move(d));
  }
  if (!stats.per_db.empty()) {
    const double n = static_cast<double>(stats.per_db.size());
    for (const auto& d : stats.per_db) {
      stats.h_db += d.h_tables / n;
      stats.h_col += d.h_col / n;
      stats.h_sketch += d.h_sketch / n;
      stats.i_db_sketch += d.i_tables_sketch / n;
      stats.i_col_sketch += d.i_col_sketch / n;
    }
  }
  return stats;
}

nlohmann::ordered_json stats_to_json(const DatasetStats& s) {
  nlohmann::ordered_json j;
  j["n_instances"] = s.n_instances;
  j["n_skipped"] = s.n_skipped;
  j["n_unique_sketches"] = s.n_unique_sketches;
  j["n_unique_column_sets"] = s.n_unique_column_sets;
  j["counts_approximate"] = true;
  j["h_db"] = s.h_db;
  j["h_col"] = s.h_col;
  j["h_sketch"] = s.h_sketch;
  j["i_db_sketch"] = s.i_db_sketch;
  j["i_col_sketch"] = s.i_col_sketch;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& d : s.per_db) {
    rows.push_back({{"db_id", d.db_id},
                    {"n_instances", d.n_instances},
                    {"h_tables", d.h_tables},
                    {"h_col", d.h_col},
                    {"h_sketch", d.h_sketch},
                    {"i_tables_sketch", d.i_tables_sketch},
                    {"i_col_sketch", d.i_col_sketch}});
  }
  j["per_db"] = rows;
  return j;
}

std::string format_report(const std::vector<std::pair<std::string, DatasetStats>>& columns) {
  struct Row {
    std::string label;
    std::function<std::string(const DatasetStats&)> get;
  };
  const std::vector<Row> rows = {
      {"# instances", [](const DatasetStats& s) { return std::to_string(s.n_instances); }},
      {"# skipped", [](const DatasetStats& s) { return std::to_string(s.n_skipped); }},
      {"# unique sketch (approx.)", [](const DatasetStats& s) { return std::to_string(s.n_unique_sketches); }},
      {"# unique col set", [](const DatasetStats& s) { return std::to_string(s.n_unique_column_sets); }},
      {"H~ tables (up)", [](const DatasetStats& s) { return fmt(s.h_db); }},
      {"H~ col (up)", [](const DatasetStats& s) { return fmt(s.h_col); }},
      {"H~ sketch (up)", [](const DatasetStats& s) { return fmt(s.h_sketch); }},
      {"I~ tables:sketch (down)", [](const DatasetStats& s) { return fmt(s.i_db_sketch); }},
      {"I~ col:sketch (down)", [](const DatasetStats& s) { return fmt(s.i_col_sketch); }},
  };
  std::ostringstream out;
  out << std::left << std::setw(28) << "statistic";
  for (const auto& [name, s] : columns) out << std::setw(16) << name;
  out << "\n";
  for (const auto& row : rows) {
    out << std::setw(28) << row.label;
    for (const auto& [name, s] : columns) out << std::setw(16) << row.get(s);
    out << "\n";
  }
  return out.str();
}

std::string per_db_csv(const std::vector<std::pair<std::string, DatasetStats>>& columns) {
  std::ostringstream out;
  out << "dataset,db_id,n,h_tables,h_col,h_sketch,i_tables_sketch,i_col_sketch\n";
  out << std::setprecision(6);
  for (const auto& [name, s] : columns) {
    for (const auto& d : s.per_db) {
      out << name << "," << d.db_id << "," << d.n_instances << "," << d.h_tables << "," << d.h_col
          << "," << d.h_sketch << "," << d.i_tables_sketch << "," << d.i_col_sketch << "\n";
    }
  }
  return out.str();
}

}  // namespace sqlaug::analysis
