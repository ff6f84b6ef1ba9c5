#pragma once

#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sqlaug/common.hpp"
#include "sqlaug/schema.hpp"

/// Dataset diagnostics: SQL sketches, query deconstruction, normalized
/// entropy and normalized mutual information, and per-dataset reports.
namespace sqlaug::analysis {

struct Sketch {
  std::string masked_sql;          // tables -> _TAB_, columns -> _COL_, literals -> _VAL_
  std::vector<std::string> parts;  // deconstructed sub-sketches
};

/// Masks every table/column identifier and literal; keywords, operators and
/// aggregates are kept. Throws SqlError on input the SQL front end rejects.
Sketch sketch(std::string_view sql);
/// As above, and additionally requires every column reference to resolve in
/// `schema` (ResolutionError otherwise).
Sketch sketch(std::string_view sql, const SchemaGraph& schema);

/// Splits at UNION/INTERSECT/EXCEPT and pulls out each nested subquery as its
/// own part (the parent shows _SUB_ in its place); every part is masked.
std::vector<std::string> deconstruct(std::string_view sql);
std::vector<std::string> deconstruct(std::string_view sql, const SchemaGraph& schema);

/// Entropy (bits) of the empirical distribution given by counts.
double entropy_bits(const std::vector<double>& counts);

/// H(P)/log2(|support|) over categories with nonzero count; 0 for a single
/// category. Throws Error on empty input or zero total.
double normalized_entropy_from_counts(const std::vector<double>& counts);

template <typename Key, typename Count>
double normalized_entropy(const std::map<Key, Count>& counts) {
  std::vector<double> values;
  values.reserve(counts.size());
  for (const auto& [k, c] : counts) values.push_back(static_cast<double>(c));
  return normalized_entropy_from_counts(values);
}

/// 2 I(X:Y) / (H(X) + H(Y)) from a joint count table, 0 when H(X)+H(Y) = 0.
template <typename X, typename Y, typename Count>
double normalized_mutual_information(const std::map<std::pair<X, Y>, Count>& joint) {
  if (joint.empty()) throw Error("normalized_mutual_information: empty joint table");
  std::map<X, double> px;
  std::map<Y, double> py;
  std::vector<double> cells;
  double total = 0.0;
  for (const auto& [xy, c] : joint) {
    const double v = static_cast<double>(c);
    if (v < 0.0) throw Error("normalized_mutual_information: negative count");
    px[xy.first] += v;
    py[xy.second] += v;
    cells.push_back(v);
    total += v;
  }
  if (total <= 0.0) throw Error("normalized_mutual_information: zero total count");
  std::vector<double> xs, ys;
  for (const auto& [k, v] : px) xs.push_back(v);
  for (const auto& [k, v] : py) ys.push_back(v);
  const double hx = entropy_bits(xs);
  const double hy = entropy_bits(ys);
  const double hxy = entropy_bits(cells);
  if (hx + hy <= 0.0) return 0.0;
  const double nmi = 2.0 * (hx + hy - hxy) / (hx + hy);
  return std::min(1.0, std::max(0.0, nmi));
}

struct DatabaseStats {
  std::string db_id;
  std::size_t n_instances = 0;
  double h_tables = 0.0;
  double h_col = 0.0;
  double h_sketch = 0.0;
  double i_tables_sketch = 0.0;
  double i_col_sketch = 0.0;
};

/// Counts are global; normalized quantities are computed per database and
/// averaged without weights. The "db" statistics are over the set of tables
/// a query touches.
struct DatasetStats {
  std::size_t n_instances = 0;
  std::size_t n_skipped = 0;
  std::size_t n_unique_sketches = 0;
  std::size_t n_unique_column_sets = 0;
  double h_db = 0.0;
  double h_col = 0.0;
  double h_sketch = 0.0;
  double i_db_sketch = 0.0;
  double i_col_sketch = 0.0;
  std::vector<DatabaseStats> per_db;
};

/// Examples that fail to sketch or resolve are skipped and counted in n_skipped.
DatasetStats dataset_stats(const std::vector<AnnotatedPair>& examples,
                           const std::vector<SchemaGraph>& schemas);

nlohmann::ordered_json stats_to_json(const DatasetStats& stats);

/// Side-by-side table with one column per named dataset.
std::string format_report(const std::vector<std::pair<std::string, DatasetStats>>& columns);

/// Per-database rows as CSV (dataset,db_id,n,h_tables,h_col,h_sketch,i_tables_sketch,i_col_sketch).
std::string per_db_csv(const std::vector<std::pair<std::string, DatasetStats>>& columns);

}  // namespace sqlaug::analysis
