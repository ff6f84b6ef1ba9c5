#pragma once

#include "sqlaug/schema.hpp"

namespace fixtures {

using sqlaug::Column;
using sqlaug::ColumnType;
using sqlaug::SchemaGraph;

inline SchemaGraph concert_singer() {
  std::vector<Column> cols = {
      {0, "Singer_ID", "", ColumnType::kNumber}, {0, "Name", "", ColumnType::kText},
      {0, "Country", "", ColumnType::kText},     {0, "Age", "", ColumnType::kNumber},
      {1, "concert_ID", "", ColumnType::kNumber}, {1, "Singer_ID", "", ColumnType::kNumber},
      {1, "Year", "", ColumnType::kText},
  };
  return SchemaGraph("concert_singer", {"singer", "concert"}, cols, {0, 4}, {{5, 0}});
}

inline SchemaGraph department_management() {
  std::vector<Column> cols = {
      {0, "Department_ID", "", ColumnType::kNumber}, {0, "Name", "", ColumnType::kText},
      {0, "Budget_in_Billions", "", ColumnType::kNumber}, {1, "head_ID", "", ColumnType::kNumber},
      {1, "name", "", ColumnType::kText},           {1, "born_state", "", ColumnType::kText},
      {1, "age", "", ColumnType::kNumber},          {2, "department_ID", "", ColumnType::kNumber},
      {2, "head_ID", "", ColumnType::kNumber},      {2, "temporary_acting", "", ColumnType::kText},
  };
  return SchemaGraph("department_management", {"department", "head", "management"}, cols, {0, 3},
                     {{7, 0}, {8, 3}});
}

inline SchemaGraph single_table(const std::string& db, const std::string& table,
                                std::vector<std::pair<std::string, ColumnType>> columns) {
  std::vector<Column> cols;
  for (auto& [name, type] : columns) cols.push_back({0, name, "", type});
  return SchemaGraph(db, {table}, cols, {}, {});
}

}  // namespace fixtures
