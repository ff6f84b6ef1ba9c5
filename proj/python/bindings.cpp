#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cli.hpp"
#include "sqlaug/analysis.hpp"
#include "sqlaug/parser.hpp"
#include "sqlaug/schema.hpp"
#include "sqlaug/toy.hpp"

namespace py = pybind11;
using namespace sqlaug;

namespace {

std::vector<AnnotatedPair> to_pairs(const std::vector<std::tuple<std::string, std::string, std::string>>& rows) {
  std::vector<AnnotatedPair> out;
  for (const auto& [q, sql, db] : rows) out.push_back({q, sql, db});
  return out;
}

}  // namespace

PYBIND11_MODULE(_sqlaug, m) {
  m.doc() = "Bindings for the sqlaug text-to-SQL augmentation toolkit";

  // Registered base first: pybind11 tries the most recent translator first.
  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<SqlError>(m, "SqlError", base.ptr());
  py::register_exception<ResolutionError>(m, "ResolutionError", base.ptr());
  py::register_exception<InvariantError>(m, "InvariantError", base.ptr());
  py::register_exception<ModelError>(m, "ModelError", base.ptr());

  py::class_<SchemaGraph>(m, "Schema")
      .def_property_readonly("db_id", &SchemaGraph::db_id)
      .def_property_readonly("tables", &SchemaGraph::tables)
      .def_property_readonly("columns",
                             [](const SchemaGraph& s) {
                               std::vector<std::tuple<std::string, std::string, std::string>> out;
                               for (const auto& c : s.columns()) {
                                 out.emplace_back(s.tables()[static_cast<std::size_t>(c.table)], c.name,
                                                  std::string(column_type_name(c.type)));
                               }
                               return out;
                             })
      .def_property_readonly("foreign_keys",
                             [](const SchemaGraph& s) {
                               return std::vector<std::pair<int, int>>(s.foreign_keys().begin(),
                                                                       s.foreign_keys().end());
                             })
      .def("__repr__", [](const SchemaGraph& s) {
        return "<Schema " + s.db_id() + ": " + std::to_string(s.num_tables()) + " tables, " +
               std::to_string(s.num_columns()) + " columns>";
      });

  m.def("load_schemas", &load_schemas, py::arg("path"));
  m.def("parse_schemas", [](const std::string& text) { return parse_schemas(text); }, py::arg("json_text"));
  m.def(
      "load_examples",
      [](const std::string& path, const std::vector<SchemaGraph>& schemas) {
        std::vector<std::tuple<std::string, std::string, std::string>> out;
        for (const auto& p : load_examples(path, schemas)) out.emplace_back(p.question, p.sql, p.db_id);
        return out;
      },
      py::arg("path"), py::arg("schemas"), "List of (question, sql, db_id).");

  m.def(
      "extract_entity_sequence",
      [](const std::string& sql, const SchemaGraph& schema) {
        std::vector<std::string> out;
        for (const auto& e : extract_entity_sequence(sql, schema).entities) out.push_back(e.table + "." + e.column);
        return out;
      },
      py::arg("sql"), py::arg("schema"));
  m.def(
      "sketch", [](const std::string& sql) { return analysis::sketch(sql).masked_sql; }, py::arg("sql"));
  m.def(
      "deconstruct", [](const std::string& sql) { return analysis::deconstruct(sql); }, py::arg("sql"));
  m.def("canonical_sql", &canonical_sql, py::arg("sql"));
  m.def("exact_match", &exact_match, py::arg("predicted"), py::arg("gold"));

  m.def(
      "normalized_entropy",
      [](const std::map<std::string, double>& counts) { return analysis::normalized_entropy(counts); },
      py::arg("counts"));
  m.def(
      "normalized_mutual_information",
      [](const std::map<std::pair<std::string, std::string>, double>& joint) {
        return analysis::normalized_mutual_information(joint);
      },
      py::arg("joint"));
  m.def(
      "_dataset_stats_json",
      [](const std::vector<std::tuple<std::string, std::string, std::string>>& rows,
         const std::vector<SchemaGraph>& schemas) {
        return analysis::stats_to_json(analysis::dataset_stats(to_pairs(rows), schemas)).dump();
      },
      py::arg("examples"), py::arg("schemas"));

  m.def(
      "make_toy",
      [](const std::string& dir, std::uint64_t seed, int pairs_per_domain) {
        ToyConfig tc;
        tc.seed = seed;
        tc.pairs_per_domain = pairs_per_domain;
        save_toy_corpus(make_toy_corpus(tc), dir, tc);
      },
      py::arg("dir"), py::arg("seed") = 0, py::arg("pairs_per_domain") = ToyConfig{}.pairs_per_domain);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs one sqlaug command; returns (exit_code, stdout, stderr).");
}
