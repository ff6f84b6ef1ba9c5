#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sqlaug/embed.hpp"
#include "sqlaug/nn.hpp"
#include "sqlaug/schema.hpp"

struct sqlite3;

namespace sqlaug {

struct SqlCandidate {
  std::string sql;
  double score = 0.0;
};

/// Text-to-SQL parser conditioned on a schema.
class Parser {
 public:
  virtual ~Parser() = default;
  virtual std::string name() const = 0;
  virtual bool trained() const = 0;
  virtual std::vector<SqlCandidate> parse(const std::string& question, const SchemaGraph& schema,
                                          int beam) const = 0;
};

struct ParserConfig {
  double learning_rate = 5e-3;
  int epochs = 20;
  int batch_size = 8;
  double clip_norm = 1.0;
  std::uint64_t seed = 0;
  int embed_dim = 32;
  int hidden_dim = 64;
  int trigram_buckets = 1024;
  int beam = 8;
  int max_steps = 48;
};

nlohmann::json to_json(const ParserConfig& c);
ParserConfig parser_config_from_json(const nlohmann::json& j);

/// Decoding actions of the reference parser. Output index layout is
/// [keywords | tables | columns | "*"].
namespace grammar {

enum Keyword {
  kSelect, kSelectDistinct,
  kAggNone, kAggCount, kAggSum, kAggAvg, kAggMin, kAggMax,
  kJoin, kNoJoin,
  kMore, kWhere, kGroupBy, kHaving, kOrderBy, kLimit, kEos,
  kOpEq, kOpNe, kOpLt, kOpGt, kOpLe, kOpGe, kOpLike,
  kAnd, kOr,
  kAsc, kDesc,
  kNumKeywords
};

std::string_view keyword_name(int k);

/// Decoding state machine: which actions are legal after a prefix.
class Machine {
 public:
  enum class Phase {
    kFromTable, kJoinChoice, kJoinTable, kSelect, kSelectAgg, kSelectColumn, kAfterSelect,
    kWhereColumn, kWhereOp, kAfterWhere, kGroupColumn, kAfterGroup, kHavingAgg, kHavingColumn,
    kHavingOp, kAfterHaving, kOrderAgg, kOrderColumn, kOrderDirection, kAfterOrder, kDone
  };
  static constexpr int kNumPhases = static_cast<int>(Phase::kDone) + 1;

  explicit Machine(const SchemaGraph& schema);
  std::vector<char> allowed() const;
  /// Throws ModelError on an illegal action.
  void apply(int action);
  bool done() const { return phase_ == Phase::kDone; }
  Phase phase() const { return phase_; }
  int size() const;
  int star_index() const { return kNumKeywords + tables_ + columns_; }

 private:
  bool linked(int table) const;
  bool column_in_scope(int column) const;

  const SchemaGraph* schema_;
  int tables_;
  int columns_;
  Phase phase_ = Phase::kFromTable;
  int t1_ = -1;
  int t2_ = -1;
  int items_ = 0;
  int predicates_ = 0;
  int agg_ = kAggNone;
};

/// Action sequence for a query inside the decodable subset: one FROM table
/// with at most one foreign-key join, a select list, AND/OR chains of
/// column-op-value predicates, one GROUP BY column with an optional
/// single-predicate HAVING, one ORDER BY item and LIMIT. Returns nullopt for
/// anything else.
std::optional<std::vector<int>> linearize(const std::string& sql, const SchemaGraph& schema);

/// SQL text of a complete action sequence. Identifiers are qualified with
/// table names; values print as 'value' and the limit as 1.
std::string render(const std::vector<int>& actions, const SchemaGraph& schema);

/// Legal next actions after a prefix (empty when the prefix is complete).
std::vector<char> allowed_actions(const std::vector<int>& prefix, const SchemaGraph& schema);
bool is_complete(const std::vector<int>& actions, const SchemaGraph& schema);

}  // namespace grammar

/// Desk-scale reference parser: BiLSTM question encoder, schema items encoded
/// from their names, an LSTM decoder over grammar actions with attention, and
/// pointer scores for tables and columns that add attended question/schema
/// word matches.
class GrammarParser : public Parser {
 public:
  GrammarParser(ParserConfig cfg, text::Vocabulary words);

  std::string name() const override { return "grammar-pointer"; }
  bool trained() const override { return trained_; }
  void set_trained(bool t) { trained_ = t; }
  std::vector<SqlCandidate> parse(const std::string& question, const SchemaGraph& schema,
                                  int beam) const override;

  const ParserConfig& config() const { return cfg_; }
  nn::ParameterSet& params() { return params_; }
  nn::Graph::Var loss(nn::Graph& g, const std::string& question, const SchemaGraph& schema,
                      const std::vector<int>& actions) const;

  std::vector<double> epoch_loss;

  nlohmann::json to_json() const;
  static GrammarParser from_json(const nlohmann::json& j);
  void save(const std::string& path) const;
  static GrammarParser load(const std::string& path);

 private:
  struct Encoded;
  struct State;
  Encoded encode(nn::Graph& g, nn::EmbedCache& cache, const std::string& question,
                 const SchemaGraph& schema) const;
  nn::Graph::Var step(nn::Graph& g, const Encoded& enc, State& s, const std::vector<int>& prefix) const;

  ParserConfig cfg_;
  nn::ParameterSet params_;
  nn::TokenEmbedder embed_;
  nn::Lstm enc_fwd_;
  nn::Lstm enc_bwd_;
  nn::Linear init_;
  nn::Linear column_enc_;
  nn::Linear table_enc_;
  nn::Parameter* star_ = nullptr;
  nn::Parameter* keyword_emb_ = nullptr;
  nn::Lstm decoder_;
  nn::Parameter* attend_ = nullptr;
  nn::Linear combine_;
  nn::Linear keyword_out_;
  nn::Parameter* table_ptr_ = nullptr;
  nn::Parameter* column_ptr_ = nullptr;
  nn::Parameter* table_feat_ = nullptr;
  nn::Parameter* column_feat_ = nullptr;
  bool trained_ = false;
};

/// Training data prepared for the reference parser.
struct ParserTrainingSet {
  std::vector<std::string> questions;
  std::vector<const SchemaGraph*> schemas;
  std::vector<std::vector<int>> actions;
  std::vector<double> weights;
  std::size_t skipped = 0;  // examples outside the decodable subset
};

/// Throws ResolutionError when an example's db_id has no schema.
ParserTrainingSet prepare_parser_data(const std::vector<AnnotatedPair>& examples,
                                      const std::vector<double>& weights,
                                      const std::vector<SchemaGraph>& schemas);

/// Fresh model whose word vocabulary covers the given questions and schemas.
GrammarParser make_parser(const ParserConfig& cfg, const std::vector<std::string>& questions,
                          const std::vector<const SchemaGraph*>& schemas);

/// Continues training `model` on `data` (weighted mean loss per batch).
void fit_parser(GrammarParser& model, const ParserTrainingSet& data, const ParserConfig& cfg,
                std::uint64_t shuffle_seed);

GrammarParser train_parser(const std::vector<AnnotatedPair>& examples,
                           const std::vector<SchemaGraph>& schemas, const ParserConfig& cfg);

/// At most `beam` candidates, score-sorted, each referencing only the schema.
std::vector<SqlCandidate> parse_beam(const Parser& model, const std::string& question,
                                     const SchemaGraph& schema, int beam);

/// One SQLite database per db_id, each behind its own mutex, with a
/// statement timeout. Schemas are kept for the syntactic fallback.
class ExecEnvironment {
 public:
  explicit ExecEnvironment(std::vector<SchemaGraph> schemas = {}, double timeout_seconds = 5.0);
  ~ExecEnvironment();
  ExecEnvironment(const ExecEnvironment&) = delete;
  ExecEnvironment& operator=(const ExecEnvironment&) = delete;

  /// Registers <dir>/<db_id>/<db_id>.sqlite or <dir>/<db_id>.sqlite for every
  /// schema that has one.
  void add_directory(const std::string& dir);
  void add_database(const std::string& db_id, const std::string& path);
  bool has_database(const std::string& db_id) const;
  const SchemaGraph* schema(const std::string& db_id) const;
  double timeout_seconds() const { return timeout_; }

  /// Runs a single read-only statement to completion. Returns an empty
  /// string on success, otherwise the error message.
  std::string execute(const std::string& db_id, const std::string& sql);

 private:
  struct Database {
    std::string path;
    sqlite3* conn = nullptr;
    std::mutex mu;
  };
  std::vector<SchemaGraph> schemas_;
  double timeout_;
  mutable std::mutex registry_mu_;
  std::map<std::string, std::unique_ptr<Database>> dbs_;
};

/// True iff the query runs without error within the timeout. Without a
/// database for db_id, falls back to parsing and resolving the query
/// against the schema; unknown db_ids give false.
bool check_executable(const std::string& sql, ExecEnvironment& env, const std::string& db_id);

struct LabeledQuestion {
  std::string question;
  std::string sql;
  double score = 0.0;
};

/// Highest-scoring executable beam candidate per question; questions with no
/// executable candidate are dropped.
std::vector<LabeledQuestion> pred(const Parser& model, const std::vector<std::string>& questions,
                                  const SchemaGraph& schema, ExecEnvironment& env, int beam);

/// Canonical form used by exact_match and paraphrase grouping: aliases
/// resolved, identifiers and keywords lowercased, values masked, pure-AND
/// conjuncts and ON pairs sorted, implicit ASC made explicit. Unparsable SQL
/// falls back to lowercase with collapsed whitespace.
std::string canonical_sql(const std::string& sql);
bool exact_match(const std::string& predicted, const std::string& gold);

}  // namespace sqlaug
