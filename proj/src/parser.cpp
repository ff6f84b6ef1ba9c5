#include "sqlaug/parser.hpp"

#include <sqlite3.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <set>

#include "sqlaug/sql.hpp"
#include "sqlaug/text.hpp"

namespace sqlaug {

using grammar::Machine;
using nn::Graph;
using nn::Matrix;

namespace {

constexpr int kColumnFeatures = 6;  // full match, fraction, pk, table mentioned, fk, star
constexpr int kTableFeatures = 3;   // full match, fraction, mentioned-column share

std::vector<std::string> question_words(const std::string& question) {
  std::vector<std::string> out;
  for (const auto& t : text::tokenize(question)) out.push_back(to_lower(t));
  if (out.empty()) throw ModelError("parser question is empty");
  return out;
}

std::vector<std::string> stems_of(const std::string& phrase) {
  std::vector<std::string> out;
  for (const auto& w : split_whitespace(phrase)) out.push_back(text::stem(w));
  return out;
}

struct Matches {
  Matrix per_position;  // n x items; 1/|name| where a question word matches a name word
  Eigen::VectorXd full;
  Eigen::VectorXd fraction;
};

Matches match(const std::vector<std::string>& qstems, const std::vector<std::vector<std::string>>& names) {
  const std::set<std::string> present(qstems.begin(), qstems.end());
  Matches m;
  const auto n = static_cast<Eigen::Index>(qstems.size());
  const auto k = static_cast<Eigen::Index>(names.size());
  m.per_position = Matrix::Zero(n, k);
  m.full = Eigen::VectorXd::Zero(k);
  m.fraction = Eigen::VectorXd::Zero(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const auto& words = names[static_cast<std::size_t>(j)];
    if (words.empty()) continue;
    const double share = 1.0 / static_cast<double>(words.size());
    int hits = 0;
    for (const auto& w : words) hits += present.count(w) ? 1 : 0;
    m.full(j) = hits == static_cast<int>(words.size()) ? 1.0 : 0.0;
    m.fraction(j) = hits * share;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::count(words.begin(), words.end(), qstems[static_cast<std::size_t>(i)])) {
        m.per_position(i, j) = share;
      }
    }
  }
  return m;
}

}  // namespace

nlohmann::json to_json(const ParserConfig& c) {
  return {{"learning_rate", c.learning_rate},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"clip_norm", c.clip_norm},
          {"seed", c.seed},
          {"embed_dim", c.embed_dim},
          {"hidden_dim", c.hidden_dim},
          {"trigram_buckets", c.trigram_buckets},
          {"beam", c.beam},
          {"max_steps", c.max_steps}};
}

ParserConfig parser_config_from_json(const nlohmann::json& j) {
  ParserConfig c;
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.clip_norm = j.value("clip_norm", c.clip_norm);
  c.seed = j.value("seed", c.seed);
  c.embed_dim = j.value("embed_dim", c.embed_dim);
  c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
  c.trigram_buckets = j.value("trigram_buckets", c.trigram_buckets);
  c.beam = j.value("beam", c.beam);
  c.max_steps = j.value("max_steps", c.max_steps);
  if (c.beam < 1 || c.batch_size < 1 || c.max_steps < 1) throw InvariantError("invalid parser configuration");
  return c;
}

struct GrammarParser::Encoded {
  const SchemaGraph* schema = nullptr;
  Graph::Var memory;             // 2H x n
  Graph::Var h0;
  std::vector<Graph::Var> tables;   // D each
  std::vector<Graph::Var> columns;  // D each, "*" last
  Graph::Var table_matrix;
  Graph::Var column_matrix;
  Graph::Var table_match;   // n x T
  Graph::Var column_match;  // n x (C+1)
  Graph::Var table_features;
  Graph::Var column_features;
};

struct GrammarParser::State {
  nn::Lstm::State lstm;
  Graph::Var context;
  Machine machine;
};

GrammarParser::GrammarParser(ParserConfig cfg, text::Vocabulary words) : cfg_(cfg) {
  nn::Rng rng(cfg_.seed);
  const int e = cfg_.embed_dim;
  const int h = cfg_.hidden_dim;
  const int d = h;
  embed_ = nn::TokenEmbedder(params_, "embed", std::move(words), e, cfg_.trigram_buckets, rng);
  enc_fwd_ = nn::Lstm::create(params_, "enc.fwd", e, h, rng);
  enc_bwd_ = nn::Lstm::create(params_, "enc.bwd", e, h, rng);
  init_ = nn::Linear::create(params_, "init", 2 * h, h, rng);
  column_enc_ = nn::Linear::create(params_, "column", 2 * e + 5 + 2, d, rng);
  table_enc_ = nn::Linear::create(params_, "table", e, d, rng);
  star_ = &params_.add("star", d, 1, 0.1, rng);
  keyword_emb_ = &params_.add("keywords", d, grammar::kNumKeywords + 1, 0.1, rng);
  decoder_ = nn::Lstm::create(params_, "decoder", d + 2 * h + Machine::kNumPhases, h, rng);
  attend_ = &params_.add("attend", 2 * h, h, 1.0 / std::sqrt(static_cast<double>(h)), rng);
  combine_ = nn::Linear::create(params_, "combine", 3 * h, h, rng);
  keyword_out_ = nn::Linear::create(params_, "keyword_out", h, grammar::kNumKeywords, rng);
  table_ptr_ = &params_.add("table_ptr", d, h, 1.0 / std::sqrt(static_cast<double>(h)), rng);
  column_ptr_ = &params_.add("column_ptr", d, h, 1.0 / std::sqrt(static_cast<double>(h)), rng);
  table_feat_ = &params_.add("table_feat", 1 + kTableFeatures, 1, 0.0, rng);
  column_feat_ = &params_.add("column_feat", 1 + kColumnFeatures, 1, 0.0, rng);
}

GrammarParser::Encoded GrammarParser::encode(Graph& g, nn::EmbedCache& cache,
                                             const std::string& question,
                                             const SchemaGraph& schema) const {
  Encoded enc;
  enc.schema = &schema;
  const auto words = question_words(question);
  std::vector<Graph::Var> xs;
  std::vector<std::string> qstems;
  for (const auto& w : words) {
    xs.push_back(cache.word(w));
    qstems.push_back(text::stem(w));
  }
  const nn::BiLstmOutput out = nn::run_bilstm(g, enc_fwd_, enc_bwd_, xs);
  enc.memory = g.hcat(out.states);
  enc.h0 = g.tanh(init_(g, g.vcat({out.last_forward, out.first_backward})));

  std::vector<std::vector<std::string>> table_names;
  for (std::size_t t = 0; t < schema.num_tables(); ++t) {
    const std::string& human = schema.table_human_names()[t];
    table_names.push_back(stems_of(human));
    enc.tables.push_back(g.tanh(table_enc_(g, cache.phrase(human))));
  }
  std::vector<std::vector<std::string>> column_names;
  for (std::size_t j = 0; j < schema.num_columns(); ++j) {
    const Column& c = schema.columns()[j];
    column_names.push_back(stems_of(c.human_name));
    Matrix extra = Matrix::Zero(7, 1);
    extra(static_cast<int>(c.type), 0) = 1.0;
    extra(5, 0) = schema.is_primary_key(static_cast<int>(j)) ? 1.0 : 0.0;
    extra(6, 0) = schema.is_foreign_key(static_cast<int>(j)) ? 1.0 : 0.0;
    const Graph::Var x = g.vcat({cache.phrase(c.human_name),
                                 cache.phrase(schema.table_human_names()[static_cast<std::size_t>(c.table)]),
                                 g.constant(std::move(extra))});
    enc.columns.push_back(g.tanh(column_enc_(g, x)));
  }
  column_names.emplace_back();  // "*"
  enc.columns.push_back(g.param(*star_));
  enc.table_matrix = g.hcat(enc.tables);
  enc.column_matrix = g.hcat(enc.columns);

  const Matches tm = match(qstems, table_names);
  const Matches cm = match(qstems, column_names);
  const auto nt = static_cast<Eigen::Index>(schema.num_tables());
  const auto nc = static_cast<Eigen::Index>(schema.num_columns());
  Matrix tf = Matrix::Zero(nt, kTableFeatures);
  for (Eigen::Index t = 0; t < nt; ++t) {
    tf(t, 0) = tm.full(t);
    tf(t, 1) = tm.fraction(t);
    const auto cols = schema.columns_of(static_cast<int>(t));
    double hits = 0.0;
    for (int c : cols) hits += cm.full(c);
    tf(t, 2) = cols.empty() ? 0.0 : hits / static_cast<double>(cols.size());
  }
  Matrix cf = Matrix::Zero(nc + 1, kColumnFeatures);
  for (Eigen::Index j = 0; j < nc; ++j) {
    const int t = schema.columns()[static_cast<std::size_t>(j)].table;
    cf(j, 0) = cm.full(j);
    cf(j, 1) = cm.fraction(j);
    cf(j, 2) = schema.is_primary_key(static_cast<int>(j)) ? 1.0 : 0.0;
    cf(j, 3) = tm.full(t);
    cf(j, 4) = schema.is_foreign_key(static_cast<int>(j)) ? 1.0 : 0.0;
  }
  cf(nc, 5) = 1.0;
  enc.table_match = g.constant(tm.per_position);
  enc.column_match = g.constant(cm.per_position);
  enc.table_features = g.constant(std::move(tf));
  enc.column_features = g.constant(std::move(cf));
  return enc;
}

Graph::Var GrammarParser::step(Graph& g, const Encoded& enc, State& s,
                               const std::vector<int>& prefix) const {
  const int nt = static_cast<int>(enc.schema->num_tables());
  Graph::Var prev;
  if (prefix.empty()) {
    prev = g.column(*keyword_emb_, grammar::kNumKeywords);
  } else if (prefix.back() < grammar::kNumKeywords) {
    prev = g.column(*keyword_emb_, prefix.back());
  } else if (prefix.back() < grammar::kNumKeywords + nt) {
    prev = enc.tables[static_cast<std::size_t>(prefix.back() - grammar::kNumKeywords)];
  } else {
    prev = enc.columns[static_cast<std::size_t>(prefix.back() - grammar::kNumKeywords - nt)];
  }
  Matrix phase = Matrix::Zero(Machine::kNumPhases, 1);
  phase(static_cast<int>(s.machine.phase()), 0) = 1.0;
  s.lstm = decoder_.step(g, g.vcat({prev, s.context, g.constant(std::move(phase))}), s.lstm);
  const Graph::Var alpha =
      g.softmax(g.matmul_tn(enc.memory, g.matmul(g.param(*attend_), s.lstm.h)));
  s.context = g.matmul(enc.memory, alpha);
  const Graph::Var o = g.tanh(combine_(g, g.vcat({s.lstm.h, s.context})));
  const Graph::Var keywords = keyword_out_(g, o);
  const Graph::Var tables = g.add(
      g.matmul_tn(enc.table_matrix, g.matmul(g.param(*table_ptr_), o)),
      g.matmul(g.hcat({g.matmul_tn(enc.table_match, alpha), enc.table_features}), g.param(*table_feat_)));
  const Graph::Var columns = g.add(
      g.matmul_tn(enc.column_matrix, g.matmul(g.param(*column_ptr_), o)),
      g.matmul(g.hcat({g.matmul_tn(enc.column_match, alpha), enc.column_features}),
               g.param(*column_feat_)));
  return g.vcat({keywords, tables, columns});
}

Graph::Var GrammarParser::loss(Graph& g, const std::string& question, const SchemaGraph& schema,
                               const std::vector<int>& actions) const {
  nn::EmbedCache cache(g, embed_);
  const Encoded enc = encode(g, cache, question, schema);
  State s{{enc.h0, g.constant(Matrix::Zero(cfg_.hidden_dim, 1))},
          g.constant(Matrix::Zero(2 * cfg_.hidden_dim, 1)),
          Machine(schema)};
  std::vector<int> prefix;
  std::vector<Graph::Var> losses;
  for (int a : actions) {
    const std::vector<char> allowed = s.machine.allowed();
    const Graph::Var logits = step(g, enc, s, prefix);
    losses.push_back(g.nll(logits, {a}, allowed));
    s.machine.apply(a);
    prefix.push_back(a);
  }
  if (!s.machine.done()) throw ModelError("training actions do not form a complete query");
  return g.scale(g.mean(losses), static_cast<double>(losses.size()));
}

std::vector<SqlCandidate> GrammarParser::parse(const std::string& question, const SchemaGraph& schema,
                                               int beam) const {
  if (!trained_) throw ModelError("parser is not trained");
  struct Hyp {
    State state;
    std::vector<int> actions;
    double logp;
  };
  Graph g;
  nn::EmbedCache cache(g, embed_);
  const Encoded enc = encode(g, cache, question, schema);
  std::vector<Hyp> alive;
  alive.push_back({State{{enc.h0, g.constant(Matrix::Zero(cfg_.hidden_dim, 1))},
                         g.constant(Matrix::Zero(2 * cfg_.hidden_dim, 1)),
                         Machine(schema)},
                   {},
                   0.0});
  std::vector<Hyp> finished;
  const auto b = static_cast<std::size_t>(beam);
  for (int t = 0; t < cfg_.max_steps && !alive.empty(); ++t) {
    struct Expansion {
      std::size_t parent;
      int action;
      double logp;
      State state;
    };
    std::vector<Expansion> expansions;
    for (std::size_t h = 0; h < alive.size(); ++h) {
      State s = alive[h].state;
      const std::vector<char> allowed = s.machine.allowed();
      const Eigen::VectorXd lp =
          nn::masked_log_softmax(g.value(step(g, enc, s, alive[h].actions)).col(0), allowed);
      std::vector<int> legal;
      for (std::size_t a = 0; a < allowed.size(); ++a) {
        if (allowed[a]) legal.push_back(static_cast<int>(a));
      }
      std::stable_sort(legal.begin(), legal.end(), [&](int x, int y) { return lp(x) > lp(y); });
      if (legal.size() > b) legal.resize(b);
      for (int a : legal) expansions.push_back({h, a, alive[h].logp + lp(a), s});
    }
    std::stable_sort(expansions.begin(), expansions.end(),
                     [](const Expansion& x, const Expansion& y) { return x.logp > y.logp; });
    if (expansions.size() > b) expansions.erase(expansions.begin() + static_cast<std::ptrdiff_t>(b), expansions.end());
    std::vector<Hyp> next;
    for (auto& ex : expansions) {
      Hyp h{ex.state, alive[ex.parent].actions, ex.logp};
      h.state.machine.apply(ex.action);
      h.actions.push_back(ex.action);
      (h.state.machine.done() ? finished : next).push_back(std::move(h));
    }
    alive = std::move(next);
  }
  std::stable_sort(finished.begin(), finished.end(),
                   [](const Hyp& x, const Hyp& y) { return x.logp > y.logp; });
  std::vector<SqlCandidate> out;
  for (const auto& h : finished) out.push_back({grammar::render(h.actions, schema), h.logp});
  return out;
}

nlohmann::json GrammarParser::to_json() const {
  return {{"kind", "parser"},
          {"backend", name()},
          {"config", sqlaug::to_json(cfg_)},
          {"trained", trained_},
          {"words", embed_.vocab().tokens()},
          {"epoch_loss", epoch_loss},
          {"params", params_.to_json()}};
}

GrammarParser GrammarParser::from_json(const nlohmann::json& j) {
  if (j.value("kind", "") != "parser") throw ModelError("not a parser checkpoint");
  text::Vocabulary words;
  for (const auto& t : j.at("words").get<std::vector<std::string>>()) words.add(t);
  GrammarParser m(parser_config_from_json(j.at("config")), std::move(words));
  m.params_.load_json(j.at("params"));
  m.trained_ = j.value("trained", false);
  m.epoch_loss = j.value("epoch_loss", std::vector<double>{});
  return m;
}

void GrammarParser::save(const std::string& path) const { write_file(path, to_json().dump()); }

GrammarParser GrammarParser::load(const std::string& path) {
  try {
    return from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

ParserTrainingSet prepare_parser_data(const std::vector<AnnotatedPair>& examples,
                                      const std::vector<double>& weights,
                                      const std::vector<SchemaGraph>& schemas) {
  if (!weights.empty() && weights.size() != examples.size()) {
    throw InvariantError("prepare_parser_data: weights/examples size mismatch");
  }
  ParserTrainingSet set;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const SchemaGraph& schema = require_schema(schemas, examples[i].db_id);
    auto actions = grammar::linearize(examples[i].sql, schema);
    if (!actions) {
      ++set.skipped;
      continue;
    }
    set.questions.push_back(examples[i].question);
    set.schemas.push_back(&schema);
    set.actions.push_back(std::move(*actions));
    set.weights.push_back(weights.empty() ? 1.0 : weights[i]);
  }
  return set;
}

GrammarParser make_parser(const ParserConfig& cfg, const std::vector<std::string>& questions,
                          const std::vector<const SchemaGraph*>& schemas) {
  std::vector<std::string> phrases;
  for (const auto& q : questions) phrases.push_back(join(question_words(q), " "));
  std::set<std::string> seen;
  for (const SchemaGraph* s : schemas) {
    if (!seen.insert(s->db_id()).second) continue;
    for (const auto& t : s->table_human_names()) phrases.push_back(t);
    for (const auto& c : s->columns()) phrases.push_back(c.human_name);
  }
  return GrammarParser(cfg, nn::build_word_vocab(phrases));
}

void fit_parser(GrammarParser& model, const ParserTrainingSet& data, const ParserConfig& cfg,
                std::uint64_t shuffle_seed) {
  if (data.questions.empty()) throw ModelError("fit_parser: no trainable examples");
  nn::TrainLoopConfig loop;
  loop.epochs = cfg.epochs;
  loop.batch_size = cfg.batch_size;
  loop.seed = shuffle_seed;
  loop.adam.learning_rate = cfg.learning_rate;
  loop.adam.clip_norm = cfg.clip_norm;
  const auto losses = nn::train_weighted(model.params(), data.weights, loop, [&](Graph& g, std::size_t i) {
    return model.loss(g, data.questions[i], *data.schemas[i], data.actions[i]);
  });
  model.epoch_loss.insert(model.epoch_loss.end(), losses.begin(), losses.end());
  model.set_trained(true);
}

GrammarParser train_parser(const std::vector<AnnotatedPair>& examples,
                           const std::vector<SchemaGraph>& schemas, const ParserConfig& cfg) {
  if (examples.empty()) throw ModelError("train_parser: empty training set");
  const ParserTrainingSet data = prepare_parser_data(examples, {}, schemas);
  GrammarParser model = make_parser(cfg, data.questions, data.schemas);
  fit_parser(model, data, cfg, derive_seed(cfg.seed, "parser.shuffle"));
  return model;
}

std::vector<SqlCandidate> parse_beam(const Parser& model, const std::string& question,
                                     const SchemaGraph& schema, int beam) {
  if (beam < 1) throw InvariantError("parse_beam: beam must be >= 1");
  if (!model.trained()) throw ModelError("parse_beam: untrained parser");
  std::vector<SqlCandidate> raw = model.parse(question, schema, beam);
  std::stable_sort(raw.begin(), raw.end(),
                   [](const SqlCandidate& a, const SqlCandidate& b) { return a.score > b.score; });
  std::vector<SqlCandidate> out;
  std::set<std::string> seen;
  for (auto& c : raw) {
    if (!std::isfinite(c.score) || !seen.insert(c.sql).second) continue;
    try {
      const sql::Query q = sql::parse(c.sql);
      for (const auto& t : sql::referenced_tables(q)) {
        if (!schema.find_table(t)) throw ResolutionError("unknown table " + t);
      }
      extract_entity_sequence(c.sql, schema);
    } catch (const Error&) {
      continue;
    }
    out.push_back(std::move(c));
    if (out.size() == static_cast<std::size_t>(beam)) break;
  }
  return out;
}

// ------------------------------------------------------------- execution

ExecEnvironment::ExecEnvironment(std::vector<SchemaGraph> schemas, double timeout_seconds)
    : schemas_(std::move(schemas)), timeout_(timeout_seconds) {}

ExecEnvironment::~ExecEnvironment() {
  for (auto& [id, db] : dbs_) {
    if (db->conn) sqlite3_close(db->conn);
  }
}

void ExecEnvironment::add_database(const std::string& db_id, const std::string& path) {
  if (!std::filesystem::exists(path)) throw Error("database file not found: " + path);
  std::lock_guard<std::mutex> lock(registry_mu_);
  auto db = std::make_unique<Database>();
  db->path = path;
  dbs_[db_id] = std::move(db);
}

void ExecEnvironment::add_directory(const std::string& dir) {
  namespace fs = std::filesystem;
  for (const auto& s : schemas_) {
    for (const fs::path& p : {fs::path(dir) / s.db_id() / (s.db_id() + ".sqlite"),
                              fs::path(dir) / (s.db_id() + ".sqlite")}) {
      if (fs::exists(p)) {
        add_database(s.db_id(), p.string());
        break;
      }
    }
  }
}

bool ExecEnvironment::has_database(const std::string& db_id) const {
  std::lock_guard<std::mutex> lock(registry_mu_);
  return dbs_.count(db_id) > 0;
}

const SchemaGraph* ExecEnvironment::schema(const std::string& db_id) const {
  return find_schema(schemas_, db_id);
}

std::string ExecEnvironment::execute(const std::string& db_id, const std::string& sql_text) {
  Database* db = nullptr;
  {
    std::lock_guard<std::mutex> lock(registry_mu_);
    auto it = dbs_.find(db_id);
    if (it == dbs_.end()) return "no database for " + db_id;
    db = it->second.get();
  }
  std::lock_guard<std::mutex> lock(db->mu);
  if (!db->conn) {
    if (sqlite3_open_v2(db->path.c_str(), &db->conn, SQLITE_OPEN_READONLY, nullptr) != SQLITE_OK) {
      const std::string msg = sqlite3_errmsg(db->conn);
      sqlite3_close(db->conn);
      db->conn = nullptr;
      return msg;
    }
  }
  using Clock = std::chrono::steady_clock;
  const auto deadline =
      Clock::now() + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(timeout_));
  sqlite3_progress_handler(
      db->conn, 1000,
      [](void* p) -> int { return Clock::now() > *static_cast<const Clock::time_point*>(p) ? 1 : 0; },
      const_cast<Clock::time_point*>(&deadline));
  sqlite3_stmt* stmt = nullptr;
  const char* tail = nullptr;
  std::string error;
  if (sqlite3_prepare_v2(db->conn, sql_text.c_str(), -1, &stmt, &tail) != SQLITE_OK) {
    error = sqlite3_errmsg(db->conn);
  } else if (!stmt) {
    error = "empty statement";
  } else if (tail && !trim(tail).empty() && trim(tail) != ";") {
    error = "multiple statements";
  } else if (!sqlite3_stmt_readonly(stmt)) {
    error = "statement is not read-only";
  } else {
    int rc;
    while ((rc = sqlite3_step(stmt)) == SQLITE_ROW) {
    }
    if (rc != SQLITE_DONE) error = rc == SQLITE_INTERRUPT ? "timeout" : sqlite3_errmsg(db->conn);
  }
  sqlite3_finalize(stmt);
  sqlite3_progress_handler(db->conn, 0, nullptr, nullptr);
  return error;
}

bool check_executable(const std::string& sql_text, ExecEnvironment& env, const std::string& db_id) {
  if (env.has_database(db_id)) return env.execute(db_id, sql_text).empty();
  const SchemaGraph* schema = env.schema(db_id);
  if (!schema) return false;
  try {
    const sql::Query q = sql::parse(sql_text);
    for (const auto& t : sql::referenced_tables(q)) {
      if (!schema->find_table(t)) return false;
    }
    extract_entity_sequence(sql_text, *schema);
  } catch (const Error&) {
    return false;
  }
  return true;
}

std::vector<LabeledQuestion> pred(const Parser& model, const std::vector<std::string>& questions,
                                  const SchemaGraph& schema, ExecEnvironment& env, int beam) {
  std::vector<LabeledQuestion> out;
  for (const auto& q : questions) {
    for (const auto& c : parse_beam(model, q, schema, beam)) {
      if (check_executable(c.sql, env, schema.db_id())) {
        out.push_back({q, c.sql, c.score});
        break;
      }
    }
  }
  return out;
}

std::string canonical_sql(const std::string& sql_text) {
  try {
    sql::Query q = sql::parse(sql_text);
    sql::resolve_aliases(q);
    sql::PrintOptions o;
    o.lowercase = true;
    o.mask_values = true;
    o.drop_aliases = true;
    o.sort_conjuncts = true;
    o.explicit_asc = true;
    return sql::to_string(q, o);
  } catch (const SqlError&) {
    return join(split_whitespace(to_lower(sql_text)), " ");
  }
}

bool exact_match(const std::string& predicted, const std::string& gold) {
  return canonical_sql(predicted) == canonical_sql(gold);
}

}  // namespace sqlaug
