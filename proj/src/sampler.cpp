#include "sqlaug/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace sqlaug {

using nn::Graph;
using nn::Matrix;

namespace {

constexpr int kTypes = 5;
constexpr int kRelations = 3;

double uniform01(nn::Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

int draw(const Eigen::VectorXd& probs, nn::Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  int last = -1;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (probs(i) <= 0.0) continue;
    acc += probs(i);
    last = static_cast<int>(i);
    if (u < acc) return last;
  }
  return last;
}

}  // namespace

nlohmann::json to_json(const SamplerTrainConfig& c) {
  return {{"learning_rate", c.learning_rate}, {"epochs", c.epochs},
          {"batch_size", c.batch_size},       {"teacher_forcing", c.teacher_forcing},
          {"seed", c.seed},                   {"max_length", c.max_length},
          {"embed_dim", c.embed_dim},         {"hidden_dim", c.hidden_dim},
          {"trigram_buckets", c.trigram_buckets}};
}

SamplerTrainConfig sampler_config_from_json(const nlohmann::json& j) {
  SamplerTrainConfig c;
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.teacher_forcing = j.value("teacher_forcing", c.teacher_forcing);
  c.seed = j.value("seed", c.seed);
  c.max_length = j.value("max_length", c.max_length);
  c.embed_dim = j.value("embed_dim", c.embed_dim);
  c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
  c.trigram_buckets = j.value("trigram_buckets", c.trigram_buckets);
  if (c.max_length < 1) throw InvariantError("sampler max_length must be >= 1");
  if (!c.teacher_forcing) throw InvariantError("sampler training requires teacher forcing");
  return c;
}

struct SamplerModel::Encoded {
  Graph::Var candidates;  // D x (k+1), <EOS> last
  std::vector<Graph::Var> columns;
  nn::Lstm::State init;
};

SamplerModel::SamplerModel(SamplerTrainConfig cfg, text::Vocabulary vocab) : cfg_(cfg) {
  nn::Rng rng(cfg_.seed);
  const int e = cfg_.embed_dim;
  const int d = cfg_.hidden_dim;
  embed_ = nn::TokenEmbedder(params_, "embed", std::move(vocab), e, cfg_.trigram_buckets, rng);
  column_enc_ = nn::Linear::create(params_, "column", 2 * e + kTypes + 2, d, rng);
  init_ = nn::Linear::create(params_, "init", d + e, d, rng);
  decoder_ = nn::Lstm::create(params_, "decoder", d, d, rng);
  start_ = &params_.add("start", d, 1, 0.1, rng);
  eos_ = &params_.add("eos", d, 1, 0.1, rng);
  pointer_ = &params_.add("pointer", d, d, 1.0 / std::sqrt(static_cast<double>(d)), rng);
  relation_ = &params_.add("relation", kRelations, 1, 0.0, rng);
}

SamplerModel::Encoded SamplerModel::encode(Graph& g, nn::EmbedCache& cache,
                                           const SchemaGraph& schema) const {
  if (schema.num_columns() == 0) throw InvariantError("schema " + schema.db_id() + " has no columns");
  Encoded enc;
  for (std::size_t j = 0; j < schema.num_columns(); ++j) {
    const Column& c = schema.columns()[j];
    Matrix extra = Matrix::Zero(kTypes + 2, 1);
    extra(static_cast<int>(c.type), 0) = 1.0;
    extra(kTypes, 0) = schema.is_primary_key(static_cast<int>(j)) ? 1.0 : 0.0;
    extra(kTypes + 1, 0) = schema.is_foreign_key(static_cast<int>(j)) ? 1.0 : 0.0;
    const Graph::Var x =
        g.vcat({cache.phrase(c.human_name),
                cache.phrase(schema.table_human_names()[static_cast<std::size_t>(c.table)]),
                g.constant(std::move(extra))});
    enc.columns.push_back(g.tanh(column_enc_(g, x)));
  }
  std::vector<Graph::Var> cands = enc.columns;
  cands.push_back(g.param(*eos_));
  enc.candidates = g.hcat(cands);
  const Graph::Var h0 =
      g.tanh(init_(g, g.vcat({g.mean(enc.columns), cache.phrase(human_name(schema.db_id()))})));
  enc.init = {h0, g.constant(Matrix::Zero(cfg_.hidden_dim, 1))};
  return enc;
}

Graph::Var SamplerModel::logits(Graph& g, const Encoded& enc, const SchemaGraph& schema,
                                const nn::Lstm::State& state,
                                const std::vector<int>& chosen) const {
  const auto k = static_cast<int>(schema.num_columns());
  const Graph::Var query = g.matmul(g.param(*pointer_), state.h);
  const Graph::Var scores = g.matmul_tn(enc.candidates, query);
  if (chosen.empty()) return scores;
  std::set<int> tables;
  for (int c : chosen) tables.insert(schema.columns()[static_cast<std::size_t>(c)].table);
  const int last_table = schema.columns()[static_cast<std::size_t>(chosen.back())].table;
  Matrix rel = Matrix::Zero(k + 1, kRelations);
  for (int j = 0; j < k; ++j) {
    const int t = schema.columns()[static_cast<std::size_t>(j)].table;
    rel(j, 0) = t == last_table ? 1.0 : 0.0;
    rel(j, 1) = tables.count(t) ? 1.0 : 0.0;
    for (const auto& [a, b] : schema.foreign_keys()) {
      const bool linked = (a == j && std::count(chosen.begin(), chosen.end(), b)) ||
                          (b == j && std::count(chosen.begin(), chosen.end(), a));
      if (linked) rel(j, 2) = 1.0;
    }
  }
  return g.add(scores, g.matmul(g.constant(std::move(rel)), g.param(*relation_)));
}

Graph::Var SamplerModel::sequence_loss(Graph& g, const SchemaGraph& schema,
                                       const std::vector<int>& columns, bool terminated) const {
  nn::EmbedCache cache(g, embed_);
  const Encoded enc = encode(g, cache, schema);
  const auto k = static_cast<int>(schema.num_columns());
  nn::Lstm::State state = enc.init;
  Graph::Var input = g.param(*start_);
  std::vector<int> chosen;
  std::vector<Graph::Var> losses;
  std::vector<char> allowed(static_cast<std::size_t>(k + 1), 1);
  const std::size_t steps = columns.size() + (terminated ? 1 : 0);
  for (std::size_t t = 0; t < steps; ++t) {
    state = decoder_.step(g, input, state);
    const int target = t < columns.size() ? columns[t] : k;
    losses.push_back(g.nll(logits(g, enc, schema, state, chosen), {target}, allowed));
    if (target == k) break;
    chosen.push_back(target);
    allowed[static_cast<std::size_t>(target)] = 0;
    input = enc.columns[static_cast<std::size_t>(target)];
  }
  if (losses.empty()) return g.constant(Matrix::Zero(1, 1));
  return g.scale(g.mean(losses), static_cast<double>(losses.size()));
}

std::vector<Eigen::VectorXd> SamplerModel::step_distributions(const SchemaGraph& schema,
                                                              const std::vector<int>& columns,
                                                              bool terminated) const {
  Graph g;
  nn::EmbedCache cache(g, embed_);
  const Encoded enc = encode(g, cache, schema);
  const auto k = static_cast<int>(schema.num_columns());
  nn::Lstm::State state = enc.init;
  Graph::Var input = g.param(*start_);
  std::vector<int> chosen;
  std::vector<char> allowed(static_cast<std::size_t>(k + 1), 1);
  std::vector<Eigen::VectorXd> out;
  const std::size_t steps = columns.size() + (terminated ? 1 : 0);
  for (std::size_t t = 0; t < steps; ++t) {
    state = decoder_.step(g, input, state);
    const Eigen::VectorXd lp =
        nn::masked_log_softmax(g.value(logits(g, enc, schema, state, chosen)).col(0), allowed);
    out.push_back(lp.unaryExpr([](double v) { return std::exp(v); }));
    if (t >= columns.size()) break;
    chosen.push_back(columns[t]);
    allowed[static_cast<std::size_t>(columns[t])] = 0;
    input = enc.columns[static_cast<std::size_t>(columns[t])];
  }
  return out;
}

std::vector<int> SamplerModel::decode(const SchemaGraph& schema, double temperature, nn::Rng& rng,
                                      bool* terminated) const {
  const auto k = static_cast<int>(schema.num_columns());
  const bool greedy = temperature <= 1e-6;
  for (int attempt = 0;; ++attempt) {
    Graph g;
    nn::EmbedCache cache(g, embed_);
    const Encoded enc = encode(g, cache, schema);
    nn::Lstm::State state = enc.init;
    Graph::Var input = g.param(*start_);
    std::vector<int> chosen;
    std::vector<char> allowed(static_cast<std::size_t>(k + 1), 1);
    if (attempt >= 100) allowed[static_cast<std::size_t>(k)] = 0;
    bool done = false;
    while (static_cast<int>(chosen.size()) < cfg_.max_length) {
      state = decoder_.step(g, input, state);
      Eigen::VectorXd z = g.value(logits(g, enc, schema, state, chosen)).col(0);
      if (!greedy) z /= temperature;
      const Eigen::VectorXd lp = nn::masked_log_softmax(z, allowed);
      int pick = 0;
      if (greedy) {
        lp.maxCoeff(&pick);
      } else {
        pick = draw(lp.unaryExpr([](double v) { return std::exp(v); }), rng);
      }
      if (pick == k) {
        done = true;
        break;
      }
      chosen.push_back(pick);
      allowed[static_cast<std::size_t>(pick)] = 0;
      allowed[static_cast<std::size_t>(k)] = 1;
      input = enc.columns[static_cast<std::size_t>(pick)];
    }
    if (!chosen.empty()) {
      *terminated = done;
      return chosen;
    }
    if (greedy) {
      // Greedy decoding is deterministic, so redrawing cannot help.
      attempt = 99;
    }
  }
}

nlohmann::json SamplerModel::to_json() const {
  return {{"kind", "entity_sampler"},
          {"config", sqlaug::to_json(cfg_)},
          {"trained", trained_},
          {"vocab", embed_.vocab().tokens()},
          {"initial_nll", initial_nll},
          {"epoch_nll", epoch_nll},
          {"params", params_.to_json()}};
}

SamplerModel SamplerModel::from_json(const nlohmann::json& j) {
  if (j.value("kind", "") != "entity_sampler") throw ModelError("not an entity sampler checkpoint");
  text::Vocabulary vocab;
  for (const auto& t : j.at("vocab").get<std::vector<std::string>>()) vocab.add(t);
  SamplerModel m(sampler_config_from_json(j.at("config")), std::move(vocab));
  m.params_.load_json(j.at("params"));
  m.trained_ = j.value("trained", false);
  m.initial_nll = j.value("initial_nll", 0.0);
  m.epoch_nll = j.value("epoch_nll", std::vector<double>{});
  return m;
}

void SamplerModel::save(const std::string& path) const { write_file(path, to_json().dump()); }

SamplerModel SamplerModel::load(const std::string& path) {
  try {
    return from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::vector<int> resolve_entities(const SchemaGraph& schema, const EntitySequence& seq) {
  std::vector<int> cols;
  std::set<int> seen;
  for (const auto& e : seq.entities) {
    const auto idx = schema.find_entity(e);
    if (!idx) throw ResolutionError("entity " + e.to_string() + " not in schema " + schema.db_id());
    if (!seen.insert(*idx).second) {
      throw InvariantError("duplicate entity " + e.to_string() + " in sequence");
    }
    cols.push_back(*idx);
  }
  return cols;
}

SamplerModel train_sampler(const std::vector<SchemaGraph>& schemas,
                           const std::vector<EntitySequence>& sequences,
                           const SamplerTrainConfig& cfg) {
  struct Item {
    const SchemaGraph* schema;
    std::vector<int> columns;
    bool terminated;
  };
  std::vector<Item> items;
  std::set<std::string> used;
  for (const auto& seq : sequences) {
    const SchemaGraph& schema = require_schema(schemas, seq.db_name);
    std::vector<int> cols = resolve_entities(schema, seq);
    if (cols.empty()) continue;
    bool terminated = seq.terminated;
    if (static_cast<int>(cols.size()) > cfg.max_length) {
      cols.resize(static_cast<std::size_t>(cfg.max_length));
      terminated = false;
    }
    used.insert(schema.db_id());
    items.push_back({&schema, std::move(cols), terminated});
  }
  if (items.empty()) throw ModelError("train_sampler: no non-empty training sequences");

  std::vector<std::string> phrases;
  for (const auto& s : schemas) {
    if (!used.count(s.db_id())) continue;
    phrases.push_back(human_name(s.db_id()));
    for (const auto& t : s.table_human_names()) phrases.push_back(t);
    for (const auto& c : s.columns()) phrases.push_back(c.human_name);
  }
  SamplerModel model(cfg, nn::build_word_vocab(phrases));

  const std::vector<double> weights(items.size(), 1.0);
  auto loss = [&](Graph& g, std::size_t i) {
    return model.sequence_loss(g, *items[i].schema, items[i].columns, items[i].terminated);
  };
  model.initial_nll = nn::evaluate_weighted(weights, loss);
  nn::TrainLoopConfig loop;
  loop.epochs = cfg.epochs;
  loop.batch_size = cfg.batch_size;
  loop.seed = derive_seed(cfg.seed, "sampler.shuffle");
  loop.adam.learning_rate = cfg.learning_rate;
  model.epoch_nll = nn::train_weighted(model.params(), weights, loop, loss);
  model.set_trained(true);
  return model;
}

std::vector<EntitySequence> sample_entities(const SamplerModel& model, const SchemaGraph& schema,
                                            int n, double temperature, std::uint64_t seed) {
  if (!model.trained()) throw ModelError("sample_entities: untrained sampler");
  if (n < 1) throw InvariantError("sample_entities: n must be >= 1");
  if (temperature < 0.0) throw InvariantError("sample_entities: negative temperature");
  if (schema.num_columns() == 0) throw InvariantError("schema " + schema.db_id() + " has no columns");
  nn::Rng rng(seed);
  std::vector<EntitySequence> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    EntitySequence seq;
    seq.db_name = schema.db_id();
    for (int c : model.decode(schema, temperature, rng, &seq.terminated)) {
      seq.entities.push_back(schema.entity(c));
    }
    out.push_back(std::move(seq));
  }
  return out;
}

double sequence_log_prob(const SamplerModel& model, const SchemaGraph& schema,
                         const EntitySequence& seq) {
  const std::vector<int> cols = resolve_entities(schema, seq);
  const auto dists = model.step_distributions(schema, cols, seq.terminated);
  const auto k = static_cast<int>(schema.num_columns());
  double lp = 0.0;
  for (std::size_t t = 0; t < dists.size(); ++t) {
    const int target = t < cols.size() ? cols[t] : k;
    lp += std::log(dists[t](target));
  }
  return lp;
}

LengthDistribution empirical_length_distribution(const std::vector<EntitySequence>& sequences) {
  LengthDistribution d;
  for (const auto& s : sequences) {
    if (s.entities.empty()) continue;
    if (d.size() <= s.entities.size()) d.resize(s.entities.size() + 1, 0.0);
    d[s.entities.size()] += 1.0;
  }
  if (d.empty()) throw InvariantError("empirical_length_distribution: no non-empty sequences");
  return d;
}

std::vector<EntitySequence> sample_random_entities(const SchemaGraph& schema, int n,
                                                   const LengthDistribution& lengths,
                                                   std::uint64_t seed) {
  const auto k = schema.num_columns();
  if (k == 0) throw InvariantError("schema " + schema.db_id() + " has no columns");
  double total = 0.0;
  for (std::size_t len = 1; len < lengths.size(); ++len) {
    if (lengths[len] < 0.0) throw InvariantError("negative length weight");
    if (lengths[len] > 0.0 && len > k) {
      throw InvariantError("requested length " + std::to_string(len) + " exceeds the " +
                           std::to_string(k) + " columns of " + schema.db_id());
    }
    total += lengths[len];
  }
  if (total <= 0.0) throw InvariantError("length distribution has no mass");
  Eigen::VectorXd probs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(lengths.size()));
  for (std::size_t len = 1; len < lengths.size(); ++len) {
    probs(static_cast<Eigen::Index>(len)) = lengths[len] / total;
  }
  nn::Rng rng(seed);
  std::vector<EntitySequence> out;
  for (int i = 0; i < n; ++i) {
    const auto len = static_cast<std::size_t>(draw(probs, rng));
    std::vector<int> pool(k);
    std::iota(pool.begin(), pool.end(), 0);
    EntitySequence seq;
    seq.db_name = schema.db_id();
    for (std::size_t t = 0; t < len; ++t) {
      const std::size_t j = t + static_cast<std::size_t>(rng() % (k - t));
      std::swap(pool[t], pool[j]);
      seq.entities.push_back(schema.entity(pool[t]));
    }
    out.push_back(std::move(seq));
  }
  return out;
}

}  // namespace sqlaug
