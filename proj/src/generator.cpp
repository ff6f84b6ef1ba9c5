#include "sqlaug/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "sqlaug/common.hpp"
#include "sqlaug/text.hpp"

namespace sqlaug {

using nn::Graph;
using nn::Matrix;

namespace {

constexpr int kOutUnk = 0;
constexpr int kOutEos = 1;

text::Vocabulary output_vocab_base() {
  text::Vocabulary v;
  v.add(kEosToken);
  return v;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

double length_normalized(double logp, std::size_t len, double penalty) {
  return logp / std::pow(static_cast<double>(std::max<std::size_t>(len, 1)), penalty);
}

}  // namespace

nlohmann::json to_json(const GeneratorTrainConfig& c) {
  return {{"learning_rate", c.learning_rate},
          {"batch_size", c.batch_size},
          {"epochs", c.epochs},
          {"clip_norm", c.clip_norm},
          {"warmup_steps", c.warmup_steps},
          {"seed", c.seed},
          {"embed_dim", c.embed_dim},
          {"hidden_dim", c.hidden_dim},
          {"trigram_buckets", c.trigram_buckets},
          {"max_output_length", c.max_output_length},
          {"length_penalty", c.length_penalty}};
}

GeneratorTrainConfig generator_config_from_json(const nlohmann::json& j) {
  GeneratorTrainConfig c;
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.epochs = j.value("epochs", c.epochs);
  c.clip_norm = j.value("clip_norm", c.clip_norm);
  c.warmup_steps = j.value("warmup_steps", c.warmup_steps);
  c.seed = j.value("seed", c.seed);
  c.embed_dim = j.value("embed_dim", c.embed_dim);
  c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
  c.trigram_buckets = j.value("trigram_buckets", c.trigram_buckets);
  c.max_output_length = j.value("max_output_length", c.max_output_length);
  c.length_penalty = j.value("length_penalty", c.length_penalty);
  if (c.learning_rate <= 0.0 || c.batch_size < 1 || c.epochs < 0 || c.max_output_length < 1) {
    throw InvariantError("invalid generator configuration");
  }
  return c;
}

struct Seq2SeqGenerator::Encoded {
  std::vector<std::string> src;
  Graph::Var memory;  // 2H x n
  Graph::Var h0;
};

struct Seq2SeqGenerator::DecoderState {
  nn::Lstm::State lstm;
  Graph::Var context;
};

Seq2SeqGenerator::Seq2SeqGenerator(GeneratorTrainConfig cfg, text::Vocabulary words,
                                   text::Vocabulary outputs)
    : cfg_(cfg), outputs_(std::move(outputs)) {
  if (outputs_.size() < 2 || outputs_.token(kOutEos) != kEosToken) {
    throw ModelError("output vocabulary must start with <unk>, <eos>");
  }
  nn::Rng rng(cfg_.seed);
  const int e = cfg_.embed_dim;
  const int h = cfg_.hidden_dim;
  embed_ = nn::TokenEmbedder(params_, "embed", std::move(words), e, cfg_.trigram_buckets, rng);
  enc_fwd_ = nn::Lstm::create(params_, "enc.fwd", e, h, rng);
  enc_bwd_ = nn::Lstm::create(params_, "enc.bwd", e, h, rng);
  init_ = nn::Linear::create(params_, "init", 2 * h, h, rng);
  decoder_ = nn::Lstm::create(params_, "decoder", e + 2 * h, h, rng);
  attend_ = &params_.add("attend", 2 * h, h, 1.0 / std::sqrt(static_cast<double>(h)), rng);
  combine_ = nn::Linear::create(params_, "combine", 3 * h, h, rng);
  vocab_out_ = nn::Linear::create(params_, "vocab", h, outputs_.size(), rng);
  copy_ = &params_.add("copy", 2 * h, h, 1.0 / std::sqrt(static_cast<double>(h)), rng);
}

Seq2SeqGenerator::Encoded Seq2SeqGenerator::encode(Graph& g, nn::EmbedCache& cache,
                                                   const std::vector<std::string>& src) const {
  if (src.empty()) throw ModelError("generator input is empty");
  Encoded enc;
  enc.src = src;
  std::vector<Graph::Var> xs;
  xs.reserve(src.size());
  for (const auto& w : src) xs.push_back(cache.word(w));
  const nn::BiLstmOutput out = nn::run_bilstm(g, enc_fwd_, enc_bwd_, xs);
  enc.memory = g.hcat(out.states);
  enc.h0 = g.tanh(init_(g, g.vcat({out.last_forward, out.first_backward})));
  return enc;
}

Seq2SeqGenerator::DecoderState Seq2SeqGenerator::start(Graph& g, nn::EmbedCache&,
                                                       const Encoded& enc) const {
  DecoderState s;
  s.lstm = {enc.h0, g.constant(Matrix::Zero(cfg_.hidden_dim, 1))};
  s.context = g.constant(Matrix::Zero(2 * cfg_.hidden_dim, 1));
  return s;
}

Graph::Var Seq2SeqGenerator::step(Graph& g, nn::EmbedCache& cache, const Encoded& enc,
                                  DecoderState& s, const std::string& prev) const {
  s.lstm = decoder_.step(g, g.vcat({cache.word(prev), s.context}), s.lstm);
  const Graph::Var scores = g.matmul_tn(enc.memory, g.matmul(g.param(*attend_), s.lstm.h));
  s.context = g.matmul(enc.memory, g.softmax(scores));
  const Graph::Var o = g.tanh(combine_(g, g.vcat({s.lstm.h, s.context})));
  const Graph::Var copy = g.matmul_tn(enc.memory, g.matmul(g.param(*copy_), o));
  return g.vcat({vocab_out_(g, o), copy});
}

std::vector<std::pair<std::string, double>> Seq2SeqGenerator::token_log_probs(
    const Graph& g, Graph::Var logits, const Encoded& enc) const {
  std::vector<char> allowed(static_cast<std::size_t>(g.value(logits).rows()), 1);
  allowed[kOutUnk] = 0;
  const Eigen::VectorXd lp = nn::masked_log_softmax(g.value(logits).col(0), allowed);
  std::map<std::string, double> merged;
  const int v = outputs_.size();
  for (int i = 1; i < v; ++i) merged[outputs_.token(i)] += std::exp(lp(i));
  for (std::size_t i = 0; i < enc.src.size(); ++i) {
    merged[enc.src[i]] += std::exp(lp(v + static_cast<int>(i)));
  }
  std::vector<std::pair<std::string, double>> out;
  out.reserve(merged.size());
  for (const auto& [tok, p] : merged) {
    if (p > 0.0) out.emplace_back(tok, std::log(p));
  }
  return out;
}

Graph::Var Seq2SeqGenerator::loss(Graph& g, const GeneratorPair& pair) const {
  nn::EmbedCache cache(g, embed_);
  const Encoded enc = encode(g, cache, split_whitespace(pair.input));
  DecoderState s = start(g, cache, enc);
  std::vector<std::string> tgt = text::tokenize(pair.question);
  tgt.push_back(kEosToken);
  std::string prev = kBosToken;
  std::vector<Graph::Var> losses;
  const int v = outputs_.size();
  for (const auto& tok : tgt) {
    const Graph::Var logits = step(g, cache, enc, s, prev);
    std::vector<int> targets;
    const int id = outputs_.id(tok);
    if (id != kOutUnk) targets.push_back(id);
    for (std::size_t i = 0; i < enc.src.size(); ++i) {
      if (enc.src[i] == tok) targets.push_back(v + static_cast<int>(i));
    }
    if (targets.empty()) targets.push_back(kOutUnk);
    losses.push_back(g.nll(logits, targets));
    prev = tok;
  }
  return g.scale(g.mean(losses), static_cast<double>(losses.size()));
}

std::string Seq2SeqGenerator::greedy_decode(const std::string& input) const {
  if (!trained_) throw ModelError("generator is not trained");
  Graph g;
  nn::EmbedCache cache(g, embed_);
  const Encoded enc = encode(g, cache, split_whitespace(input));
  DecoderState s = start(g, cache, enc);
  std::vector<std::string> out;
  std::string prev = kBosToken;
  for (int t = 0; t < cfg_.max_output_length; ++t) {
    const auto lps = token_log_probs(g, step(g, cache, enc, s, prev), enc);
    const auto best = std::max_element(lps.begin(), lps.end(), [](const auto& a, const auto& b) {
      return a.second < b.second || (a.second == b.second && a.first > b.first);
    });
    if (best->first == kEosToken) break;
    out.push_back(best->first);
    prev = best->first;
  }
  return text::detokenize(out);
}

std::vector<QuestionCandidate> Seq2SeqGenerator::generate(const std::string& input,
                                                          int beam_size) const {
  if (!trained_) throw ModelError("generator is not trained");
  struct Hyp {
    DecoderState state;
    std::vector<std::string> tokens;
    double logp = 0.0;
  };
  Graph g;
  nn::EmbedCache cache(g, embed_);
  const Encoded enc = encode(g, cache, split_whitespace(input));
  std::vector<Hyp> alive = {{start(g, cache, enc), {}, 0.0}};
  std::vector<QuestionCandidate> finished;
  const auto b = static_cast<std::size_t>(beam_size);
  for (int t = 0; t < cfg_.max_output_length && !alive.empty(); ++t) {
    struct Expansion {
      std::size_t parent;
      std::string token;
      double logp;
      DecoderState state;
    };
    std::vector<Expansion> expansions;
    for (std::size_t h = 0; h < alive.size(); ++h) {
      DecoderState s = alive[h].state;
      const std::string prev = alive[h].tokens.empty() ? kBosToken : alive[h].tokens.back();
      auto lps = token_log_probs(g, step(g, cache, enc, s, prev), enc);
      std::sort(lps.begin(), lps.end(), [](const auto& x, const auto& y) {
        return x.second > y.second || (x.second == y.second && x.first < y.first);
      });
      if (lps.size() > b) lps.resize(b);
      for (auto& [tok, lp] : lps) expansions.push_back({h, tok, alive[h].logp + lp, s});
    }
    std::stable_sort(expansions.begin(), expansions.end(),
                     [](const Expansion& x, const Expansion& y) { return x.logp > y.logp; });
    if (expansions.size() > b) expansions.resize(b);
    std::vector<Hyp> next;
    for (auto& ex : expansions) {
      std::vector<std::string> toks = alive[ex.parent].tokens;
      if (ex.token == kEosToken) {
        finished.push_back({text::detokenize(toks),
                            length_normalized(ex.logp, toks.size() + 1, cfg_.length_penalty)});
        continue;
      }
      toks.push_back(ex.token);
      next.push_back({ex.state, std::move(toks), ex.logp});
    }
    alive = std::move(next);
  }
  for (const auto& h : alive) {
    finished.push_back(
        {text::detokenize(h.tokens), length_normalized(h.logp, h.tokens.size(), cfg_.length_penalty)});
  }
  return finished;
}

nlohmann::json Seq2SeqGenerator::to_json() const {
  return {{"kind", "question_generator"},
          {"backend", name()},
          {"config", sqlaug::to_json(cfg_)},
          {"trained", trained_},
          {"words", embed_.vocab().tokens()},
          {"outputs", outputs_.tokens()},
          {"initial_loss", initial_loss},
          {"epoch_loss", epoch_loss},
          {"params", params_.to_json()}};
}

Seq2SeqGenerator Seq2SeqGenerator::from_json(const nlohmann::json& j) {
  if (j.value("kind", "") != "question_generator") {
    throw ModelError("not a question generator checkpoint");
  }
  text::Vocabulary words;
  for (const auto& t : j.at("words").get<std::vector<std::string>>()) words.add(t);
  text::Vocabulary outputs;
  for (const auto& t : j.at("outputs").get<std::vector<std::string>>()) outputs.add(t);
  Seq2SeqGenerator m(generator_config_from_json(j.at("config")), std::move(words), std::move(outputs));
  m.params_.load_json(j.at("params"));
  m.trained_ = j.value("trained", false);
  m.initial_loss = j.value("initial_loss", 0.0);
  m.epoch_loss = j.value("epoch_loss", std::vector<double>{});
  return m;
}

void Seq2SeqGenerator::save(const std::string& path) const { write_file(path, to_json().dump()); }

Seq2SeqGenerator Seq2SeqGenerator::load(const std::string& path) {
  try {
    return from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

Seq2SeqGenerator train_generator(const std::vector<GeneratorPair>& pairs,
                                 const GeneratorTrainConfig& cfg) {
  if (pairs.empty()) throw ModelError("train_generator: empty corpus");
  std::vector<std::string> phrases = {kBosToken};
  text::Vocabulary outputs = output_vocab_base();
  for (const auto& p : pairs) {
    if (trim(p.input).empty() || trim(p.question).empty()) {
      throw InvariantError("train_generator: empty input or question");
    }
    phrases.push_back(p.input);
    const auto toks = text::tokenize(p.question);
    phrases.push_back(join(toks, " "));
    for (const auto& t : toks) outputs.add(t);
  }
  Seq2SeqGenerator model(cfg, nn::build_word_vocab(phrases), std::move(outputs));
  const std::vector<double> weights(pairs.size(), 1.0);
  auto loss = [&](Graph& g, std::size_t i) { return model.loss(g, pairs[i]); };
  model.initial_loss = nn::evaluate_weighted(weights, loss);
  nn::TrainLoopConfig loop;
  loop.epochs = cfg.epochs;
  loop.batch_size = cfg.batch_size;
  loop.seed = derive_seed(cfg.seed, "generator.shuffle");
  loop.adam.learning_rate = cfg.learning_rate;
  loop.adam.clip_norm = cfg.clip_norm;
  loop.adam.warmup_steps = cfg.warmup_steps;
  model.epoch_loss = nn::train_weighted(model.params(), weights, loop, loss);
  model.set_trained(true);
  return model;
}

std::vector<QuestionCandidate> generate_questions(const GeneratorBackend& model,
                                                  const std::string& input, int beam_size) {
  if (beam_size < 1) throw InvariantError("generate_questions: beam_size must be >= 1");
  if (!model.trained()) throw ModelError("generate_questions: untrained generator");
  std::vector<QuestionCandidate> raw = model.generate(input, beam_size);
  std::stable_sort(raw.begin(), raw.end(), [](const QuestionCandidate& a, const QuestionCandidate& b) {
    return a.score > b.score || (a.score == b.score && a.question < b.question);
  });
  std::vector<QuestionCandidate> out;
  std::set<std::string> seen;
  for (auto& c : raw) {
    if (!std::isfinite(c.score)) continue;
    c.question = trim(c.question);
    if (c.question.empty() || !seen.insert(c.question).second) continue;
    out.push_back(std::move(c));
    if (out.size() == static_cast<std::size_t>(beam_size)) break;
  }
  return out;
}

std::vector<GeneratorPair> load_generator_corpus(const std::string& path) {
  const std::string body = read_file(path);
  std::vector<GeneratorPair> out;
  if (ends_with(path, ".tsv")) {
    std::istringstream in(body);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (trim(line).empty()) continue;
      const auto tab = line.find('\t');
      if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
        throw ParseError(path + ":" + std::to_string(lineno) + ": expected input<TAB>question");
      }
      out.push_back({line.substr(0, tab), line.substr(tab + 1)});
    }
    return out;
  }
  try {
    const auto j = nlohmann::json::parse(body);
    for (std::size_t i = 0; i < j.size(); ++i) {
      out.push_back({j[i].at("input").get<std::string>(), j[i].at("question").get<std::string>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return out;
}

void save_generator_corpus(const std::string& path, const std::vector<GeneratorPair>& pairs) {
  if (ends_with(path, ".tsv")) {
    std::string body;
    for (const auto& p : pairs) {
      if (p.input.find_first_of("\t\n") != std::string::npos ||
          p.question.find_first_of("\t\n") != std::string::npos) {
        throw InvariantError("generator corpus entries may not contain tabs or newlines");
      }
      body += p.input + "\t" + p.question + "\n";
    }
    write_file(path, body);
    return;
  }
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& p : pairs) j.push_back({{"input", p.input}, {"question", p.question}});
  write_file(path, j.dump(2) + "\n");
}

}  // namespace sqlaug
