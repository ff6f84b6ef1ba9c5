#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sqlaug/embed.hpp"
#include "sqlaug/nn.hpp"

namespace sqlaug {

struct GeneratorTrainConfig {
  double learning_rate = 3e-4;
  int batch_size = 8;
  int epochs = 3;
  double clip_norm = 1.0;
  int warmup_steps = 0;
  std::uint64_t seed = 0;
  int embed_dim = 48;
  int hidden_dim = 64;
  int trigram_buckets = 1024;
  int max_output_length = 64;
  double length_penalty = 1.0;  // score = log p / length^penalty
};

nlohmann::json to_json(const GeneratorTrainConfig& c);
GeneratorTrainConfig generator_config_from_json(const nlohmann::json& j);

struct QuestionCandidate {
  std::string question;
  double score = 0.0;
};

/// A question generator consumes only the formatted entity string.
class GeneratorBackend {
 public:
  virtual ~GeneratorBackend() = default;
  virtual std::string name() const = 0;
  virtual bool trained() const = 0;
  virtual std::vector<QuestionCandidate> generate(const std::string& input, int beam_size) const = 0;
};

struct GeneratorPair {
  std::string input;
  std::string question;
};

/// Attentional BiLSTM encoder-decoder with a copy mechanism: a single
/// softmax ranges over the output vocabulary and the source positions, and a
/// target token is matched by every position that carries it.
class Seq2SeqGenerator : public GeneratorBackend {
 public:
  Seq2SeqGenerator(GeneratorTrainConfig cfg, text::Vocabulary words, text::Vocabulary outputs);

  std::string name() const override { return "seq2seq-copy"; }
  bool trained() const override { return trained_; }
  void set_trained(bool t) { trained_ = t; }
  std::vector<QuestionCandidate> generate(const std::string& input, int beam_size) const override;

  /// Step-by-step argmax decode, independent of the beam implementation.
  std::string greedy_decode(const std::string& input) const;

  const GeneratorTrainConfig& config() const { return cfg_; }
  nn::ParameterSet& params() { return params_; }
  nn::Graph::Var loss(nn::Graph& g, const GeneratorPair& pair) const;

  double initial_loss = 0.0;
  std::vector<double> epoch_loss;

  nlohmann::json to_json() const;
  static Seq2SeqGenerator from_json(const nlohmann::json& j);
  void save(const std::string& path) const;
  static Seq2SeqGenerator load(const std::string& path);

 private:
  struct Encoded;
  struct DecoderState;
  Encoded encode(nn::Graph& g, nn::EmbedCache& cache, const std::vector<std::string>& src) const;
  DecoderState start(nn::Graph& g, nn::EmbedCache& cache, const Encoded& enc) const;
  /// Advances one step feeding `prev`; returns logits over vocab + positions.
  nn::Graph::Var step(nn::Graph& g, nn::EmbedCache& cache, const Encoded& enc, DecoderState& s,
                      const std::string& prev) const;
  /// Log-probabilities merged per output string (<unk> excluded).
  std::vector<std::pair<std::string, double>> token_log_probs(const nn::Graph& g, nn::Graph::Var logits,
                                                              const Encoded& enc) const;

  GeneratorTrainConfig cfg_;
  nn::ParameterSet params_;
  nn::TokenEmbedder embed_;
  text::Vocabulary outputs_;
  nn::Lstm enc_fwd_;
  nn::Lstm enc_bwd_;
  nn::Linear init_;
  nn::Lstm decoder_;
  nn::Parameter* attend_ = nullptr;
  nn::Linear combine_;
  nn::Linear vocab_out_;
  nn::Parameter* copy_ = nullptr;
  bool trained_ = false;
};

inline constexpr const char* kEosToken = "<eos>";
inline constexpr const char* kBosToken = "<s>";

Seq2SeqGenerator train_generator(const std::vector<GeneratorPair>& pairs,
                                 const GeneratorTrainConfig& cfg);

/// Runs the backend and enforces the candidate contract: at most beam_size
/// distinct non-empty questions in non-increasing score order.
std::vector<QuestionCandidate> generate_questions(const GeneratorBackend& model,
                                                  const std::string& input, int beam_size);

/// Corpus of (input, question) pairs: ".tsv" files hold one tab-separated
/// pair per line, anything else is a JSON array of {input, question}.
std::vector<GeneratorPair> load_generator_corpus(const std::string& path);
void save_generator_corpus(const std::string& path, const std::vector<GeneratorPair>& pairs);

}  // namespace sqlaug
