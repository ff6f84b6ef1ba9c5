#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "sqlaug/embed.hpp"
#include "sqlaug/nn.hpp"
#include "sqlaug/schema.hpp"

namespace sqlaug {

struct SamplerTrainConfig {
  double learning_rate = 5e-3;
  int epochs = 30;
  int batch_size = 8;
  bool teacher_forcing = true;  // the only supported mode
  std::uint64_t seed = 0;
  int max_length = 8;  // entities per sampled sequence
  int embed_dim = 32;
  int hidden_dim = 64;
  int trigram_buckets = 512;
};

nlohmann::json to_json(const SamplerTrainConfig& c);
SamplerTrainConfig sampler_config_from_json(const nlohmann::json& j);

/// Autoregressive pointer model over schema columns plus <EOS>. A small
/// encoder embeds each column from its name, table, type and key flags; a
/// single-layer LSTM decoder points at the next column or at <EOS>.
/// Already-chosen columns are masked out at every step.
class SamplerModel {
 public:
  SamplerModel(SamplerTrainConfig cfg, text::Vocabulary vocab);

  const SamplerTrainConfig& config() const { return cfg_; }
  nn::ParameterSet& params() { return params_; }
  const nn::ParameterSet& params() const { return params_; }
  bool trained() const { return trained_; }
  void set_trained(bool t) { trained_ = t; }

  /// Mean per-sequence NLL before the first update and after each epoch.
  double initial_nll = 0.0;
  std::vector<double> epoch_nll;

  /// Teacher-forced NLL graph of one sequence (column indices in order).
  nn::Graph::Var sequence_loss(nn::Graph& g, const SchemaGraph& schema,
                               const std::vector<int>& columns, bool terminated) const;

  /// Probability vectors (size num_columns + 1, <EOS> last) of every
  /// decision along the given prefix-forced path.
  std::vector<Eigen::VectorXd> step_distributions(const SchemaGraph& schema,
                                                  const std::vector<int>& columns,
                                                  bool terminated) const;

  std::vector<int> decode(const SchemaGraph& schema, double temperature, nn::Rng& rng,
                          bool* terminated) const;

  nlohmann::json to_json() const;
  static SamplerModel from_json(const nlohmann::json& j);
  void save(const std::string& path) const;
  static SamplerModel load(const std::string& path);

 private:
  struct Encoded;
  Encoded encode(nn::Graph& g, nn::EmbedCache& cache, const SchemaGraph& schema) const;
  nn::Graph::Var logits(nn::Graph& g, const Encoded& enc, const SchemaGraph& schema,
                        const nn::Lstm::State& state, const std::vector<int>& chosen) const;

  SamplerTrainConfig cfg_;
  nn::ParameterSet params_;
  nn::TokenEmbedder embed_;
  nn::Linear column_enc_;
  nn::Linear init_;
  nn::Lstm decoder_;
  nn::Parameter* start_ = nullptr;
  nn::Parameter* eos_ = nullptr;
  nn::Parameter* pointer_ = nullptr;
  nn::Parameter* relation_ = nullptr;
  bool trained_ = false;
};

/// Maximum-likelihood training with teacher forcing. Sequences without
/// entities carry no pointer decisions and are skipped; sequences longer than
/// max_length are truncated (and lose their <EOS> step).
SamplerModel train_sampler(const std::vector<SchemaGraph>& schemas,
                           const std::vector<EntitySequence>& sequences,
                           const SamplerTrainConfig& cfg);

/// Temperature <= 1e-6 decodes greedily. Samples whose first decision is
/// <EOS> are redrawn; after 100 such draws <EOS> is masked at the first step.
std::vector<EntitySequence> sample_entities(const SamplerModel& model, const SchemaGraph& schema,
                                            int n, double temperature, std::uint64_t seed);

/// Sum of log-probabilities of every pointer decision, including <EOS> when
/// the sequence is terminated. The db-name prefix is given and contributes 0.
double sequence_log_prob(const SamplerModel& model, const SchemaGraph& schema,
                         const EntitySequence& seq);

/// Weights indexed by sequence length (index 0 unused).
using LengthDistribution = std::vector<double>;

/// Empirical length distribution of non-empty sequences.
LengthDistribution empirical_length_distribution(const std::vector<EntitySequence>& sequences);

/// Uniformly chosen distinct columns; lengths drawn from `lengths`.
/// Throws InvariantError when a length with positive weight exceeds the
/// number of columns.
std::vector<EntitySequence> sample_random_entities(const SchemaGraph& schema, int n,
                                                   const LengthDistribution& lengths,
                                                   std::uint64_t seed);

/// Column indices of a sequence in `schema`; throws ResolutionError.
std::vector<int> resolve_entities(const SchemaGraph& schema, const EntitySequence& seq);

}  // namespace sqlaug
