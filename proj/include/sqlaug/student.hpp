#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "sqlaug/parser.hpp"
#include "sqlaug/pipeline.hpp"

namespace sqlaug {

inline constexpr const char* kAugToken = "[AUG]";

enum class TrainingMode { kWeightedJoint, kPretrainFinetune, kCombine };
TrainingMode parse_training_mode(const std::string& s);
std::string_view training_mode_name(TrainingMode m);

struct TrainingMixtureConfig {
  double alpha_train = 0.3;
  double alpha_new = 0.1;
  TrainingMode mode = TrainingMode::kWeightedJoint;
  std::string aug_token = kAugToken;
};

nlohmann::json to_json(const TrainingMixtureConfig& c);
TrainingMixtureConfig mixture_config_from_json(const nlohmann::json& j);
/// Throws InvariantError on negative weights or an empty token.
void validate(const TrainingMixtureConfig& c);

enum class ExampleSource { kTrain, kAugTrain, kAugNew };
std::string_view source_name(ExampleSource s);

struct WeightedExample {
  AnnotatedPair pair;
  double weight = 1.0;
  bool tagged = false;
  ExampleSource source = ExampleSource::kTrain;
};

/// "<token> " + question. Throws InvariantError when the question already
/// carries the token.
AnnotatedPair tag_augmented(const SynthesizedExample& example, const std::string& token = kAugToken);
/// Question with a leading "<token> " removed (unchanged when absent).
std::string strip_tag(const std::string& question, const std::string& token = kAugToken);

/// Train examples untagged at weight 1, then aug_train tagged at alpha_train,
/// then aug_new tagged at alpha_new.
std::vector<WeightedExample> build_training_mixture(const std::vector<AnnotatedPair>& train,
                                                    const std::vector<SynthesizedExample>& aug_train,
                                                    const std::vector<SynthesizedExample>& aug_new,
                                                    const TrainingMixtureConfig& config);

/// {id, source, weight, tagged} per example.
nlohmann::json mixture_manifest(const std::vector<WeightedExample>& mixture);

/// Fresh parser trained on the mixture.
///   weighted-joint: one pass over shared shuffled batches with per-batch
///     weighted mean loss; zero-weight examples are dropped beforehand.
///   pretrain-finetune: augmented examples (tagged, unweighted) for
///     cfg.epochs, then the original examples for cfg.epochs.
///   combine: untagged union, all weights 1.
/// Throws ModelError when nothing remains to train on.
GrammarParser train_student(const std::vector<WeightedExample>& mixture,
                            const std::vector<SchemaGraph>& schemas, const ParserConfig& cfg,
                            TrainingMode mode);

struct EvalResult {
  std::size_t total = 0;
  std::size_t correct = 0;
  std::size_t no_prediction = 0;
  double exact_match = 0.0;  // correct / total
};

/// Top-1 parse_beam prediction scored with exact_match.
EvalResult evaluate_parser(const Parser& parser, const std::vector<AnnotatedPair>& examples,
                           const std::vector<SchemaGraph>& schemas, int beam);

}  // namespace sqlaug
