#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "sqlaug/generator.hpp"
#include "sqlaug/parser.hpp"
#include "sqlaug/sampler.hpp"
#include "sqlaug/schema.hpp"

namespace sqlaug {

struct SynthesisConfig {
  int s1 = 80;               // entity sequences per domain
  int s2 = 20;               // retained examples per entity sequence
  int generator_beam = 20;   // must be >= s2
  int parser_beam = 8;
  double temperature = 1.0;  // sampler temperature
  std::uint64_t seed = 0;
};

nlohmann::json to_json(const SynthesisConfig& c);
SynthesisConfig synthesis_config_from_json(const nlohmann::json& j);
/// Throws InvariantError unless s1 >= 1, s2 >= 1, generator_beam >= s2 and parser_beam >= 1.
void validate(const SynthesisConfig& c);

struct SynthesizedExample {
  std::string question;
  std::string sql;
  std::string db_id;
  EntitySequence entity_sequence;
  double generator_score = 0.0;
  double parser_score = 0.0;
  bool aug = true;
};

nlohmann::json to_json(const SynthesizedExample& e);
SynthesizedExample synthesized_from_json(const nlohmann::json& j);
void save_synthesized(const std::string& path, const std::vector<SynthesizedExample>& examples);
std::vector<SynthesizedExample> load_synthesized(const std::string& path);
std::vector<AnnotatedPair> to_pairs(const std::vector<SynthesizedExample>& examples);

/// Source of entity sequences for a domain.
class EntitySampler {
 public:
  virtual ~EntitySampler() = default;
  virtual std::vector<EntitySequence> sample(const SchemaGraph& schema, int n, double temperature,
                                             std::uint64_t seed) const = 0;
};

class ModelEntitySampler : public EntitySampler {
 public:
  explicit ModelEntitySampler(const SamplerModel& model) : model_(model) {}
  std::vector<EntitySequence> sample(const SchemaGraph& schema, int n, double temperature,
                                     std::uint64_t seed) const override {
    return sample_entities(model_, schema, n, temperature, seed);
  }

 private:
  const SamplerModel& model_;
};

/// Keeps candidates in descending generator_score order (ties by question)
/// while dropping normalized questions already kept or present in
/// `reference`, and at most `cap` per (db_id, entity sequence).
std::vector<SynthesizedExample> dedup(const std::vector<SynthesizedExample>& candidates,
                                      const std::vector<AnnotatedPair>& reference, int cap);

/// One survivor per (db_id, canonical SQL): highest generator_score, then
/// lexicographically smallest question. Survivors keep their input order.
std::vector<SynthesizedExample> no_para(const std::vector<SynthesizedExample>& candidates);

struct Attrition {
  std::size_t sequences = 0;
  std::size_t generated = 0;
  std::size_t after_pred = 0;
  std::size_t after_dedup = 0;
  std::size_t after_no_para = 0;
};

struct DomainReport {
  std::string db_id;
  bool zero_shot = false;
  Attrition counts;
};

nlohmann::ordered_json to_json(const DomainReport& r);

struct SynthesisModels {
  const EntitySampler& sampler;
  const GeneratorBackend& generator;
  const Parser& parser;
};

/// sample (s1) -> generate (beam) -> pred -> dedup (cap s2) -> no_para.
std::vector<SynthesizedExample> synthesize_domain(const SchemaGraph& schema, ExecEnvironment& env,
                                                  const SynthesisModels& models,
                                                  const std::vector<AnnotatedPair>& reference,
                                                  const SynthesisConfig& config,
                                                  Attrition* counts = nullptr);

enum class SynthesisMode { kTrainDomains, kZeroShotDomains, kBoth };
SynthesisMode parse_synthesis_mode(const std::string& s);
std::string_view synthesis_mode_name(SynthesisMode m);

struct SynthesisResult {
  std::vector<SynthesizedExample> examples;
  std::vector<DomainReport> domains;
};

/// Union over the selected domains in the given order. Training domains are
/// deduplicated against `reference`; zero-shot domains against nothing.
SynthesisResult synthesize(const std::vector<SchemaGraph>& train_domains,
                           const std::vector<SchemaGraph>& zero_shot_domains, SynthesisMode mode,
                           const SynthesisModels& models, ExecEnvironment& env,
                           const std::vector<AnnotatedPair>& reference, const SynthesisConfig& config);

}  // namespace sqlaug
