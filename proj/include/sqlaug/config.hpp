#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sqlaug/generator.hpp"
#include "sqlaug/parser.hpp"
#include "sqlaug/pipeline.hpp"
#include "sqlaug/sampler.hpp"
#include "sqlaug/student.hpp"

namespace sqlaug {

/// Everything one pipeline run depends on. Stored as JSON; relative paths
/// are resolved against the directory of the config file.
///
///   {
///     "seed": 0,
///     "paths": {"schemas": "tables.json", "train": "train.json",
///               "heldout": "heldout.json", "databases": "database",
///               "output": "run", "augmented": ""},
///     "zero_shot_domains": ["museum_visit"],
///     "timeout": 5.0,
///     "sampler": {...}, "generator": {...}, "parser": {...},
///     "synthesis": {...}, "mixture": {...},
///     "alpha_sweep": [[0.3, 0.1], [0.3, 0.3]]
///   }
///
/// Component seeds are not read from the file: each is derive_seed(seed,
/// "<component>") for component in sampler, generator, parser, synthesis.
struct RunConfig {
  std::uint64_t seed = 0;
  std::string schemas;
  std::string train;
  std::string heldout;    // optional evaluation split
  std::string databases;  // optional; <databases>/<db_id>/<db_id>.sqlite
  std::string output = "run";
  std::string augmented;  // optional; train-student input, default <output>/augmented_train_dev.json
  std::vector<std::string> zero_shot_domains;
  double timeout = 5.0;
  SamplerTrainConfig sampler;
  GeneratorTrainConfig generator;
  ParserConfig parser;
  SynthesisConfig synthesis;
  TrainingMixtureConfig mixture;
  std::vector<std::pair<double, double>> alpha_sweep;

  std::string base_dir;  // directory of the config file, not serialized
  std::string resolve(const std::string& path) const;
};

nlohmann::ordered_json to_json(const RunConfig& c);
/// Fills defaults for missing fields and applies the seed derivation.
RunConfig run_config_from_json(const nlohmann::json& j, const std::string& base_dir = "");
RunConfig load_run_config(const std::string& path);
void save_run_config(const std::string& path, const RunConfig& c);

/// Re-derives every component seed from the global seed.
void apply_seed(RunConfig& c);

/// Throws ParseError naming the first required path that does not exist.
void validate_paths(const RunConfig& c);

/// SHA-256 of the canonical JSON of the whole config.
std::string config_hash(const RunConfig& c);
/// SHA-256 over what the trained components depend on: seed, data file
/// contents and the sampler, generator and parser sections.
std::string components_hash(const RunConfig& c);

/// Training inputs for the sampler and generator derived from annotated
/// pairs. Pairs whose SQL does not resolve are counted and skipped.
struct ComponentData {
  std::vector<EntitySequence> sequences;
  std::vector<GeneratorPair> generator_pairs;
  std::size_t skipped = 0;
};
ComponentData component_training_data(const std::vector<AnnotatedPair>& examples,
                                      const std::vector<SchemaGraph>& schemas);

}  // namespace sqlaug
