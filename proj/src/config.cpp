#include "sqlaug/config.hpp"

#include <filesystem>

namespace sqlaug {

namespace fs = std::filesystem;

namespace {

nlohmann::ordered_json without_seed(const nlohmann::json& j) {
  nlohmann::ordered_json out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() != "seed") out[it.key()] = it.value();
  }
  return out;
}

std::string file_hash(const std::string& path) {
  if (path.empty() || !fs::exists(path)) return "";
  return sha256_hex(read_file(path));
}

}  // namespace

std::string RunConfig::resolve(const std::string& path) const {
  if (path.empty()) return path;
  const fs::path p(path);
  if (p.is_absolute() || base_dir.empty()) return p.lexically_normal().string();
  return (fs::path(base_dir) / p).lexically_normal().string();
}

void apply_seed(RunConfig& c) {
  c.sampler.seed = derive_seed(c.seed, "sampler");
  c.generator.seed = derive_seed(c.seed, "generator");
  c.parser.seed = derive_seed(c.seed, "parser");
  c.synthesis.seed = derive_seed(c.seed, "synthesis");
}

nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["seed"] = c.seed;
  nlohmann::ordered_json paths;
  paths["schemas"] = c.schemas;
  paths["train"] = c.train;
  paths["heldout"] = c.heldout;
  paths["databases"] = c.databases;
  paths["output"] = c.output;
  paths["augmented"] = c.augmented;
  j["paths"] = paths;
  j["zero_shot_domains"] = c.zero_shot_domains;
  j["timeout"] = c.timeout;
  j["sampler"] = without_seed(to_json(c.sampler));
  j["generator"] = without_seed(to_json(c.generator));
  j["parser"] = without_seed(to_json(c.parser));
  j["synthesis"] = without_seed(to_json(c.synthesis));
  j["mixture"] = to_json(c.mixture);
  nlohmann::ordered_json sweep = nlohmann::ordered_json::array();
  for (const auto& [a, b] : c.alpha_sweep) sweep.push_back({a, b});
  j["alpha_sweep"] = sweep;
  return j;
}

RunConfig run_config_from_json(const nlohmann::json& j, const std::string& base_dir) {
  try {
    RunConfig c;
    c.base_dir = base_dir;
    c.seed = j.value("seed", c.seed);
    const nlohmann::json paths = j.value("paths", nlohmann::json::object());
    c.schemas = paths.value("schemas", c.schemas);
    c.train = paths.value("train", c.train);
    c.heldout = paths.value("heldout", c.heldout);
    c.databases = paths.value("databases", c.databases);
    c.output = paths.value("output", c.output);
    c.augmented = paths.value("augmented", c.augmented);
    c.zero_shot_domains = j.value("zero_shot_domains", c.zero_shot_domains);
    c.timeout = j.value("timeout", c.timeout);
    if (!(c.timeout > 0.0)) throw InvariantError("timeout must be positive");
    c.sampler = sampler_config_from_json(j.value("sampler", nlohmann::json::object()));
    c.generator = generator_config_from_json(j.value("generator", nlohmann::json::object()));
    c.parser = parser_config_from_json(j.value("parser", nlohmann::json::object()));
    c.synthesis = synthesis_config_from_json(j.value("synthesis", nlohmann::json::object()));
    c.mixture = mixture_config_from_json(j.value("mixture", nlohmann::json::object()));
    for (const auto& pair : j.value("alpha_sweep", nlohmann::json::array())) {
      if (!pair.is_array() || pair.size() != 2) throw ParseError("alpha_sweep entries are [alpha_train, alpha_new]");
      const double a = pair[0].get<double>();
      const double b = pair[1].get<double>();
      if (a < 0.0 || b < 0.0) throw InvariantError("alpha_sweep weights must be >= 0");
      c.alpha_sweep.emplace_back(a, b);
    }
    apply_seed(c);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
}

RunConfig load_run_config(const std::string& path) {
  if (!fs::exists(path)) throw ParseError("config file not found: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return run_config_from_json(j, fs::absolute(path).parent_path().string());
}

void save_run_config(const std::string& path, const RunConfig& c) { write_file(path, to_json(c).dump(2) + "\n"); }

void validate_paths(const RunConfig& c) {
  auto need = [&](const std::string& name, const std::string& value, bool required) {
    if (value.empty()) {
      if (required) throw ParseError("config: paths." + name + " is required");
      return;
    }
    if (!fs::exists(c.resolve(value))) throw ParseError("config: paths." + name + " not found: " + c.resolve(value));
  };
  need("schemas", c.schemas, true);
  need("train", c.train, true);
  need("heldout", c.heldout, false);
  need("databases", c.databases, false);
  if (c.output.empty()) throw ParseError("config: paths.output is required");
}

std::string config_hash(const RunConfig& c) { return sha256_hex(to_json(c).dump()); }

std::string components_hash(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["seed"] = c.seed;
  j["schemas"] = file_hash(c.resolve(c.schemas));
  j["train"] = file_hash(c.resolve(c.train));
  j["sampler"] = without_seed(to_json(c.sampler));
  j["generator"] = without_seed(to_json(c.generator));
  j["parser"] = without_seed(to_json(c.parser));
  return sha256_hex(j.dump());
}

ComponentData component_training_data(const std::vector<AnnotatedPair>& examples,
                                      const std::vector<SchemaGraph>& schemas) {
  ComponentData d;
  for (const auto& p : examples) {
    const SchemaGraph& s = require_schema(schemas, p.db_id);
    try {
      EntitySequence seq = extract_entity_sequence(p.sql, s);
      d.generator_pairs.push_back({format_generator_input(seq, s), p.question});
      d.sequences.push_back(std::move(seq));
    } catch (const SqlError&) {
      ++d.skipped;
    } catch (const ResolutionError&) {
      ++d.skipped;
    }
  }
  return d;
}

}  // namespace sqlaug
