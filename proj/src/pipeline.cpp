#include "sqlaug/pipeline.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "sqlaug/text.hpp"

namespace sqlaug {

nlohmann::json to_json(const SynthesisConfig& c) {
  return {{"s1", c.s1},
          {"s2", c.s2},
          {"generator_beam", c.generator_beam},
          {"parser_beam", c.parser_beam},
          {"temperature", c.temperature},
          {"seed", c.seed}};
}

SynthesisConfig synthesis_config_from_json(const nlohmann::json& j) {
  SynthesisConfig c;
  c.s1 = j.value("s1", c.s1);
  c.s2 = j.value("s2", c.s2);
  c.generator_beam = j.value("generator_beam", c.generator_beam);
  c.parser_beam = j.value("parser_beam", c.parser_beam);
  c.temperature = j.value("temperature", c.temperature);
  c.seed = j.value("seed", c.seed);
  validate(c);
  return c;
}

void validate(const SynthesisConfig& c) {
  if (c.s1 < 1) throw InvariantError("synthesis: s1 must be >= 1");
  if (c.s2 < 1) throw InvariantError("synthesis: s2 must be >= 1");
  if (c.generator_beam < c.s2) throw InvariantError("synthesis: generator beam must be >= s2");
  if (c.parser_beam < 1) throw InvariantError("synthesis: parser beam must be >= 1");
  if (!(c.temperature >= 0.0)) throw InvariantError("synthesis: temperature must be >= 0");
}

nlohmann::json to_json(const SynthesizedExample& e) {
  std::vector<std::string> entities;
  for (const auto& x : e.entity_sequence.entities) entities.push_back(x.to_string());
  return {{"question", e.question},
          {"query", e.sql},
          {"db_id", e.db_id},
          {"entities", entities},
          {"generator_score", e.generator_score},
          {"parser_score", e.parser_score},
          {"aug", e.aug}};
}

SynthesizedExample synthesized_from_json(const nlohmann::json& j) {
  SynthesizedExample e;
  e.question = j.at("question").get<std::string>();
  e.sql = j.at("query").get<std::string>();
  e.db_id = j.at("db_id").get<std::string>();
  e.entity_sequence.db_name = e.db_id;
  for (const auto& s : j.value("entities", std::vector<std::string>{})) {
    const auto dot = s.find('.');
    if (dot == std::string::npos) throw ParseError("bad entity '" + s + "'");
    e.entity_sequence.entities.push_back({s.substr(0, dot), s.substr(dot + 1)});
  }
  e.generator_score = j.value("generator_score", 0.0);
  e.parser_score = j.value("parser_score", 0.0);
  e.aug = j.value("aug", true);
  if (e.question.empty()) throw ParseError("synthesized example with empty question");
  return e;
}

void save_synthesized(const std::string& path, const std::vector<SynthesizedExample>& examples) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : examples) arr.push_back(to_json(e));
  write_file(path, arr.dump(1));
}

std::vector<SynthesizedExample> load_synthesized(const std::string& path) {
  try {
    const auto j = nlohmann::json::parse(read_file(path));
    if (!j.is_array()) throw ParseError(path + ": expected a JSON array");
    std::vector<SynthesizedExample> out;
    for (const auto& x : j) out.push_back(synthesized_from_json(x));
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::vector<AnnotatedPair> to_pairs(const std::vector<SynthesizedExample>& examples) {
  std::vector<AnnotatedPair> out;
  out.reserve(examples.size());
  for (const auto& e : examples) out.push_back({e.question, e.sql, e.db_id});
  return out;
}

std::vector<SynthesizedExample> dedup(const std::vector<SynthesizedExample>& candidates,
                                      const std::vector<AnnotatedPair>& reference, int cap) {
  std::unordered_set<std::string> seen;
  for (const auto& r : reference) seen.insert(text::normalize_question(r.question));
  std::vector<std::size_t> order(candidates.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (candidates[a].generator_score != candidates[b].generator_score) {
      return candidates[a].generator_score > candidates[b].generator_score;
    }
    return candidates[a].question < candidates[b].question;
  });
  std::map<std::string, int> per_sequence;
  std::vector<SynthesizedExample> out;
  for (std::size_t i : order) {
    const auto& c = candidates[i];
    const std::string key = c.db_id + "\t" + c.entity_sequence.to_string();
    if (per_sequence[key] >= cap) continue;
    if (!seen.insert(text::normalize_question(c.question)).second) continue;
    ++per_sequence[key];
    out.push_back(c);
  }
  return out;
}

std::vector<SynthesizedExample> no_para(const std::vector<SynthesizedExample>& candidates) {
  std::map<std::pair<std::string, std::string>, std::size_t> best;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    auto [it, inserted] = best.try_emplace({c.db_id, canonical_sql(c.sql)}, i);
    if (inserted) continue;
    const auto& cur = candidates[it->second];
    if (c.generator_score > cur.generator_score ||
        (c.generator_score == cur.generator_score && c.question < cur.question)) {
      it->second = i;
    }
  }
  std::vector<char> keep(candidates.size(), 0);
  for (const auto& [key, i] : best) keep[i] = 1;
  std::vector<SynthesizedExample> out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (keep[i]) out.push_back(candidates[i]);
  }
  return out;
}

nlohmann::ordered_json to_json(const DomainReport& r) {
  nlohmann::ordered_json j;
  j["db_id"] = r.db_id;
  j["zero_shot"] = r.zero_shot;
  j["sequences"] = r.counts.sequences;
  j["generated"] = r.counts.generated;
  j["after_pred"] = r.counts.after_pred;
  j["after_dedup"] = r.counts.after_dedup;
  j["after_no_para"] = r.counts.after_no_para;
  return j;
}

std::vector<SynthesizedExample> synthesize_domain(const SchemaGraph& schema, ExecEnvironment& env,
                                                  const SynthesisModels& models,
                                                  const std::vector<AnnotatedPair>& reference,
                                                  const SynthesisConfig& config, Attrition* counts) {
  validate(config);
  Attrition local;
  const auto sequences = models.sampler.sample(schema, config.s1, config.temperature,
                                               derive_seed(config.seed, "synthesize." + schema.db_id()));
  local.sequences = sequences.size();

  struct Generated {
    std::size_t sequence;
    QuestionCandidate candidate;
  };
  std::vector<Generated> generated;
  std::vector<std::string> unique_questions;
  std::unordered_set<std::string> asked;
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    resolve_entities(schema, sequences[i]);
    const std::string input = format_generator_input(sequences[i], schema);
    for (auto& c : generate_questions(models.generator, input, config.generator_beam)) {
      if (asked.insert(c.question).second) unique_questions.push_back(c.question);
      generated.push_back({i, std::move(c)});
    }
  }
  local.generated = generated.size();

  std::unordered_map<std::string, LabeledQuestion> labels;
  for (auto& l : pred(models.parser, unique_questions, schema, env, config.parser_beam)) {
    labels.emplace(l.question, std::move(l));
  }
  std::vector<SynthesizedExample> labeled;
  for (const auto& g : generated) {
    auto it = labels.find(g.candidate.question);
    if (it == labels.end()) continue;
    SynthesizedExample e;
    e.question = g.candidate.question;
    e.sql = it->second.sql;
    e.db_id = schema.db_id();
    e.entity_sequence = sequences[g.sequence];
    e.generator_score = g.candidate.score;
    e.parser_score = it->second.score;
    labeled.push_back(std::move(e));
  }
  local.after_pred = labeled.size();

  auto kept = dedup(labeled, reference, config.s2);
  local.after_dedup = kept.size();
  kept = no_para(kept);
  local.after_no_para = kept.size();
  if (counts) *counts = local;
  return kept;
}

SynthesisMode parse_synthesis_mode(const std::string& s) {
  if (s == "train" || s == "train-domains") return SynthesisMode::kTrainDomains;
  if (s == "dev" || s == "zero-shot" || s == "zero-shot-domains") return SynthesisMode::kZeroShotDomains;
  if (s == "train+dev" || s == "both") return SynthesisMode::kBoth;
  throw InvariantError("unknown synthesis mode '" + s + "' (expected train, dev or train+dev)");
}

std::string_view synthesis_mode_name(SynthesisMode m) {
  switch (m) {
    case SynthesisMode::kTrainDomains: return "train";
    case SynthesisMode::kZeroShotDomains: return "dev";
    case SynthesisMode::kBoth: return "train+dev";
  }
  return "train";
}

SynthesisResult synthesize(const std::vector<SchemaGraph>& train_domains,
                           const std::vector<SchemaGraph>& zero_shot_domains, SynthesisMode mode,
                           const SynthesisModels& models, ExecEnvironment& env,
                           const std::vector<AnnotatedPair>& reference, const SynthesisConfig& config) {
  validate(config);
  SynthesisResult result;
  auto run = [&](const SchemaGraph& schema, bool zero_shot) {
    DomainReport report;
    report.db_id = schema.db_id();
    report.zero_shot = zero_shot;
    static const std::vector<AnnotatedPair> kNone;
    auto out = synthesize_domain(schema, env, models, zero_shot ? kNone : reference, config, &report.counts);
    result.examples.insert(result.examples.end(), std::make_move_iterator(out.begin()),
                           std::make_move_iterator(out.end()));
    result.domains.push_back(std::move(report));
  };
  if (mode != SynthesisMode::kZeroShotDomains) {
    for (const auto& s : train_domains) run(s, false);
  }
  if (mode != SynthesisMode::kTrainDomains) {
    for (const auto& s : zero_shot_domains) run(s, true);
  }
  return result;
}

}  // namespace sqlaug
