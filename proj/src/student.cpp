#include "sqlaug/student.hpp"

namespace sqlaug {

TrainingMode parse_training_mode(const std::string& s) {
  if (s == "weighted-joint") return TrainingMode::kWeightedJoint;
  if (s == "pretrain-finetune") return TrainingMode::kPretrainFinetune;
  if (s == "combine") return TrainingMode::kCombine;
  throw InvariantError("unknown training mode '" + s +
                       "' (expected weighted-joint, pretrain-finetune or combine)");
}

std::string_view training_mode_name(TrainingMode m) {
  switch (m) {
    case TrainingMode::kWeightedJoint: return "weighted-joint";
    case TrainingMode::kPretrainFinetune: return "pretrain-finetune";
    case TrainingMode::kCombine: return "combine";
  }
  return "weighted-joint";
}

nlohmann::json to_json(const TrainingMixtureConfig& c) {
  return {{"alpha_train", c.alpha_train},
          {"alpha_new", c.alpha_new},
          {"mode", training_mode_name(c.mode)},
          {"aug_token", c.aug_token}};
}

TrainingMixtureConfig mixture_config_from_json(const nlohmann::json& j) {
  TrainingMixtureConfig c;
  c.alpha_train = j.value("alpha_train", c.alpha_train);
  c.alpha_new = j.value("alpha_new", c.alpha_new);
  c.mode = parse_training_mode(j.value("mode", std::string(training_mode_name(c.mode))));
  c.aug_token = j.value("aug_token", c.aug_token);
  validate(c);
  return c;
}

void validate(const TrainingMixtureConfig& c) {
  if (!(c.alpha_train >= 0.0) || !(c.alpha_new >= 0.0)) {
    throw InvariantError("mixture weights must be >= 0");
  }
  if (c.aug_token.empty()) throw InvariantError("aug token must be non-empty");
}

std::string_view source_name(ExampleSource s) {
  switch (s) {
    case ExampleSource::kTrain: return "train";
    case ExampleSource::kAugTrain: return "aug_train";
    case ExampleSource::kAugNew: return "aug_new";
  }
  return "train";
}

AnnotatedPair tag_augmented(const SynthesizedExample& example, const std::string& token) {
  if (example.question.rfind(token + " ", 0) == 0 || example.question == token) {
    throw InvariantError("question is already tagged: " + example.question);
  }
  return {token + " " + example.question, example.sql, example.db_id};
}

std::string strip_tag(const std::string& question, const std::string& token) {
  const std::string prefix = token + " ";
  return question.rfind(prefix, 0) == 0 ? question.substr(prefix.size()) : question;
}

std::vector<WeightedExample> build_training_mixture(const std::vector<AnnotatedPair>& train,
                                                    const std::vector<SynthesizedExample>& aug_train,
                                                    const std::vector<SynthesizedExample>& aug_new,
                                                    const TrainingMixtureConfig& config) {
  validate(config);
  std::vector<WeightedExample> out;
  out.reserve(train.size() + aug_train.size() + aug_new.size());
  for (const auto& p : train) out.push_back({p, 1.0, false, ExampleSource::kTrain});
  for (const auto& e : aug_train) {
    out.push_back({tag_augmented(e, config.aug_token), config.alpha_train, true, ExampleSource::kAugTrain});
  }
  for (const auto& e : aug_new) {
    out.push_back({tag_augmented(e, config.aug_token), config.alpha_new, true, ExampleSource::kAugNew});
  }
  return out;
}

nlohmann::json mixture_manifest(const std::vector<WeightedExample>& mixture) {
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t i = 0; i < mixture.size(); ++i) {
    arr.push_back({{"id", i},
                   {"source", source_name(mixture[i].source)},
                   {"weight", mixture[i].weight},
                   {"tagged", mixture[i].tagged}});
  }
  return arr;
}

namespace {

ParserTrainingSet prepare(const std::vector<WeightedExample>& items,
                          const std::vector<SchemaGraph>& schemas, bool untag, bool unit_weights) {
  std::vector<AnnotatedPair> pairs;
  std::vector<double> weights;
  for (const auto& w : items) {
    AnnotatedPair p = w.pair;
    if (untag && w.tagged) p.question = strip_tag(p.question);
    pairs.push_back(std::move(p));
    weights.push_back(unit_weights ? 1.0 : w.weight);
  }
  return prepare_parser_data(pairs, weights, schemas);
}

}  // namespace

GrammarParser train_student(const std::vector<WeightedExample>& mixture,
                            const std::vector<SchemaGraph>& schemas, const ParserConfig& cfg,
                            TrainingMode mode) {
  const std::uint64_t shuffle = derive_seed(cfg.seed, "parser.shuffle");
  switch (mode) {
    case TrainingMode::kWeightedJoint: {
      std::vector<WeightedExample> kept;
      for (const auto& w : mixture) {
        if (w.weight < 0.0) throw InvariantError("negative example weight");
        if (w.weight > 0.0) kept.push_back(w);
      }
      const ParserTrainingSet data = prepare(kept, schemas, false, false);
      if (data.questions.empty()) throw ModelError("train_student: empty training mixture");
      GrammarParser model = make_parser(cfg, data.questions, data.schemas);
      fit_parser(model, data, cfg, shuffle);
      return model;
    }
    case TrainingMode::kPretrainFinetune: {
      std::vector<WeightedExample> aug, orig;
      for (const auto& w : mixture) (w.tagged ? aug : orig).push_back(w);
      const ParserTrainingSet a = prepare(aug, schemas, false, true);
      const ParserTrainingSet o = prepare(orig, schemas, false, true);
      if (o.questions.empty()) throw ModelError("train_student: no original examples to fine-tune on");
      std::vector<std::string> questions = a.questions;
      questions.insert(questions.end(), o.questions.begin(), o.questions.end());
      std::vector<const SchemaGraph*> used = a.schemas;
      used.insert(used.end(), o.schemas.begin(), o.schemas.end());
      GrammarParser model = make_parser(cfg, questions, used);
      if (!a.questions.empty()) fit_parser(model, a, cfg, derive_seed(cfg.seed, "parser.pretrain"));
      fit_parser(model, o, cfg, shuffle);
      return model;
    }
    case TrainingMode::kCombine: {
      const ParserTrainingSet data = prepare(mixture, schemas, true, true);
      if (data.questions.empty()) throw ModelError("train_student: empty training mixture");
      GrammarParser model = make_parser(cfg, data.questions, data.schemas);
      fit_parser(model, data, cfg, shuffle);
      return model;
    }
  }
  throw InvariantError("unknown training mode");
}

EvalResult evaluate_parser(const Parser& parser, const std::vector<AnnotatedPair>& examples,
                           const std::vector<SchemaGraph>& schemas, int beam) {
  EvalResult r;
  for (const auto& ex : examples) {
    const SchemaGraph& schema = require_schema(schemas, ex.db_id);
    ++r.total;
    const auto cands = parse_beam(parser, ex.question, schema, beam);
    if (cands.empty()) {
      ++r.no_prediction;
      continue;
    }
    if (exact_match(cands.front().sql, ex.sql)) ++r.correct;
  }
  r.exact_match = r.total ? static_cast<double>(r.correct) / static_cast<double>(r.total) : 0.0;
  return r;
}

}  // namespace sqlaug
