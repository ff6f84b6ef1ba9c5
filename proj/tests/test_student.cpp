#include <algorithm>

#include "doctest.h"
#include "fixtures.hpp"
#include "sqlaug/common.hpp"
#include "sqlaug/student.hpp"

using namespace sqlaug;

namespace {

ParserConfig small_parser() {
  ParserConfig c;
  c.embed_dim = 12;
  c.hidden_dim = 16;
  c.trigram_buckets = 64;
  c.epochs = 3;
  c.batch_size = 2;
  c.seed = 21;
  return c;
}

std::vector<AnnotatedPair> train_set() {
  return {{"How many singers are there ?", "SELECT count(*) FROM singer", "concert_singer"},
          {"List the names of singers .", "SELECT name FROM singer", "concert_singer"},
          {"What countries are singers from ?", "SELECT DISTINCT country FROM singer", "concert_singer"},
          {"Show the years of concerts .", "SELECT year FROM concert", "concert_singer"},
          {"Who is the oldest singer ?", "SELECT name FROM singer ORDER BY age DESC LIMIT 1", "concert_singer"}};
}

SynthesizedExample aug(const std::string& q, const std::string& sql) {
  SynthesizedExample e;
  e.question = q;
  e.sql = sql;
  e.db_id = "concert_singer";
  return e;
}

std::vector<SynthesizedExample> aug_set() {
  return {aug("How old are the singers ?", "SELECT age FROM singer"),
          aug("Count the concerts .", "SELECT count(*) FROM concert"),
          aug("Names of singers older than 40 ?", "SELECT name FROM singer WHERE age > 40")};
}

std::string params_of(const GrammarParser& m) { return m.to_json().at("params").dump(); }

}  // namespace

TEST_CASE("tag_augmented prepends the token once") {
  const AnnotatedPair p = tag_augmented(aug("Who is the oldest?", "SELECT 1"));
  CHECK(p.question == "[AUG] Who is the oldest?");
  CHECK(p.sql == "SELECT 1");
  CHECK(p.db_id == "concert_singer");
  CHECK_THROWS_AS(tag_augmented(aug(p.question, p.sql)), InvariantError);
  CHECK(strip_tag(p.question) == "Who is the oldest?");
  CHECK(strip_tag("plain") == "plain");
  TrainingMixtureConfig cfg;
  CHECK(build_training_mixture({}, {}, {}, cfg).empty());
}

TEST_CASE("build_training_mixture assigns weights and tags by source") {
  TrainingMixtureConfig cfg;
  CHECK(cfg.alpha_train == 0.3);
  CHECK(cfg.alpha_new == 0.1);
  std::vector<AnnotatedPair> train;
  for (int i = 0; i < 10; ++i) train.push_back({"q" + std::to_string(i), "SELECT 1", "d"});
  std::vector<SynthesizedExample> at(5, aug("a", "SELECT 1")), an(3, aug("n", "SELECT 2"));
  const auto mix = build_training_mixture(train, at, an, cfg);
  REQUIRE(mix.size() == 18);
  for (const auto& w : mix) {
    switch (w.source) {
      case ExampleSource::kTrain:
        CHECK(w.weight == 1.0);
        CHECK_FALSE(w.tagged);
        CHECK(w.pair.question.rfind("[AUG]", 0) == std::string::npos);
        break;
      case ExampleSource::kAugTrain:
        CHECK(w.weight == 0.3);
        CHECK(w.tagged);
        CHECK(w.pair.question == "[AUG] a");
        break;
      case ExampleSource::kAugNew:
        CHECK(w.weight == 0.1);
        CHECK(w.tagged);
        break;
    }
  }
  const auto manifest = mixture_manifest(mix);
  REQUIRE(manifest.size() == 18);
  CHECK(manifest[12]["source"] == "aug_train");
  CHECK(manifest[17]["weight"] == 0.1);

  TrainingMixtureConfig bad;
  bad.alpha_new = -1;
  CHECK_THROWS_AS(build_training_mixture(train, at, an, bad), InvariantError);
  bad = {};
  bad.aug_token = "";
  CHECK_THROWS_AS(validate(bad), InvariantError);
  CHECK_THROWS_AS(parse_training_mode("mixed"), InvariantError);
  CHECK(parse_training_mode("combine") == TrainingMode::kCombine);
  const auto rt = mixture_config_from_json(to_json(TrainingMixtureConfig{0.5, 0.2, TrainingMode::kPretrainFinetune}));
  CHECK(rt.alpha_train == 0.5);
  CHECK(rt.mode == TrainingMode::kPretrainFinetune);
}

TEST_CASE("weighted-joint without augmentation reproduces the baseline bit for bit") {
  const std::vector<SchemaGraph> schemas = {fixtures::concert_singer()};
  const auto cfg = small_parser();
  const GrammarParser baseline = train_parser(train_set(), schemas, cfg);

  TrainingMixtureConfig mc;
  const auto empty_aug = build_training_mixture(train_set(), {}, {}, mc);
  const GrammarParser student = train_student(empty_aug, schemas, cfg, TrainingMode::kWeightedJoint);
  CHECK(student.epoch_loss == baseline.epoch_loss);
  CHECK(params_of(student) == params_of(baseline));

  mc.alpha_train = 0.0;
  mc.alpha_new = 0.0;
  const auto zero = build_training_mixture(train_set(), aug_set(), aug_set(), mc);
  REQUIRE(zero.size() == 11);
  const GrammarParser zero_student = train_student(zero, schemas, cfg, TrainingMode::kWeightedJoint);
  CHECK(zero_student.epoch_loss == baseline.epoch_loss);
  CHECK(params_of(zero_student) == params_of(baseline));
}

TEST_CASE("augmented examples enter the gradient with their absolute weight") {
  const std::vector<SchemaGraph> schemas = {fixtures::concert_singer()};
  auto cfg = small_parser();
  cfg.epochs = 1;
  cfg.batch_size = 64;  // one batch
  TrainingMixtureConfig mc;
  const auto mix = build_training_mixture(train_set(), aug_set(), {}, mc);
  GrammarParser trained = train_student(mix, schemas, cfg, TrainingMode::kWeightedJoint);

  std::vector<double> w;
  std::vector<AnnotatedPair> pairs;
  for (const auto& m : mix) {
    w.push_back(m.weight);
    pairs.push_back(m.pair);
  }
  const ParserTrainingSet data = prepare_parser_data(pairs, w, schemas);
  GrammarParser fresh = make_parser(cfg, data.questions, data.schemas);
  fresh.params().zero_grad();
  const double n = static_cast<double>(data.questions.size());
  for (std::size_t i = 0; i < data.questions.size(); ++i) {
    nn::Graph g;
    g.backward(fresh.loss(g, data.questions[i], *data.schemas[i], data.actions[i]), data.weights[i] / n);
  }
  const auto& got = trained.params().all();
  const auto& want = fresh.params().all();
  REQUIRE(got.size() == want.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < got.size(); ++k) {
    worst = std::max(worst, (got[k]->grad - want[k]->grad).cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-12);

  // Doubling alpha doubles the augmented share of the gradient.
  mc.alpha_train *= 2.0;
  GrammarParser doubled = train_student(build_training_mixture(train_set(), aug_set(), {}, mc), schemas, cfg,
                                        TrainingMode::kWeightedJoint);
  CHECK(params_of(doubled) != params_of(trained));
}

TEST_CASE("batch loss is the weighted mean of per-example losses") {
  const std::vector<SchemaGraph> schemas = {fixtures::concert_singer()};
  auto cfg = small_parser();
  cfg.epochs = 1;
  cfg.batch_size = 64;  // one batch
  TrainingMixtureConfig mc;
  const auto mix = build_training_mixture(train_set(), aug_set(), {}, mc);
  const GrammarParser trained = train_student(mix, schemas, cfg, TrainingMode::kWeightedJoint);

  std::vector<double> w;
  std::vector<AnnotatedPair> pairs;
  for (const auto& m : mix) {
    w.push_back(m.weight);
    pairs.push_back(m.pair);
  }
  const ParserTrainingSet data = prepare_parser_data(pairs, w, schemas);
  GrammarParser fresh = make_parser(cfg, data.questions, data.schemas);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < data.questions.size(); ++i) {
    nn::Graph g;
    const double l = g.scalar(fresh.loss(g, data.questions[i], *data.schemas[i], data.actions[i]));
    num += data.weights[i] * l;
    den += data.weights[i];
  }
  REQUIRE(trained.epoch_loss.size() == 1);
  CHECK(trained.epoch_loss[0] == doctest::Approx(num / den).epsilon(1e-9));
}

TEST_CASE("combine mode ignores weights and tags") {
  const std::vector<SchemaGraph> schemas = {fixtures::concert_singer()};
  const auto cfg = small_parser();
  TrainingMixtureConfig mc;
  const auto mix = build_training_mixture(train_set(), aug_set(), {}, mc);
  const GrammarParser combined = train_student(mix, schemas, cfg, TrainingMode::kCombine);

  std::vector<AnnotatedPair> plain = train_set();
  for (const auto& e : aug_set()) plain.push_back({e.question, e.sql, e.db_id});
  const GrammarParser reference = train_parser(plain, schemas, cfg);
  CHECK(combined.epoch_loss == reference.epoch_loss);
  CHECK(params_of(combined) == params_of(reference));
}

TEST_CASE("pretrain-finetune trains on augmented then original data") {
  const std::vector<SchemaGraph> schemas = {fixtures::concert_singer()};
  const auto cfg = small_parser();
  TrainingMixtureConfig mc;
  const auto mix = build_training_mixture(train_set(), aug_set(), {}, mc);
  const GrammarParser m = train_student(mix, schemas, cfg, TrainingMode::kPretrainFinetune);
  CHECK(m.epoch_loss.size() == static_cast<std::size_t>(2 * cfg.epochs));
  CHECK(m.trained());
  CHECK_THROWS_AS(train_student({}, schemas, cfg, TrainingMode::kWeightedJoint), ModelError);
  CHECK_THROWS_AS(train_student(build_training_mixture({}, aug_set(), {}, mc), schemas, cfg,
                                TrainingMode::kPretrainFinetune),
                  ModelError);
}

TEST_CASE("evaluate_parser scores top-1 exact match") {
  class Fixed : public Parser {
   public:
    std::string name() const override { return "fixed"; }
    bool trained() const override { return true; }
    std::vector<SqlCandidate> parse(const std::string& q, const SchemaGraph&, int) const override {
      if (q == "none") return {};
      return {{"SELECT singer.name FROM singer", -1.0}};
    }
  } fixed;
  const std::vector<SchemaGraph> schemas = {fixtures::concert_singer()};
  const auto r = evaluate_parser(fixed,
                                 {{"a", "SELECT name FROM singer", "concert_singer"},
                                  {"b", "SELECT age FROM singer", "concert_singer"},
                                  {"none", "SELECT age FROM singer", "concert_singer"},
                                  {"c", "select T1.name from singer as T1", "concert_singer"}},
                                 schemas, 4);
  CHECK(r.total == 4);
  CHECK(r.correct == 2);
  CHECK(r.no_prediction == 1);
  CHECK(r.exact_match == doctest::Approx(0.5));
}
