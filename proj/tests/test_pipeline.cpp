#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "sqlaug/common.hpp"
#include "sqlaug/pipeline.hpp"
#include "sqlaug/text.hpp"

using namespace sqlaug;

namespace {

SynthesizedExample cand(const std::string& q, const std::string& sql, double gscore,
                        const std::string& seq_col = "name", const std::string& db = "concert_singer") {
  SynthesizedExample e;
  e.question = q;
  e.sql = sql;
  e.db_id = db;
  e.entity_sequence.db_name = db;
  e.entity_sequence.entities = {{"singer", seq_col}};
  e.generator_score = gscore;
  return e;
}

// Returns the first n single-column sequences of the schema (cycling).
class StubSampler : public EntitySampler {
 public:
  std::vector<EntitySequence> sample(const SchemaGraph& schema, int n, double, std::uint64_t) const override {
    std::vector<EntitySequence> out;
    for (int i = 0; i < n; ++i) {
      const auto c = static_cast<int>(static_cast<std::size_t>(i) % schema.num_columns());
      out.push_back({schema.db_id(), {schema.entity(c)}, true});
    }
    return out;
  }
};

// `beam` distinct questions per input, scores decreasing.
class StubGenerator : public GeneratorBackend {
 public:
  std::string name() const override { return "stub"; }
  bool trained() const override { return true; }
  std::vector<QuestionCandidate> generate(const std::string& input, int beam) const override {
    std::vector<QuestionCandidate> out;
    for (int i = 0; i < beam; ++i) out.push_back({"q " + std::to_string(i) + " about " + input, -0.1 * i});
    return out;
  }
};

// Fixed questions regardless of input.
class FixedGenerator : public GeneratorBackend {
 public:
  explicit FixedGenerator(std::vector<QuestionCandidate> c) : c_(std::move(c)) {}
  std::string name() const override { return "fixed"; }
  bool trained() const override { return true; }
  std::vector<QuestionCandidate> generate(const std::string&, int beam) const override {
    auto out = c_;
    if (out.size() > static_cast<std::size_t>(beam)) out.resize(static_cast<std::size_t>(beam));
    return out;
  }

 private:
  std::vector<QuestionCandidate> c_;
};

// A distinct executable select list per distinct question (pass-through).
class DistinctParser : public Parser {
 public:
  std::string name() const override { return "distinct"; }
  bool trained() const override { return true; }
  std::vector<SqlCandidate> parse(const std::string& q, const SchemaGraph& s, int) const override {
    std::size_t id;
    auto it = ids_.find(q);
    if (it == ids_.end()) {
      id = ids_.size() + 1;
      ids_[q] = id;
    } else {
      id = it->second;
    }
    // bits of id choose a column subset of table 0
    const auto cols = s.columns_of(0);
    std::vector<std::string> items;
    for (std::size_t b = 0; b < cols.size(); ++b) {
      if (id & (std::size_t{1} << b)) items.push_back(s.tables()[0] + "." + s.columns()[cols[b]].name);
    }
    REQUIRE(!items.empty());
    return {{"SELECT " + join(items, ", ") + " FROM " + s.tables()[0], -1.0}};
  }

 private:
  mutable std::map<std::string, std::size_t> ids_;
};

class RejectParser : public Parser {
 public:
  std::string name() const override { return "reject"; }
  bool trained() const override { return true; }
  std::vector<SqlCandidate> parse(const std::string&, const SchemaGraph&, int) const override {
    return {{"SELECT nothing FROM nowhere", -0.1}};
  }
};

// Random SQL from a small pool, so many questions collide on a logical form.
class PoolParser : public Parser {
 public:
  std::string name() const override { return "pool"; }
  bool trained() const override { return true; }
  std::vector<SqlCandidate> parse(const std::string& q, const SchemaGraph& s, int) const override {
    const std::size_t h = std::hash<std::string>{}(q);
    const std::string t = s.tables()[0];
    const std::vector<std::string> pool = {
        "SELECT " + t + "." + s.columns()[0].name + " FROM " + t,
        "SELECT count(*) FROM " + t,
        "SELECT " + t + "." + s.columns()[1].name + " FROM " + t + " WHERE " + t + "." + s.columns()[0].name +
            " = " + std::to_string(h % 7),
        "SELECT bogus FROM nowhere"};
    return {{pool[h % pool.size()], -0.5}};
  }
};

SynthesisConfig small_config(int s1, int s2, int beam) {
  SynthesisConfig c;
  c.s1 = s1;
  c.s2 = s2;
  c.generator_beam = beam;
  c.seed = 11;
  return c;
}

}  // namespace

TEST_CASE("dedup keeps the higher scoring duplicate") {
  const auto out = dedup({cand("Who is the oldest?", "SELECT a FROM singer", -2.0),
                          cand("who is  the oldest", "SELECT b FROM singer", -1.0)},
                         {}, 20);
  REQUIRE(out.size() == 1);
  CHECK(out[0].generator_score == -1.0);
}

TEST_CASE("dedup removes questions present in the reference") {
  const std::vector<AnnotatedPair> ref = {{"How many singers are there?", "SELECT count(*) FROM singer", "x"}};
  const auto out = dedup({cand("how many singers are there", "SELECT count(*) FROM singer", 0.0),
                          cand("How many concerts are there?", "SELECT count(*) FROM concert", -1.0)},
                         ref, 20);
  REQUIRE(out.size() == 1);
  CHECK(out[0].question == "How many concerts are there?");
}

TEST_CASE("dedup cap keeps the top generator scores per entity sequence") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-10.0, 0.0);
  std::vector<SynthesizedExample> c;
  for (int i = 0; i < 30; ++i) c.push_back(cand("question " + std::to_string(i), "SELECT 1", u(rng)));
  c.push_back(cand("other sequence", "SELECT 1", -100.0, "age"));
  const auto out = dedup(c, {}, 20);
  // oracle: sort scores of the first sequence, keep 20
  std::vector<double> scores;
  for (int i = 0; i < 30; ++i) scores.push_back(c[static_cast<std::size_t>(i)].generator_score);
  std::sort(scores.rbegin(), scores.rend());
  scores.resize(20);
  std::vector<double> kept;
  bool other = false;
  for (const auto& e : out) {
    if (e.entity_sequence.entities[0].column == "age") other = true;
    else kept.push_back(e.generator_score);
  }
  CHECK(other);
  CHECK(kept == scores);
  CHECK(dedup({}, {}, 3).empty());
}

TEST_CASE("no_para keeps one question per logical form") {
  CHECK(no_para({cand("a", "SELECT name FROM singer", -1), cand("b", "select NAME from singer", -0.5)}).size() == 1);
  CHECK(no_para({cand("a", "SELECT name FROM singer", -1), cand("b", "SELECT age FROM singer", -0.5)}).size() == 2);

  const std::vector<SynthesizedExample> five = {
      cand("q1", "SELECT name FROM singer WHERE age > 3", -3.0), cand("q2", "SELECT count(*) FROM singer", -1.0),
      cand("q3", "SELECT name FROM singer WHERE age > 30", -0.5), cand("q4", "SELECT COUNT(*) FROM singer", -1.0),
      cand("q0", "SELECT count(*) FROM singer", -1.0)};
  const auto out = no_para(five);
  // group-by oracle
  std::map<std::string, const SynthesizedExample*> best;
  for (const auto& e : five) {
    auto& b = best[canonical_sql(e.sql)];
    if (!b || e.generator_score > b->generator_score ||
        (e.generator_score == b->generator_score && e.question < b->question)) {
      b = &e;
    }
  }
  REQUIRE(out.size() == 2);
  REQUIRE(best.size() == 2);
  std::set<std::string> expected, got;
  for (const auto& [k, e] : best) expected.insert(e->question);
  for (const auto& e : out) got.insert(e.question);
  CHECK(got == expected);
  CHECK(got == std::set<std::string>{"q0", "q3"});

  // same SQL in different domains are different groups
  CHECK(no_para({cand("a", "SELECT name FROM singer", -1, "name", "d1"),
                 cand("b", "SELECT name FROM singer", -1, "name", "d2")})
            .size() == 2);
}

TEST_CASE("synthesize_domain with pass-through stubs is bounded by s1*s2") {
  const SchemaGraph s = fixtures::concert_singer();
  ExecEnvironment env({s});
  StubSampler sampler;
  StubGenerator gen;
  for (auto [s1, s2, beam] : {std::tuple{3, 4, 4}, std::tuple{3, 2, 5}, std::tuple{5, 3, 3}}) {
    DistinctParser parser;  // at most 15 distinct select lists
    const SynthesisModels models{sampler, gen, parser};
    Attrition a;
    const auto out = synthesize_domain(s, env, models, {}, small_config(s1, s2, beam), &a);
    CHECK(out.size() <= static_cast<std::size_t>(s1 * s2));
    CHECK(out.size() == static_cast<std::size_t>(s1 * s2));
    CHECK(a.sequences == static_cast<std::size_t>(s1));
    CHECK(a.generated == static_cast<std::size_t>(s1 * beam));
    CHECK(a.after_pred == a.generated);
    CHECK(a.after_dedup == static_cast<std::size_t>(s1 * s2));
    CHECK(a.after_no_para == a.after_dedup);
    for (const auto& e : out) {
      CHECK(e.db_id == s.db_id());
      CHECK(e.aug);
      CHECK_FALSE(e.question.empty());
    }
  }
}

TEST_CASE("synthesize_domain with a rejecting parser is empty") {
  const SchemaGraph s = fixtures::concert_singer();
  ExecEnvironment env({s});
  StubSampler sampler;
  StubGenerator gen;
  RejectParser parser;
  Attrition a;
  const auto out = synthesize_domain(s, env, {sampler, gen, parser}, {}, small_config(4, 2, 3), &a);
  CHECK(out.empty());
  CHECK(a.generated == 12);
  CHECK(a.after_pred == 0);
  CHECK(a.after_no_para == 0);
}

TEST_CASE("synthesis filter invariants on colliding stubs") {
  const SchemaGraph s = fixtures::department_management();
  ExecEnvironment env({s});
  StubSampler sampler;
  PoolParser parser;
  std::vector<QuestionCandidate> qs;
  for (int i = 0; i < 12; ++i) qs.push_back({"What is item " + std::to_string(i % 9) + " ?", -0.2 * i});
  FixedGenerator gen(qs);
  const std::vector<AnnotatedPair> reference = {{"what is item 3", "SELECT 1", s.db_id()},
                                                {"What is item 5?", "SELECT 1", s.db_id()}};
  for (int s2 : {1, 2, 5}) {
    Attrition a;
    const auto cfg = small_config(6, s2, 12);
    const auto out = synthesize_domain(s, env, {sampler, gen, parser}, reference, cfg, &a);
    CHECK(a.generated >= a.after_pred);
    CHECK(a.after_pred >= a.after_dedup);
    CHECK(a.after_dedup >= a.after_no_para);
    CHECK(a.after_no_para == out.size());
    std::set<std::string> ref_q;
    for (const auto& r : reference) ref_q.insert(text::normalize_question(r.question));
    std::set<std::string> questions;
    std::set<std::string> forms;
    std::map<std::string, int> per_sequence;
    for (const auto& e : out) {
      CHECK(ref_q.count(text::normalize_question(e.question)) == 0);
      CHECK(questions.insert(text::normalize_question(e.question)).second);
      CHECK(forms.insert(e.db_id + "|" + canonical_sql(e.sql)).second);
      CHECK(++per_sequence[e.entity_sequence.to_string()] <= s2);
      CHECK(check_executable(e.sql, env, s.db_id()));
    }
    // deterministic
    const auto again = synthesize_domain(s, env, {sampler, gen, parser}, reference, cfg);
    REQUIRE(again.size() == out.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      CHECK(again[i].question == out[i].question);
      CHECK(again[i].sql == out[i].sql);
    }
  }
}

TEST_CASE("synthesize selects domains by mode and skips reference dedup for zero-shot domains") {
  const SchemaGraph train = fixtures::concert_singer();
  const SchemaGraph fresh = fixtures::department_management();
  ExecEnvironment env({train, fresh});
  StubSampler sampler;
  DistinctParser parser;
  FixedGenerator gen({{"Show everything .", -0.1}, {"List all rows .", -0.2}});
  const std::vector<AnnotatedPair> reference = {{"show everything", "SELECT 1", train.db_id()}};
  const SynthesisModels models{sampler, gen, parser};
  const auto cfg = small_config(2, 2, 2);

  auto ids = [](const SynthesisResult& r) {
    std::set<std::string> out;
    for (const auto& e : r.examples) out.insert(e.db_id);
    return out;
  };
  const auto t = synthesize({train}, {fresh}, SynthesisMode::kTrainDomains, models, env, reference, cfg);
  CHECK(ids(t) == std::set<std::string>{train.db_id()});
  for (const auto& e : t.examples) CHECK(e.question != "Show everything .");
  const auto z = synthesize({train}, {fresh}, SynthesisMode::kZeroShotDomains, models, env, reference, cfg);
  CHECK(ids(z) == std::set<std::string>{fresh.db_id()});
  bool kept = false;
  for (const auto& e : z.examples) kept |= e.question == "Show everything .";
  CHECK(kept);
  const auto b = synthesize({train}, {fresh}, SynthesisMode::kBoth, models, env, reference, cfg);
  CHECK(ids(b) == std::set<std::string>{train.db_id(), fresh.db_id()});
  CHECK(b.examples.size() == t.examples.size() + z.examples.size());
  REQUIRE(b.domains.size() == 2);
  CHECK_FALSE(b.domains[0].zero_shot);
  CHECK(b.domains[1].zero_shot);
  for (const auto& e : b.examples) {
    const SchemaGraph& s = e.db_id == train.db_id() ? train : fresh;
    CHECK_NOTHROW(extract_entity_sequence(e.sql, s));
    CHECK_NOTHROW(resolve_entities(s, e.entity_sequence));
  }
}

TEST_CASE("synthesis config validation and mode names") {
  CHECK_THROWS_AS(validate(small_config(0, 1, 1)), InvariantError);
  CHECK_THROWS_AS(validate(small_config(1, 0, 1)), InvariantError);
  CHECK_THROWS_AS(validate(small_config(1, 5, 4)), InvariantError);
  CHECK_NOTHROW(validate(SynthesisConfig{}));
  CHECK(SynthesisConfig{}.s1 == 80);
  CHECK(SynthesisConfig{}.s2 == 20);
  const auto c = synthesis_config_from_json(to_json(small_config(7, 3, 9)));
  CHECK(c.s1 == 7);
  CHECK(c.generator_beam == 9);
  CHECK(parse_synthesis_mode("train+dev") == SynthesisMode::kBoth);
  CHECK(parse_synthesis_mode("dev") == SynthesisMode::kZeroShotDomains);
  CHECK_THROWS_AS(parse_synthesis_mode("test"), InvariantError);
}

TEST_CASE("synthesized examples round trip through files") {
  std::vector<SynthesizedExample> ex = {cand("a?", "SELECT name FROM singer", -1.5)};
  ex[0].parser_score = -0.25;
  const std::string path = "/tmp/sqlaug_test_synth.json";
  save_synthesized(path, ex);
  const auto back = load_synthesized(path);
  REQUIRE(back.size() == 1);
  CHECK(back[0].question == ex[0].question);
  CHECK(back[0].sql == ex[0].sql);
  CHECK(back[0].entity_sequence == ex[0].entity_sequence);
  CHECK(back[0].generator_score == ex[0].generator_score);
  CHECK(back[0].parser_score == ex[0].parser_score);
  CHECK(to_pairs(back)[0] == AnnotatedPair{"a?", "SELECT name FROM singer", "concert_singer"});
}
