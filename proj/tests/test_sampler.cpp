#include <cmath>
#include <map>

#include "doctest.h"
#include "fixtures.hpp"
#include "sqlaug/sampler.hpp"

using namespace sqlaug;

namespace {

EntitySequence seq_of(const SchemaGraph& s, std::vector<std::pair<std::string, std::string>> es) {
  EntitySequence seq;
  seq.db_name = s.db_id();
  for (auto& [t, c] : es) seq.entities.push_back({t, c});
  return seq;
}

SamplerTrainConfig small_config(int epochs) {
  SamplerTrainConfig c;
  c.epochs = epochs;
  c.batch_size = 1;
  c.learning_rate = 1e-2;
  c.embed_dim = 16;
  c.hidden_dim = 24;
  c.seed = 7;
  return c;
}

}  // namespace

TEST_CASE("training lowers the NLL of a one-sequence corpus") {
  const auto s = fixtures::concert_singer();
  const auto seq = seq_of(s, {{"singer", "Name"}, {"singer", "Age"}});
  const auto m = train_sampler({s}, {seq}, small_config(50));
  REQUIRE(m.epoch_nll.size() == 50);
  CHECK(m.epoch_nll.back() < m.initial_nll);
  CHECK(std::isfinite(sequence_log_prob(m, s, seq)));
}

TEST_CASE("memorized sequence is reproduced greedily and is most probable") {
  const auto s = fixtures::department_management();
  const auto seq = seq_of(s, {{"head", "name"}, {"head", "born_state"}, {"head", "age"}});
  const auto m = train_sampler({s}, {seq}, small_config(200));
  for (const auto& got : sample_entities(m, s, 4, 0.0, 1)) {
    CHECK(got == seq);
  }
  const double lp = sequence_log_prob(m, s, seq);
  CHECK(lp <= 0.0);
  const std::vector<EntitySequence> rivals = {
      seq_of(s, {{"head", "name"}, {"head", "age"}}),
      seq_of(s, {{"head", "name"}, {"head", "born_state"}}),
      seq_of(s, {{"department", "Name"}}),
      seq_of(s, {{"head", "age"}, {"head", "born_state"}, {"head", "name"}}),
  };
  for (const auto& r : rivals) CHECK(sequence_log_prob(m, s, r) < lp);
}

TEST_CASE("sampling contract, masking and determinism") {
  const auto s = fixtures::concert_singer();
  const auto m = train_sampler({s}, {seq_of(s, {{"singer", "Name"}}), seq_of(s, {{"concert", "Year"}})},
                               small_config(3));
  const auto a = sample_entities(m, s, 25, 1.0, 99);
  const auto b = sample_entities(m, s, 25, 1.0, 99);
  CHECK(a == b);
  REQUIRE(a.size() == 25);
  for (const auto& seq : a) {
    CHECK(seq.db_name == "concert_singer");
    CHECK_FALSE(seq.entities.empty());
    CHECK(static_cast<int>(seq.entities.size()) <= m.config().max_length);
    CHECK_NOTHROW(resolve_entities(s, seq));
  }
  // A high temperature reaches the length cap without <EOS> or duplicates.
  for (const auto& seq : sample_entities(m, s, 20, 50.0, 3)) CHECK_NOTHROW(resolve_entities(s, seq));
  CHECK_THROWS_AS(sample_entities(m, s, 0, 1.0, 1), InvariantError);
}

TEST_CASE("every selection distribution sums to one over unmasked choices") {
  const auto s = fixtures::department_management();
  const auto m = train_sampler({s}, {seq_of(s, {{"head", "name"}})}, small_config(2));
  std::vector<int> path = {4, 5, 6, 1, 0};
  const auto dists = m.step_distributions(s, path, true);
  REQUIRE(dists.size() == path.size() + 1);
  for (std::size_t t = 0; t < dists.size(); ++t) {
    CHECK(dists[t].sum() == doctest::Approx(1.0).epsilon(1e-6));
    for (std::size_t u = 0; u < t; ++u) CHECK(dists[t](path[u]) == 0.0);
  }
}

TEST_CASE("log-prob of an untrained model with a zero pointer is uniform") {
  const auto s = fixtures::concert_singer();
  SamplerModel m(small_config(1), text::Vocabulary());
  m.params().get("pointer").value.setZero();
  const double k = static_cast<double>(s.num_columns());
  const auto seq = seq_of(s, {{"singer", "Country"}});
  CHECK(sequence_log_prob(m, s, seq) == doctest::Approx(std::log(1.0 / (k + 1)) + std::log(1.0 / k)));
  auto open = seq;
  open.terminated = false;
  CHECK(sequence_log_prob(m, s, open) == doctest::Approx(std::log(1.0 / (k + 1))));
  CHECK_THROWS_AS(sample_entities(m, s, 1, 1.0, 0), ModelError);
  CHECK_THROWS_AS(sequence_log_prob(m, s, seq_of(s, {{"singer", "Height"}})), ResolutionError);
}

TEST_CASE("training input errors") {
  const auto s = fixtures::concert_singer();
  CHECK_THROWS_AS(train_sampler({s}, {}, small_config(1)), ModelError);
  EntitySequence other = seq_of(s, {{"singer", "Name"}});
  other.db_name = "missing";
  CHECK_THROWS_AS(train_sampler({s}, {other}, small_config(1)), ResolutionError);
}

TEST_CASE("checkpoints reproduce log-probs exactly") {
  const auto s = fixtures::concert_singer();
  const auto seq = seq_of(s, {{"singer", "Name"}, {"singer", "Age"}});
  const auto m = train_sampler({s}, {seq}, small_config(5));
  const auto r = SamplerModel::from_json(nlohmann::json::parse(m.to_json().dump()));
  CHECK(sequence_log_prob(r, s, seq) == sequence_log_prob(m, s, seq));
  CHECK(r.epoch_nll == m.epoch_nll);
}

TEST_CASE("random entity sampler") {
  const auto one = fixtures::single_table("d", "t", {{"x", ColumnType::kNumber}});
  for (const auto& seq : sample_random_entities(one, 10, {0.0, 1.0}, 5)) {
    REQUIRE(seq.entities.size() == 1);
    CHECK(seq.entities[0] == Entity{"t", "x"});
  }
  CHECK_THROWS_AS(sample_random_entities(one, 1, {0.0, 1.0, 1.0}, 5), InvariantError);

  const auto s = fixtures::department_management();
  const int n = 20000;
  const double k = static_cast<double>(s.num_columns());
  std::map<std::string, int> freq;
  for (const auto& seq : sample_random_entities(s, n, {0.0, 1.0}, 11)) freq[seq.entities[0].to_string()]++;
  CHECK(freq.size() == s.num_columns());
  const double mean = n / k;
  const double sd = std::sqrt(n * (1.0 / k) * (1.0 - 1.0 / k));
  for (const auto& [name, c] : freq) CHECK(std::abs(c - mean) < 3.0 * sd);

  for (const auto& seq : sample_random_entities(s, 50, {0.0, 1.0, 2.0, 1.0}, 2)) {
    CHECK(seq.entities.size() >= 1);
    CHECK(seq.entities.size() <= 3);
    CHECK_NOTHROW(resolve_entities(s, seq));
  }
  const auto lengths = empirical_length_distribution({seq_of(s, {{"head", "name"}}), seq_of(s, {})});
  CHECK(lengths == LengthDistribution{0.0, 1.0});
}
