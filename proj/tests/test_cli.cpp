#include <filesystem>
#include <map>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "sqlaug/config.hpp"

using namespace sqlaug;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("sqlaug_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// A toy corpus with a config small enough to run every command in seconds.
fs::path tiny_toy(const std::string& name) {
  const fs::path dir = fresh_dir(name);
  REQUIRE(run_cli({"make-toy", "--out", dir.string(), "--seed", "3", "--pairs", "12"}).code == 0);
  RunConfig c = load_run_config((dir / "config.json").string());
  c.sampler.epochs = 1;
  c.generator.epochs = 1;
  c.parser.epochs = 2;
  c.synthesis.s1 = 3;
  c.synthesis.s2 = 2;
  c.synthesis.generator_beam = 3;
  c.synthesis.parser_beam = 3;
  c.parser.beam = 3;
  c.alpha_sweep = {{0.3, 0.1}, {0.0, 0.0}};
  save_run_config((dir / "config.json").string(), c);
  return dir;
}

std::map<std::string, std::string> hash_tree(const fs::path& dir) {
  std::map<std::string, std::string> h;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) h[fs::relative(e.path(), dir).string()] = sha256_hex(read_file(e.path().string()));
  }
  return h;
}

}  // namespace

TEST_CASE("run config round trip and seed derivation") {
  RunConfig c = cli::toy_run_config(11);
  c.zero_shot_domains = {"museum_visit"};
  const auto j = to_json(c);
  const RunConfig back = run_config_from_json(nlohmann::json::parse(j.dump()));
  CHECK(to_json(back).dump() == j.dump());
  CHECK(back.parser.seed == derive_seed(11, "parser"));
  CHECK(back.sampler.seed == derive_seed(11, "sampler"));
  CHECK(back.generator.seed != back.parser.seed);
  CHECK(j["parser"].count("seed") == 0);
  CHECK(config_hash(back) == config_hash(c));

  RunConfig other = c;
  other.seed = 12;
  apply_seed(other);
  CHECK(config_hash(other) != config_hash(c));
}

TEST_CASE("run config defaults and validation") {
  const RunConfig d = run_config_from_json(nlohmann::json::object());
  CHECK(d.synthesis.s1 == 80);
  CHECK(d.synthesis.s2 == 20);
  CHECK(d.mixture.alpha_train == doctest::Approx(0.3));
  CHECK(d.mixture.alpha_new == doctest::Approx(0.1));
  CHECK(d.output == "run");
  CHECK_THROWS_AS(validate_paths(d), ParseError);
  CHECK_THROWS_AS(run_config_from_json(nlohmann::json{{"timeout", 0}}), InvariantError);
  CHECK_THROWS_AS(run_config_from_json(nlohmann::json{{"alpha_sweep", {{0.1}}}}), ParseError);
  CHECK_THROWS_AS(run_config_from_json(nlohmann::json{{"alpha_sweep", {{-0.1, 0.2}}}}), InvariantError);
  CHECK_THROWS_AS(run_config_from_json(nlohmann::json{{"seed", "x"}}), ParseError);
  CHECK_THROWS_AS(load_run_config("/nonexistent/config.json"), ParseError);

  const RunConfig rel = run_config_from_json(nlohmann::json{{"paths", {{"train", "a/b.json"}}}}, "/data");
  CHECK(rel.resolve(rel.train) == "/data/a/b.json");
  CHECK(rel.resolve("/abs.json") == "/abs.json");
}

TEST_CASE("components hash tracks component inputs only") {
  const fs::path dir = fresh_dir("hash");
  write_file((dir / "tables.json").string(), "[]");
  write_file((dir / "train.json").string(), "[]");
  RunConfig c = run_config_from_json(nlohmann::json{{"paths", {{"schemas", "tables.json"}, {"train", "train.json"}}}},
                                     dir.string());
  const std::string h = components_hash(c);
  RunConfig s = c;
  s.synthesis.s1 = 5;
  s.mixture.alpha_train = 0.9;
  CHECK(components_hash(s) == h);
  RunConfig p = c;
  p.parser.epochs += 1;
  CHECK(components_hash(p) != h);
  write_file((dir / "train.json").string(), "[ ]");
  CHECK(components_hash(c) != h);
}

TEST_CASE("cli usage errors") {
  CHECK(run_cli({}).code != 0);
  CHECK(run_cli({"bogus"}).code != 0);
  const Result missing = run_cli({"train-components", "--config", "/nonexistent/config.json"});
  CHECK(missing.code != 0);
  CHECK(missing.err.find("train-components") != std::string::npos);
  CHECK(missing.err.find("config file not found") != std::string::npos);
  const Result help = run_cli({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("synthesize") != std::string::npos);
}

TEST_CASE("cli full chain is deterministic and detects stale checkpoints") {
  const fs::path dir = tiny_toy("chain");
  const std::string config = (dir / "config.json").string();
  const fs::path run = dir / "run";

  auto chain = [&] {
    Result r = run_cli({"train-components", "--config", config});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    r = run_cli({"synthesize", "--config", config, "--mode", "train+dev"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(r.out.find("museum_visit*") != std::string::npos);
    r = run_cli({"train-student", "--config", config});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(r.out.find("student_em") != std::string::npos);
    r = run_cli({"train-student", "--config", config, "--sweep"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    r = run_cli({"evaluate", "--config", config, "--model", "teacher", "--out", (run / "eval.json").string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(r.out.find("exact match") != std::string::npos);
    r = run_cli({"analyze", (dir / "train.json").string(), (run / "augmented_train_dev.json").string(), "--config",
                 config, "--out", (run / "analysis.json").string(), "--csv", (run / "analysis.csv").string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    return hash_tree(run);
  };

  const auto first = chain();
  for (const char* f : {"sampler.json", "generator.json", "teacher.json", "components_manifest.json",
                        "augmented_train_dev.json", "synthesis_train_dev.json", "student.json",
                        "mixture_manifest.json", "student_report.json", "student_sweep.json", "eval.json",
                        "analysis.json", "analysis.csv"}) {
    CHECK_MESSAGE(first.count(f) == 1, f);
  }
  const auto second = chain();
  CHECK(first == second);

  const auto report = nlohmann::json::parse(read_file((run / "student_sweep.json").string()));
  CHECK(report["rows"].size() == 2);
  const auto manifest = nlohmann::json::parse(read_file((run / "mixture_manifest.json").string()));
  const auto examples = nlohmann::json::parse(read_file((dir / "train.json").string()));
  CHECK(manifest.size() >= examples.size());

  // Synthesis settings do not invalidate components; parser settings do.
  CHECK(run_cli({"synthesize", "--config", config, "--mode", "dev", "--s1", "2"}).code == 0);
  CHECK(fs::exists(run / "augmented_dev.json"));
  RunConfig c = load_run_config(config);
  c.parser.epochs += 1;
  save_run_config(config, c);
  const Result stale = run_cli({"synthesize", "--config", config});
  CHECK(stale.code != 0);
  CHECK(stale.err.find("checkpoint mismatch") != std::string::npos);
}

TEST_CASE("analyze keeps going past a bad file") {
  const fs::path dir = fresh_dir("analyze");
  REQUIRE(run_cli({"make-toy", "--out", dir.string(), "--pairs", "10"}).code == 0);
  const Result r = run_cli({"analyze", (dir / "train.json").string(), (dir / "missing.json").string(), "--schemas",
                            (dir / "tables.json").string()});
  CHECK(r.code == 0);
  CHECK(r.err.find("missing.json") != std::string::npos);
  CHECK(r.out.find("H~ col") != std::string::npos);
  CHECK(run_cli({"analyze", (dir / "missing.json").string(), "--schemas", (dir / "tables.json").string()}).code != 0);
  CHECK(run_cli({"analyze", (dir / "train.json").string()}).code != 0);
}
