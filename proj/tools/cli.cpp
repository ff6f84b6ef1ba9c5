#include "cli.hpp"

#include <filesystem>
#include <iomanip>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "sqlaug/analysis.hpp"
#include "sqlaug/toy.hpp"

namespace sqlaug::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kComponentsManifest = "components_manifest.json";

struct StageError : Error {
  StageError(std::string stage, const std::string& msg) : Error(msg), stage(std::move(stage)) {}
  std::string stage;
};

// Flags that override config values.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> s1, s2, beam, parser_beam;
  std::optional<double> alpha_train, alpha_new, timeout, temperature;
  std::optional<std::string> training_mode, output;

  void add_to(CLI::App* app) {
    app->add_option("--seed", seed, "Global seed");
    app->add_option("--s1", s1, "Entity sequences per domain");
    app->add_option("--s2", s2, "Retained examples per entity sequence");
    app->add_option("--beam", beam, "Question generator beam size");
    app->add_option("--parser-beam", parser_beam, "Parser beam size");
    app->add_option("--alpha-train", alpha_train, "Weight of augmented training-domain examples");
    app->add_option("--alpha-new", alpha_new, "Weight of augmented zero-shot-domain examples");
    app->add_option("--timeout", timeout, "Statement timeout in seconds");
    app->add_option("--temperature", temperature, "Sampler temperature");
    app->add_option("--training-mode", training_mode, "weighted-joint, pretrain-finetune or combine");
    app->add_option("--output", output, "Output directory");
  }

  void apply(RunConfig& c) const {
    if (seed) c.seed = *seed;
    if (s1) c.synthesis.s1 = *s1;
    if (s2) c.synthesis.s2 = *s2;
    if (beam) c.synthesis.generator_beam = *beam;
    if (parser_beam) {
      c.synthesis.parser_beam = *parser_beam;
      c.parser.beam = *parser_beam;
    }
    if (alpha_train) c.mixture.alpha_train = *alpha_train;
    if (alpha_new) c.mixture.alpha_new = *alpha_new;
    if (timeout) c.timeout = *timeout;
    if (temperature) c.synthesis.temperature = *temperature;
    if (training_mode) c.mixture.mode = parse_training_mode(*training_mode);
    if (output) c.output = *output;
    validate(c.synthesis);
    validate(c.mixture);
    if (!(c.timeout > 0.0)) throw InvariantError("timeout must be positive");
    apply_seed(c);
  }
};

std::string write_json(const fs::path& path, const nlohmann::ordered_json& j) {
  const std::string text = j.dump(2) + "\n";
  write_file(path.string(), text);
  return sha256_hex(text);
}

nlohmann::json read_json(const fs::path& path) {
  if (!fs::exists(path)) throw ParseError("missing file " + path.string());
  try {
    return nlohmann::json::parse(read_file(path.string()));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

struct Loaded {
  RunConfig config;
  fs::path out;
  std::vector<SchemaGraph> schemas;
  std::vector<AnnotatedPair> train;
};

Loaded load(const std::string& config_path, const Overrides& ov, bool create_output) {
  Loaded l;
  l.config = load_run_config(config_path);
  ov.apply(l.config);
  validate_paths(l.config);
  l.out = l.config.resolve(l.config.output);
  if (create_output) fs::create_directories(l.out);
  l.schemas = load_schemas(l.config.resolve(l.config.schemas));
  l.train = load_examples(l.config.resolve(l.config.train), l.schemas);
  for (const auto& d : l.config.zero_shot_domains) {
    if (!find_schema(l.schemas, d)) throw ResolutionError("zero-shot domain '" + d + "' has no schema");
  }
  return l;
}

std::vector<SchemaGraph> train_domains(const Loaded& l) {
  std::set<std::string> used;
  for (const auto& p : l.train) used.insert(p.db_id);
  const std::set<std::string> zs(l.config.zero_shot_domains.begin(), l.config.zero_shot_domains.end());
  std::vector<SchemaGraph> out;
  for (const auto& s : l.schemas) {
    if (used.count(s.db_id()) && !zs.count(s.db_id())) out.push_back(s);
  }
  return out;
}

std::vector<SchemaGraph> zero_shot_domains(const Loaded& l) {
  std::vector<SchemaGraph> out;
  for (const auto& d : l.config.zero_shot_domains) out.push_back(require_schema(l.schemas, d));
  return out;
}

void check_components(const Loaded& l) {
  const auto manifest = read_json(l.out / kComponentsManifest);
  const std::string expected = components_hash(l.config);
  const std::string found = manifest.value("components_hash", "");
  if (found != expected) {
    throw StageError("checkpoint", "checkpoint mismatch: components were trained with components hash " + found +
                                       ", current config gives " + expected);
  }
}

std::string mode_tag(SynthesisMode m) {
  switch (m) {
    case SynthesisMode::kTrainDomains: return "train";
    case SynthesisMode::kZeroShotDomains: return "dev";
    case SynthesisMode::kBoth: return "train_dev";
  }
  return "train";
}

std::string fmt(double x, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << x;
  return s.str();
}

// ------------------------------------------------------------------ commands

int cmd_train_components(const std::string& config_path, const Overrides& ov, std::ostream& out,
                         std::ostream& err) {
  Loaded l = load(config_path, ov, true);
  const RunConfig& c = l.config;
  if (l.train.empty()) throw StageError("data", "training set is empty");
  const ComponentData data = component_training_data(l.train, l.schemas);
  err << "[train-components] " << l.train.size() << " examples, " << data.skipped << " without resolvable entities\n";

  err << "[train-components] entity sampler\n";
  SamplerModel sampler = [&] {
    try {
      return train_sampler(l.schemas, data.sequences, c.sampler);
    } catch (const Error& e) {
      throw StageError("sampler", e.what());
    }
  }();
  err << "[train-components] question generator\n";
  Seq2SeqGenerator generator = [&] {
    try {
      return train_generator(data.generator_pairs, c.generator);
    } catch (const Error& e) {
      throw StageError("generator", e.what());
    }
  }();
  err << "[train-components] teacher parser\n";
  GrammarParser teacher = [&] {
    try {
      return train_parser(l.train, l.schemas, c.parser);
    } catch (const Error& e) {
      throw StageError("parser", e.what());
    }
  }();

  sampler.save((l.out / "sampler.json").string());
  generator.save((l.out / "generator.json").string());
  teacher.save((l.out / "teacher.json").string());

  nlohmann::ordered_json m;
  m["command"] = "train-components";
  m["config_hash"] = config_hash(c);
  m["components_hash"] = components_hash(c);
  m["seed"] = c.seed;
  m["component_seeds"] = {{"sampler", c.sampler.seed}, {"generator", c.generator.seed}, {"parser", c.parser.seed}};
  m["data"] = {{"schemas_sha256", sha256_hex(read_file(c.resolve(c.schemas)))},
               {"train_sha256", sha256_hex(read_file(c.resolve(c.train)))},
               {"train_examples", l.train.size()},
               {"unresolved_examples", data.skipped}};
  nlohmann::ordered_json ck;
  for (const char* name : {"sampler", "generator", "teacher"}) {
    const fs::path p = l.out / (std::string(name) + ".json");
    ck[name] = {{"file", p.filename().string()}, {"sha256", sha256_hex(read_file(p.string()))}};
  }
  m["checkpoints"] = ck;
  m["training"] = {{"sampler_nll", {sampler.initial_nll, sampler.epoch_nll.empty() ? 0.0 : sampler.epoch_nll.back()}},
                   {"generator_loss",
                    {generator.initial_loss, generator.epoch_loss.empty() ? 0.0 : generator.epoch_loss.back()}},
                   {"parser_loss",
                    {teacher.epoch_loss.empty() ? 0.0 : teacher.epoch_loss.front(),
                     teacher.epoch_loss.empty() ? 0.0 : teacher.epoch_loss.back()}}};
  write_json(l.out / kComponentsManifest, m);
  out << "wrote sampler.json, generator.json, teacher.json and " << kComponentsManifest << " to " << l.out.string()
      << "\n";
  return 0;
}

int cmd_synthesize(const std::string& config_path, const std::string& mode_name, const Overrides& ov,
                   std::ostream& out, std::ostream& err) {
  const SynthesisMode mode = parse_synthesis_mode(mode_name);
  Loaded l = load(config_path, ov, true);
  const RunConfig& c = l.config;
  check_components(l);
  const SamplerModel sampler = SamplerModel::load((l.out / "sampler.json").string());
  const Seq2SeqGenerator generator = Seq2SeqGenerator::load((l.out / "generator.json").string());
  const GrammarParser teacher = GrammarParser::load((l.out / "teacher.json").string());
  if (mode != SynthesisMode::kTrainDomains && c.zero_shot_domains.empty()) {
    err << "[synthesize] warning: no zero_shot_domains configured\n";
  }

  ExecEnvironment env(l.schemas, c.timeout);
  if (!c.databases.empty()) env.add_directory(c.resolve(c.databases));
  const ModelEntitySampler entity_sampler(sampler);
  const SynthesisModels models{entity_sampler, generator, teacher};
  err << "[synthesize] mode " << synthesis_mode_name(mode) << "\n";
  SynthesisResult result;
  try {
    result = synthesize(train_domains(l), zero_shot_domains(l), mode, models, env, l.train, c.synthesis);
  } catch (const Error& e) {
    throw StageError("synthesis", e.what());
  }

  const std::string tag = mode_tag(mode);
  save_synthesized((l.out / ("augmented_" + tag + ".json")).string(), result.examples);
  nlohmann::ordered_json report;
  report["command"] = "synthesize";
  report["config_hash"] = config_hash(c);
  report["components_hash"] = components_hash(c);
  report["mode"] = synthesis_mode_name(mode);
  report["synthesis"] = to_json(c.synthesis);
  report["augmented_sha256"] = sha256_hex(read_file((l.out / ("augmented_" + tag + ".json")).string()));
  nlohmann::ordered_json domains = nlohmann::ordered_json::array();
  Attrition total;
  for (const auto& d : result.domains) {
    domains.push_back(to_json(d));
    total.sequences += d.counts.sequences;
    total.generated += d.counts.generated;
    total.after_pred += d.counts.after_pred;
    total.after_dedup += d.counts.after_dedup;
    total.after_no_para += d.counts.after_no_para;
  }
  report["domains"] = domains;
  report["total"] = to_json(DomainReport{"all", false, total});
  write_json(l.out / ("synthesis_" + tag + ".json"), report);

  out << "db_id                     sequences  generated  pred  dedup  no_para\n";
  for (const auto& d : result.domains) {
    out << std::left << std::setw(26) << (d.db_id + (d.zero_shot ? "*" : "")) << std::right << std::setw(9)
        << d.counts.sequences << std::setw(11) << d.counts.generated << std::setw(6) << d.counts.after_pred
        << std::setw(7) << d.counts.after_dedup << std::setw(9) << d.counts.after_no_para << "\n";
  }
  out << "total augmented examples: " << result.examples.size() << " (augmented_" << tag << ".json)\n";
  return 0;
}

struct StudentRun {
  double alpha_train;
  double alpha_new;
  EvalResult eval;
  std::vector<double> curve;
};

int cmd_train_student(const std::string& config_path, bool sweep, const Overrides& ov, std::ostream& out,
                      std::ostream& err) {
  Loaded l = load(config_path, ov, true);
  const RunConfig& c = l.config;
  if (c.heldout.empty()) throw StageError("data", "paths.heldout is required for the evaluation report");
  check_components(l);
  const auto heldout = load_examples(c.resolve(c.heldout), l.schemas);
  const fs::path aug_path = c.augmented.empty() ? l.out / "augmented_train_dev.json" : fs::path(c.resolve(c.augmented));
  const auto augmented = load_synthesized(aug_path.string());
  const std::set<std::string> zs(c.zero_shot_domains.begin(), c.zero_shot_domains.end());
  std::vector<SynthesizedExample> aug_train, aug_new;
  for (const auto& e : augmented) (zs.count(e.db_id) ? aug_new : aug_train).push_back(e);

  const GrammarParser teacher = GrammarParser::load((l.out / "teacher.json").string());
  const EvalResult teacher_eval = evaluate_parser(teacher, heldout, l.schemas, c.parser.beam);

  std::vector<std::pair<double, double>> alphas;
  if (sweep) {
    if (c.alpha_sweep.empty()) throw StageError("config", "--sweep needs a non-empty alpha_sweep");
    alphas = c.alpha_sweep;
  } else {
    alphas.push_back({c.mixture.alpha_train, c.mixture.alpha_new});
  }

  std::vector<StudentRun> runs;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    TrainingMixtureConfig mc = c.mixture;
    mc.alpha_train = alphas[i].first;
    mc.alpha_new = alphas[i].second;
    const auto mixture = build_training_mixture(l.train, aug_train, aug_new, mc);
    err << "[train-student] " << training_mode_name(mc.mode) << " alpha_train=" << mc.alpha_train
        << " alpha_new=" << mc.alpha_new << " on " << mixture.size() << " examples\n";
    GrammarParser student = [&] {
      try {
        return train_student(mixture, l.schemas, c.parser, mc.mode);
      } catch (const Error& e) {
        throw StageError("student", e.what());
      }
    }();
    runs.push_back({mc.alpha_train, mc.alpha_new, evaluate_parser(student, heldout, l.schemas, c.parser.beam),
                    student.epoch_loss});
    if (!sweep) {
      student.save((l.out / "student.json").string());
      write_json(l.out / "mixture_manifest.json", mixture_manifest(mixture));
    }
  }

  nlohmann::ordered_json report;
  report["command"] = sweep ? "train-student --sweep" : "train-student";
  report["config_hash"] = config_hash(c);
  report["components_hash"] = components_hash(c);
  report["mode"] = training_mode_name(c.mixture.mode);
  report["augmented_sha256"] = sha256_hex(read_file(aug_path.string()));
  report["counts"] = {{"train", l.train.size()}, {"aug_train", aug_train.size()}, {"aug_new", aug_new.size()},
                      {"heldout", heldout.size()}};
  report["teacher"] = {{"exact_match", teacher_eval.exact_match}, {"correct", teacher_eval.correct}};
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : runs) {
    nlohmann::ordered_json row;
    row["alpha_train"] = r.alpha_train;
    row["alpha_new"] = r.alpha_new;
    row["student_exact_match"] = r.eval.exact_match;
    row["student_correct"] = r.eval.correct;
    row["teacher_exact_match"] = teacher_eval.exact_match;
    row["delta"] = r.eval.exact_match - teacher_eval.exact_match;
    row["training_curve"] = r.curve;
    rows.push_back(row);
  }
  report["rows"] = rows;
  write_json(l.out / (sweep ? "student_sweep.json" : "student_report.json"), report);

  out << "held-out examples: " << heldout.size() << "\n";
  out << "alpha_train  alpha_new  teacher_em  student_em  delta\n";
  for (const auto& r : runs) {
    out << std::setw(11) << fmt(r.alpha_train, 2) << std::setw(11) << fmt(r.alpha_new, 2) << std::setw(12)
        << fmt(teacher_eval.exact_match) << std::setw(12) << fmt(r.eval.exact_match) << std::setw(8)
        << fmt(r.eval.exact_match - teacher_eval.exact_match) << "\n";
  }
  return 0;
}

int cmd_evaluate(const std::string& config_path, const std::string& model, const std::string& data_path,
                 const std::string& out_path, const Overrides& ov, std::ostream& out) {
  Loaded l = load(config_path, ov, false);
  const RunConfig& c = l.config;
  fs::path model_path = model;
  if (model == "teacher" || model == "student") model_path = l.out / (model + ".json");
  const GrammarParser parser = GrammarParser::load(model_path.string());
  const std::string data = data_path.empty() ? c.resolve(c.heldout) : data_path;
  if (data.empty()) throw StageError("data", "no evaluation data (pass --data or set paths.heldout)");
  const auto examples = load_examples(data, l.schemas);
  const EvalResult r = evaluate_parser(parser, examples, l.schemas, c.parser.beam);
  out << "exact match: " << r.correct << "/" << r.total << " = " << fmt(r.exact_match) << " (no prediction for "
      << r.no_prediction << ")\n";
  if (!out_path.empty()) {
    nlohmann::ordered_json j;
    j["command"] = "evaluate";
    j["config_hash"] = config_hash(c);
    j["model_sha256"] = sha256_hex(read_file(model_path.string()));
    j["data_sha256"] = sha256_hex(read_file(data));
    j["total"] = r.total;
    j["correct"] = r.correct;
    j["no_prediction"] = r.no_prediction;
    j["exact_match"] = r.exact_match;
    write_json(out_path, j);
  }
  return 0;
}

int cmd_analyze(const std::vector<std::string>& files, const std::string& schemas_path, const std::string& config_path,
                const std::string& out_path, const std::string& csv_path, std::ostream& out, std::ostream& err) {
  std::string schemas_file = schemas_path;
  std::string hash;
  if (!config_path.empty()) {
    const RunConfig c = load_run_config(config_path);
    if (schemas_file.empty()) schemas_file = c.resolve(c.schemas);
    hash = config_hash(c);
  }
  if (schemas_file.empty()) throw StageError("config", "pass --schemas or --config");
  const auto schemas = load_schemas(schemas_file);
  std::vector<std::pair<std::string, analysis::DatasetStats>> columns;
  nlohmann::ordered_json report;
  report["command"] = "analyze";
  report["config_hash"] = hash;
  report["schemas_sha256"] = sha256_hex(read_file(schemas_file));
  nlohmann::ordered_json datasets = nlohmann::ordered_json::array();
  int failures = 0;
  for (const auto& f : files) {
    try {
      const auto examples = load_examples(f, schemas);
      auto stats = analysis::dataset_stats(examples, schemas);
      nlohmann::ordered_json d;
      d["file"] = fs::path(f).filename().string();
      d["sha256"] = sha256_hex(read_file(f));
      d["stats"] = analysis::stats_to_json(stats);
      datasets.push_back(d);
      columns.emplace_back(fs::path(f).stem().string(), std::move(stats));
    } catch (const Error& e) {
      ++failures;
      err << "[analyze] " << f << ": " << e.what() << "\n";
    }
  }
  report["datasets"] = datasets;
  report["failed_files"] = failures;
  if (!columns.empty()) out << analysis::format_report(columns);
  if (!out_path.empty()) write_json(out_path, report);
  if (!csv_path.empty()) write_file(csv_path, analysis::per_db_csv(columns));
  return columns.empty() && !files.empty() ? 1 : 0;
}

int cmd_make_toy(const std::string& dir, std::uint64_t seed, int pairs, std::ostream& out) {
  ToyConfig tc;
  tc.seed = seed;
  tc.pairs_per_domain = pairs;
  const ToyCorpus corpus = make_toy_corpus(tc);
  save_toy_corpus(corpus, dir, tc);
  RunConfig rc = toy_run_config(seed);
  rc.zero_shot_domains = {corpus.zero_shot_domain};
  save_run_config((fs::path(dir) / "config.json").string(), rc);
  out << "toy corpus: " << corpus.schemas.size() << " schemas, " << corpus.train.size() << " training pairs, "
      << corpus.held_out.size() << " held-out pairs in zero-shot domain " << corpus.zero_shot_domain << "\n"
      << "config: " << (fs::path(dir) / "config.json").string() << "\n";
  return 0;
}

}  // namespace

RunConfig toy_run_config(std::uint64_t seed) {
  RunConfig c;
  c.seed = seed;
  c.schemas = "tables.json";
  c.train = "train.json";
  c.heldout = "heldout.json";
  c.databases = "database";
  c.output = "run";
  c.sampler.epochs = 30;
  c.generator.epochs = 30;
  c.generator.learning_rate = 3e-3;
  c.parser.epochs = 20;
  c.synthesis.s1 = 80;
  c.synthesis.s2 = 20;
  c.synthesis.generator_beam = 20;
  c.alpha_sweep = {{0.3, 0.1}, {0.3, 0.3}, {0.1, 0.1}, {0.5, 0.5}};
  apply_seed(c);
  return c;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Text-to-SQL data augmentation toolkit"};
  app.name("sqlaug");
  app.require_subcommand(1);

  std::string config_path;
  Overrides ov;

  auto* train = app.add_subcommand("train-components", "Train the entity sampler, question generator and teacher parser");
  train->add_option("--config", config_path, "Run config (JSON)")->required();
  ov.add_to(train);

  std::string mode = "train+dev";
  auto* synth = app.add_subcommand("synthesize", "Synthesize augmented examples with the trained components");
  synth->add_option("--config", config_path, "Run config (JSON)")->required();
  synth->add_option("--mode", mode, "train, dev or train+dev");
  ov.add_to(synth);

  bool sweep = false;
  auto* student = app.add_subcommand("train-student", "Train a student parser on original plus augmented data");
  student->add_option("--config", config_path, "Run config (JSON)")->required();
  student->add_flag("--sweep", sweep, "One student per alpha_sweep entry");
  ov.add_to(student);

  std::string model = "student", data, eval_out;
  auto* evaluate = app.add_subcommand("evaluate", "Exact match of a parser checkpoint");
  evaluate->add_option("--config", config_path, "Run config (JSON)")->required();
  evaluate->add_option("--model", model, "teacher, student or a checkpoint path");
  evaluate->add_option("--data", data, "Examples file (default: paths.heldout)");
  evaluate->add_option("--out", eval_out, "Write the result as JSON");
  ov.add_to(evaluate);

  std::vector<std::string> files;
  std::string schemas, analyze_out, csv;
  auto* analyze = app.add_subcommand("analyze", "Dataset statistics side by side");
  analyze->add_option("files", files, "Example files (Spider format or augmented output)")->required();
  analyze->add_option("--schemas", schemas, "Tables file");
  analyze->add_option("--config", config_path, "Run config (for the schemas path)");
  analyze->add_option("--out", analyze_out, "Write the report as JSON");
  analyze->add_option("--csv", csv, "Write per-database rows as CSV");

  std::string toy_dir;
  std::uint64_t toy_seed = 0;
  int toy_pairs = ToyConfig{}.pairs_per_domain;
  auto* toy = app.add_subcommand("make-toy", "Write the synthetic multi-domain toy corpus and a run config");
  toy->add_option("--out", toy_dir, "Output directory")->required();
  toy->add_option("--seed", toy_seed, "Corpus and run seed");
  toy->add_option("--pairs", toy_pairs, "Pairs per domain");

  std::vector<std::string> argv_store = {"sqlaug"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  std::string stage = app.get_subcommands().front()->get_name();
  try {
    if (*train) return cmd_train_components(config_path, ov, out, err);
    if (*synth) return cmd_synthesize(config_path, mode, ov, out, err);
    if (*student) return cmd_train_student(config_path, sweep, ov, out, err);
    if (*evaluate) return cmd_evaluate(config_path, model, data, eval_out, ov, out);
    if (*analyze) return cmd_analyze(files, schemas, config_path, analyze_out, csv, out, err);
    if (*toy) return cmd_make_toy(toy_dir, toy_seed, toy_pairs, out);
  } catch (const StageError& e) {
    err << "sqlaug " << stage << " [" << e.stage << "]: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    err << "sqlaug " << stage << " [validation]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "sqlaug " << stage << ": " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace sqlaug::cli
