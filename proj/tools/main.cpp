#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "nyaya/corpus.hpp"
#include "nyaya/harness.hpp"
#include "nyaya/logic.hpp"
#include "nyaya/report.hpp"
#include "nyaya/trace_parser.hpp"
#include "nyaya/validator.hpp"

namespace fs = std::filesystem;
using namespace nyaya;

namespace {

// Exit codes: 0 ok, 1 domain failure (invalid trace, verdict mismatch),
// 2 usage error, 3 unreadable path / IO, 4 schema-invalid input.
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitSchema = 4;

struct CliError {
  int code;
  std::string message;
};

std::string read_file_or_throw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{kExitIo, "cannot read " + path};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_or_throw(const std::string& path, std::string_view content) {
  if (fs::path parent = fs::path(path).parent_path(); !parent.empty()) {
    std::error_code ec;
    fs::create_directories(parent, ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError{kExitIo, "cannot write " + path};
  out << content;
}

FallacySet fallacy_set_from_name(const std::string& name) {
  if (name == "canonical") return FallacySet::canonical;
  if (name == "alternate") return FallacySet::alternate;
  if (name == "either") return FallacySet::either;
  throw CliError{kExitUsage, "unknown fallacy set: " + name};
}

std::vector<int> parse_tier_list(const std::string& spec) {
  std::vector<int> tiers;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      tiers.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw CliError{kExitUsage, "bad tier list: " + spec};
    }
  }
  if (tiers.empty()) throw CliError{kExitUsage, "empty tier list"};
  return tiers;
}

template <typename Fn>
void parallel_for(std::size_t count, bool concurrent, Fn&& fn) {
  if (!concurrent || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  unsigned workers = std::min<std::size_t>(std::thread::hardware_concurrency(), count);
  if (workers < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

int cmd_validate(const std::vector<std::string>& paths, const ValidatorConfig& config,
                 bool corpus_mode, const std::string& format) {
  ParseOptions options;
  options.corpus_mode = corpus_mode;
  options.require_leading_samshaya = config.require_leading_samshaya;

  struct Outcome {
    std::string text;
    bool valid = false;
  };
  std::vector<Outcome> outcomes(paths.size());
  std::vector<std::optional<CliError>> errors(paths.size());

  parallel_for(paths.size(), true, [&](std::size_t i) {
    std::string content;
    try {
      content = read_file_or_throw(paths[i]);
    } catch (const CliError& e) {
      errors[i] = e;
      return;
    }
    ParsedDocument doc = parse_trace(content, options);
    ValidationReport report = validate(doc, config);
    outcomes[i].valid = report.valid;
    if (format == "json") {
      outcomes[i].text = validation_to_json_text(paths[i], doc, report);
    } else {
      std::ostringstream out;
      out << paths[i] << ": " << (report.valid ? "valid" : "invalid") << "\n";
      for (const auto& v : report.violations) {
        out << "  - " << v.category() << ": " << v.message << "\n";
      }
      out << "  phases " << doc.trace.phases_present() << "/6, syllogisms "
          << report.syllogism_count << ", quality " << report.quality_score << "/10\n";
      outcomes[i].text = out.str();
    }
  });

  bool all_valid = true;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (errors[i]) throw *errors[i];
    std::cout << outcomes[i].text;
    all_valid = all_valid && outcomes[i].valid;
  }
  return all_valid ? 0 : kExitDomain;
}

struct EvaluateArgs {
  std::string corpus;
  std::string replay;
  std::string endpoint;
  std::string judge_endpoint;
  std::string out;
  std::string tiers = "1,3";
  int max_new_tokens = 0;
  double temperature = 0.0;
  bool no_format_prompt = false;
  int samples = 1;
};

int cmd_evaluate(const EvaluateArgs& args, const ValidatorConfig& validator_config) {
  EvalConfig config;
  config.tiers = parse_tier_list(args.tiers);
  config.max_new_tokens = args.max_new_tokens;
  config.temperature = args.temperature;
  config.format_prompting = !args.no_format_prompt;
  config.samples = args.samples;
  try {
    config.check();
  } catch (const std::exception& e) {
    throw CliError{kExitUsage, e.what()};
  }

  std::vector<std::string> files;
  try {
    files = list_corpus_files(args.corpus);
  } catch (const std::exception& e) {
    throw CliError{kExitIo, e.what()};
  }
  if (files.empty()) throw CliError{kExitIo, "no corpus files under " + args.corpus};

  ParseOptions corpus_options;
  corpus_options.corpus_mode = true;
  std::vector<EvalExample> examples;
  for (const auto& path : files) {
    ParsedDocument doc = parse_trace(read_file_or_throw(path), corpus_options);
    if (!doc.frontmatter || doc.frontmatter->id.empty()) {
      throw CliError{kExitSchema, "corpus file lacks an id: " + path};
    }
    EvalExample example;
    example.id = doc.frontmatter->id;
    example.problem_statement = doc.problem_statement;
    example.frontmatter = *doc.frontmatter;
    fs::path problem_path = fs::path(path).parent_path() / (example.id + ".problem.json");
    if (fs::exists(problem_path)) {
      try {
        example.problem = logic::problem_from_json_text(read_file_or_throw(problem_path.string()));
      } catch (const std::exception& e) {
        throw CliError{kExitSchema, "bad problem file " + problem_path.string() + ": " + e.what()};
      }
    }
    examples.push_back(std::move(example));
  }

  std::unique_ptr<ModelClient> client;
  if (!args.replay.empty()) {
    if (!fs::is_directory(args.replay)) throw CliError{kExitIo, "not a directory: " + args.replay};
    client = std::make_unique<ReplayClient>(args.replay);
  } else if (!args.endpoint.empty()) {
    client = std::make_unique<HttpClient>(args.endpoint);
  } else if (const char* env = std::getenv("MODEL_ENDPOINT"); env && *env) {
    client = std::make_unique<HttpClient>(env);
  } else {
    throw CliError{kExitUsage, "evaluate needs --replay DIR or --endpoint URL"};
  }
  std::unique_ptr<ModelClient> judge;
  if (!args.judge_endpoint.empty()) judge = std::make_unique<HttpClient>(args.judge_endpoint);

  std::vector<EvalRecord> records(examples.size());
  parallel_for(examples.size(), client->supports_concurrency(), [&](std::size_t i) {
    const EvalExample& example = examples[i];
    if (config.samples > 1) {
      SamplingResult sampled = rejection_sample(example, *client, config, validator_config);
      if (!sampled.records.empty()) {
        records[i] = sampled.chosen_output ? sampled.records.back()
                                           : sampled.records.front();
      } else {
        records[i].id = example.id;
      }
      return;
    }
    PromptBundle prompt = assemble_prompt(example.problem_statement, config.format_prompting);
    GenerationRequest request{prompt.system, prompt.user, config.temperature,
                              config.max_new_tokens};
    GenerationResult generated = client->generate(request, example.id);
    if (!generated.ok()) {
      records[i].id = example.id;
      records[i].errors.push_back("client error: " + generated.error->message);
      return;
    }
    records[i] = run_tiers(example, generated.text, config, validator_config, judge.get());
  });

  ReportConfigEcho echo;
  echo.tiers = config.tiers;
  echo.max_new_tokens = config.max_new_tokens;
  echo.temperature = config.temperature;
  echo.format_prompting = config.format_prompting;
  echo.samples = config.samples;
  echo.corpus = args.corpus;
  echo.source = !args.replay.empty() ? args.replay : args.endpoint;

  ReportDocument report = build_report(records, echo);
  std::string json_text = report_to_json_text(report);
  if (!args.out.empty()) {
    write_file_or_throw(args.out, json_text);
    std::cout << render_report_text(report);
    std::cout << "report written to " << args.out << "\n";
  } else {
    std::cout << json_text;
  }
  return 0;
}

int cmd_data_convert(const std::string& in, const std::string& out) {
  CorpusConversion conversion;
  try {
    conversion = to_jsonl(in);
  } catch (const std::exception& e) {
    throw CliError{kExitIo, e.what()};
  }
  if (!conversion.errors.empty()) {
    for (const auto& err : conversion.errors) {
      std::cerr << err.path << ": " << err.message << "\n";
    }
    throw CliError{kExitDomain, std::to_string(conversion.errors.size()) + " invalid corpus files"};
  }
  std::string text = serialize_jsonl(conversion.instances);
  if (out.empty()) {
    std::cout << text;
  } else {
    write_file_or_throw(out, text);
    std::cout << conversion.instances.size() << " instances written to " << out << "\n";
  }
  return 0;
}

std::vector<TrainingInstance> load_instances(const std::string& in) {
  if (fs::is_directory(in)) {
    CorpusConversion conversion = to_jsonl(in);
    if (!conversion.errors.empty()) {
      throw CliError{kExitDomain, "invalid corpus file: " + conversion.errors.front().path};
    }
    return conversion.instances;
  }
  return parse_jsonl(read_file_or_throw(in));
}

int cmd_data_split(const std::string& in, const std::string& out, double ratio,
                   std::uint64_t seed) {
  auto instances = load_instances(in);
  auto [train, val] = split_corpus(std::move(instances), ratio, seed);
  fs::create_directories(out);
  write_file_or_throw((fs::path(out) / "train.jsonl").string(), serialize_jsonl(train));
  write_file_or_throw((fs::path(out) / "val.jsonl").string(), serialize_jsonl(val));
  std::cout << "train " << train.size() << " / val " << val.size() << "\n";
  return 0;
}

int cmd_data_dedup(const std::string& in, const std::string& out) {
  auto [kept, dropped] = dedup(load_instances(in));
  for (const auto& d : dropped) {
    std::cout << "dropped " << (d.dropped_id.empty() ? "<unnamed>" : d.dropped_id) << " (kept "
              << (d.kept_id.empty() ? "<unnamed>" : d.kept_id) << ")\n";
  }
  std::string text = serialize_jsonl(kept);
  if (out.empty()) {
    std::cout << text;
  } else {
    write_file_or_throw(out, text);
    std::cout << kept.size() << " kept, " << dropped.size() << " dropped -> " << out << "\n";
  }
  return 0;
}

int cmd_data_stats(const std::string& in, const std::string& format) {
  CorpusStats stats;
  try {
    stats = corpus_stats_for_directory(in);
  } catch (const std::exception& e) {
    throw CliError{kExitIo, e.what()};
  }
  if (format == "json") {
    std::ostringstream out;
    out << "{\n  \"total\": " << stats.total << ",\n  \"by_problem_type\": {";
    bool first = true;
    for (const auto& [k, v] : stats.by_problem_type) {
      out << (first ? "" : ", ") << "\"" << k << "\": " << v;
      first = false;
    }
    out << "},\n  \"by_difficulty\": {";
    first = true;
    for (const auto& [k, v] : stats.by_difficulty) {
      out << (first ? "" : ", ") << "\"" << k << "\": " << v;
      first = false;
    }
    out << "},\n  \"negative_examples\": " << stats.negative_examples
        << ",\n  \"z3_verifiable\": " << stats.z3_verifiable << "\n}\n";
    std::cout << out.str();
    return 0;
  }
  std::cout << "total: " << stats.total << "\n";
  std::cout << "problem types:\n";
  for (const auto& [k, v] : stats.by_problem_type) std::cout << "  " << k << ": " << v << "\n";
  if (!stats.by_difficulty.empty()) {
    std::cout << "difficulty:\n";
    for (const auto& [k, v] : stats.by_difficulty) std::cout << "  " << k << ": " << v << "\n";
  }
  std::cout << "negative examples: " << stats.negative_examples << "\n";
  std::cout << "z3 verifiable: " << stats.z3_verifiable << "\n";
  return 0;
}

int cmd_grammar(const std::string& out, const std::string& fallacy_set_name) {
  GrammarConfig config;
  config.fallacy_set = fallacy_set_from_name(fallacy_set_name);
  std::string grammar = emit_grammar(config);
  if (out.empty() || out == "-") {
    std::cout << grammar;
  } else {
    write_file_or_throw(out, grammar);
    std::cout << "grammar written to " << out << "\n";
  }
  return 0;
}

int cmd_verify(const std::string& problem_path, const std::string& answer,
               const std::string& solver, const std::string& emit_dir) {
  logic::LogicProblem problem;
  try {
    problem = logic::problem_from_json_text(read_file_or_throw(problem_path));
  } catch (const CliError&) {
    throw;
  } catch (const std::exception& e) {
    throw CliError{kExitSchema, std::string("bad problem file: ") + e.what()};
  }

  logic::AssignmentAnswer assignment = logic::parse_assignment(problem, answer);
  logic::Verdict verdict = logic::verify_answer(problem, assignment);
  std::cout << "verdict: " << logic::verdict_status_name(verdict.status) << "\n";
  for (const auto& c : verdict.violated) std::cout << "  violates " << c.describe() << "\n";
  if (!verdict.expected.empty()) std::cout << "  expected: " << verdict.expected << "\n";
  if (!verdict.detail.empty()) std::cout << "  " << verdict.detail << "\n";

  logic::SmtScripts scripts = logic::emit_smtlib(problem, assignment);
  if (!emit_dir.empty()) {
    fs::create_directories(emit_dir);
    write_file_or_throw((fs::path(emit_dir) / "problem.smt2").string(), scripts.problem_only);
    write_file_or_throw((fs::path(emit_dir) / "answer_satisfies.smt2").string(),
                        scripts.answer_satisfies);
    write_file_or_throw((fs::path(emit_dir) / "answer_uniqueness.smt2").string(),
                        scripts.answer_uniqueness);
    std::cout << "SMT-LIB scripts written to " << emit_dir << "\n";
  }

  if (!solver.empty()) {
    auto describe = [](logic::SolverStatus s) {
      switch (s) {
        case logic::SolverStatus::sat: return "sat";
        case logic::SolverStatus::unsat: return "unsat";
        case logic::SolverStatus::unknown: return "unknown";
        default: return "solver-error";
      }
    };
    auto a = logic::run_solver(scripts.answer_satisfies, solver);
    auto b = logic::run_solver(scripts.answer_uniqueness, solver);
    std::cout << "solver answer-satisfies: " << describe(a.status) << "\n";
    std::cout << "solver uniqueness:       " << describe(b.status) << "\n";
    if (a.status == logic::SolverStatus::solver_error ||
        b.status == logic::SolverStatus::solver_error) {
      std::cerr << "solver error: " << (a.output.empty() ? b.output : a.output) << "\n";
      throw CliError{kExitIo, "solver did not produce a verdict"};
    }
    bool oracle_unique = verdict.status == logic::VerdictStatus::unique_and_matches;
    bool solver_unique =
        a.status == logic::SolverStatus::sat && b.status == logic::SolverStatus::unsat;
    std::cout << "solver/oracle agreement: " << (oracle_unique == solver_unique ? "yes" : "NO")
              << "\n";
  }

  return verdict.status == logic::VerdictStatus::unique_and_matches ? 0 : kExitDomain;
}

int cmd_report(const std::string& in) {
  ReportDocument report;
  try {
    report = report_from_json_text(read_file_or_throw(in));
  } catch (const CliError&) {
    throw;
  } catch (const std::exception& e) {
    throw CliError{kExitSchema, std::string("invalid report: ") + e.what()};
  }
  std::cout << render_report_text(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Toolkit for parsing, validating, scoring and formally verifying "
               "six-phase Nyaya reasoning traces"};
  app.require_subcommand(1);

  std::string fallacy_set_name = "either";
  bool strict_udaharana = false;
  bool require_leading = false;

  auto add_validator_flags = [&](CLI::App* cmd) {
    cmd->add_option("--fallacy-set", fallacy_set_name, "canonical|alternate|either")
        ->check(CLI::IsMember({"canonical", "alternate", "either"}));
    cmd->add_flag("--strict-udaharana", strict_udaharana,
                  "require the 'there' consequent clause in universal rules");
    cmd->add_flag("--require-leading-samshaya", require_leading,
                  "reject text before the first section header");
  };
  auto validator_config = [&] {
    ValidatorConfig config;
    config.fallacy_set = fallacy_set_from_name(fallacy_set_name);
    config.universal_rule_mode =
        strict_udaharana ? UniversalRuleMode::strict : UniversalRuleMode::lenient;
    config.require_leading_samshaya = require_leading;
    return config;
  };

  // validate
  auto* validate_cmd = app.add_subcommand("validate", "Validate trace or corpus files");
  std::vector<std::string> validate_paths;
  std::string validate_format = "text";
  bool validate_corpus_mode = false;
  validate_cmd->add_option("paths", validate_paths, "markdown files")->required();
  validate_cmd->add_option("--format", validate_format)->check(CLI::IsMember({"text", "json"}));
  validate_cmd->add_flag("--corpus", validate_corpus_mode, "require corpus frontmatter fields");
  add_validator_flags(validate_cmd);

  // evaluate
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Run the tiered evaluation pipeline");
  EvaluateArgs eval_args;
  evaluate_cmd->add_option("--corpus", eval_args.corpus, "corpus directory")->required();
  evaluate_cmd->add_option("--replay", eval_args.replay, "replay directory of stored outputs");
  evaluate_cmd->add_option("--endpoint", eval_args.endpoint, "model endpoint URL");
  evaluate_cmd->add_option("--judge-endpoint", eval_args.judge_endpoint,
                           "judge endpoint URL for tier 2");
  evaluate_cmd->add_option("--tiers", eval_args.tiers, "comma-separated tier list");
  evaluate_cmd->add_option("--max-new-tokens", eval_args.max_new_tokens);
  evaluate_cmd->add_option("--temperature", eval_args.temperature);
  evaluate_cmd->add_flag("--no-format-prompt", eval_args.no_format_prompt);
  evaluate_cmd->add_option("--samples", eval_args.samples, "rejection sampling budget");
  evaluate_cmd->add_option("--out", eval_args.out, "report JSON path");
  add_validator_flags(evaluate_cmd);

  // data
  auto* data_cmd = app.add_subcommand("data", "Corpus management");
  data_cmd->require_subcommand(1);
  std::string data_in, data_out, stats_format = "text";
  double split_ratio = 0.8;
  std::uint64_t split_seed = 42;
  auto* convert_cmd = data_cmd->add_subcommand("convert", "Corpus directory to JSONL");
  convert_cmd->add_option("--in", data_in)->required();
  convert_cmd->add_option("--out", data_out);
  auto* split_cmd = data_cmd->add_subcommand("split", "Deterministic train/val split");
  split_cmd->add_option("--in", data_in)->required();
  split_cmd->add_option("--out", data_out)->required();
  split_cmd->add_option("--ratio", split_ratio);
  split_cmd->add_option("--seed", split_seed);
  auto* dedup_cmd = data_cmd->add_subcommand("dedup", "Hash-based deduplication");
  dedup_cmd->add_option("--in", data_in)->required();
  dedup_cmd->add_option("--out", data_out);
  auto* stats_cmd = data_cmd->add_subcommand("stats", "Corpus distribution report");
  stats_cmd->add_option("--in", data_in)->required();
  stats_cmd->add_option("--format", stats_format)->check(CLI::IsMember({"text", "json"}));

  // grammar
  auto* grammar_cmd = app.add_subcommand("grammar", "Emit the GBNF trace grammar");
  std::string grammar_out;
  grammar_cmd->add_option("--out", grammar_out, "output file ('-' for stdout)");
  grammar_cmd->add_option("--fallacy-set", fallacy_set_name)
      ->check(CLI::IsMember({"canonical", "alternate", "either"}));

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "Verify an answer against a logic problem");
  std::string verify_problem, verify_answer, verify_solver, verify_emit;
  verify_cmd->add_option("--problem", verify_problem, "problem JSON file")->required();
  verify_cmd->add_option("--answer", verify_answer, "answer text")->required();
  verify_cmd->add_option("--solver", verify_solver, "SMT-LIB 2 solver executable");
  verify_cmd->add_option("--emit-smt", verify_emit, "directory for emitted scripts");

  // report
  auto* report_cmd = app.add_subcommand("report", "Render a report JSON as text");
  std::string report_in;
  report_cmd->add_option("--in", report_in)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (validate_cmd->parsed()) {
      return cmd_validate(validate_paths, validator_config(), validate_corpus_mode,
                          validate_format);
    }
    if (evaluate_cmd->parsed()) return cmd_evaluate(eval_args, validator_config());
    if (data_cmd->parsed()) {
      if (convert_cmd->parsed()) return cmd_data_convert(data_in, data_out);
      if (split_cmd->parsed()) return cmd_data_split(data_in, data_out, split_ratio, split_seed);
      if (dedup_cmd->parsed()) return cmd_data_dedup(data_in, data_out);
      if (stats_cmd->parsed()) return cmd_data_stats(data_in, stats_format);
    }
    if (grammar_cmd->parsed()) return cmd_grammar(grammar_out, fallacy_set_name);
    if (verify_cmd->parsed()) {
      return cmd_verify(verify_problem, verify_answer, verify_solver, verify_emit);
    }
    if (report_cmd->parsed()) return cmd_report(report_in);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return 0;
}
