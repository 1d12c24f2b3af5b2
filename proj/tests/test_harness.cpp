#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <thread>

#include <httplib.h>

#include "nyaya/harness.hpp"
#include "nyaya/logic.hpp"
#include "support.hpp"

using namespace nyaya;
using testsupport::fixture_path;
using testsupport::read_fixture;

namespace {

EvalExample pets_example() {
  EvalExample example;
  example.id = "test-001";
  example.problem_statement =
      "Alice, Bob, and Carol each have one pet: a cat, a dog, or a fish.\n"
      "1. Alice does not have the dog. 2. Bob has the cat. 3. Carol does not have the fish.";
  example.frontmatter.id = example.id;
  example.frontmatter.problem_type = "constraint_satisfaction";
  example.frontmatter.ground_truth = "Alice has the fish, Bob has the cat, Carol has the dog";
  example.frontmatter.z3_verifiable = true;
  example.problem = logic::problem_from_json_text(read_fixture("problems/pets.json"));
  return example;
}

// Scripted client that returns canned outputs and counts calls.
class ScriptedClient : public ModelClient {
 public:
  explicit ScriptedClient(std::vector<std::string> outputs) : outputs_(std::move(outputs)) {}
  GenerationResult generate(const GenerationRequest&, std::string_view) override {
    GenerationResult r;
    std::size_t i = calls_++;
    r.text = outputs_[std::min(i, outputs_.size() - 1)];
    return r;
  }
  int calls() const { return calls_; }

 private:
  std::vector<std::string> outputs_;
  std::atomic<int> calls_{0};
};

std::string judge_reply(int score_for_all) {
  std::string block = "Here are the scores.\n```\n";
  for (const auto& name : judge_dimension_names()) {
    block += name + ": " + std::to_string(score_for_all) + "\n";
  }
  block += "```\n";
  return block;
}

class CannedJudge : public ModelClient {
 public:
  explicit CannedJudge(std::string reply) : reply_(std::move(reply)) {}
  GenerationResult generate(const GenerationRequest&, std::string_view) override {
    return {reply_, std::nullopt};
  }

 private:
  std::string reply_;
};

}  // namespace

TEST_CASE("assemble_prompt is byte-stable and carries the section template") {
  PromptBundle with = assemble_prompt("Who has which pet?", true);
  CHECK(with.system == "You are a Nyaya reasoning engine. Follow the exact output format provided.");
  auto samshaya = with.user.find("## Samshaya (Doubt Analysis)");
  auto pramana = with.user.find("## Pramana");
  REQUIRE(samshaya != std::string::npos);
  REQUIRE(pramana != std::string::npos);
  CHECK(samshaya < pramana);
  CHECK(with.user.find("Response MUST start with") != std::string::npos);
  CHECK(with.user.rfind("### Nyaya Reasoning:\n") != std::string::npos);
  CHECK(assemble_prompt("Who has which pet?", true).user == with.user);

  PromptBundle without = assemble_prompt("Who has which pet?", false);
  CHECK(without.user == "Who has which pet?");
  CHECK(without.system == with.system);
}

TEST_CASE("emit_grammar orders sections and enumerates the configured sets") {
  std::string grammar = emit_grammar({});
  auto samshaya = grammar.find("\"## Samshaya\"");
  auto pramana = grammar.find("\"## Pramana\"");
  REQUIRE(samshaya != std::string::npos);
  REQUIRE(pramana != std::string::npos);
  CHECK(samshaya < pramana);
  CHECK(grammar.find("\"Vipratipatti\"") != std::string::npos);
  CHECK(grammar.find("fallacy-checks-canonical") != std::string::npos);
  CHECK(grammar.find("fallacy-checks-alternate") != std::string::npos);
  CHECK(emit_grammar({}) == grammar);

  GrammarConfig canonical;
  canonical.fallacy_set = FallacySet::canonical;
  std::string canonical_grammar = emit_grammar(canonical);
  CHECK(canonical_grammar.find("\"Prakaranasama\"") != std::string::npos);
  CHECK(canonical_grammar.find("fallacy-checks-alternate") == std::string::npos);
}

TEST_CASE("grammar_accepts mirrors the structural constraints") {
  std::string grammar = emit_grammar({});
  CHECK(grammar_accepts(grammar, read_fixture("traces/pets_complete.md")));
  CHECK_FALSE(grammar_accepts(grammar, read_fixture("traces/implication_chain_no_hetvabhasa.md")));
  CHECK_FALSE(grammar_accepts(grammar, ""));
  CHECK_FALSE(grammar_accepts(grammar, read_fixture("traces/seating_invalid_doubt.md")));
  CHECK(grammar_accepts(grammar, read_fixture("replay/stage1/test-006.md")));
}

TEST_CASE("acceptor and validator agree on every replay fixture") {
  std::string grammar = emit_grammar({});
  const char* fixtures[] = {
      "replay/stage1/seed-003.md", "replay/stage1/seed-005.md", "replay/stage1/test-001.md",
      "replay/stage1/test-002.md", "replay/stage1/test-003.md", "replay/stage1/test-004.md",
      "replay/stage1/test-005.md", "replay/stage1/test-006.md", "replay/stage1/test-007.md",
      "replay/stage1/test-008.md", "replay/stage0/seed-001.md", "replay/stage0/seed-003.md",
      "replay/stage0/test-001.md", "replay/stage0/test-003.md", "replay/stage0/test-005.md",
      "replay/stage0/test-007.md", "replay/stage0/test-008.md",
  };
  for (const char* path : fixtures) {
    std::string text = read_fixture(path);
    bool valid = validate(parse_trace(text)).valid;
    CHECK_MESSAGE(grammar_accepts(grammar, text) == valid, path);
  }
}

TEST_CASE("judge score parsing is strict") {
  JudgeScores scores;
  CHECK(parse_judge_block(judge_reply(9), scores) == std::nullopt);
  CHECK(scores.total() == 81);
  CHECK(scores.normalized() == doctest::Approx(0.9));

  JudgeScores ignored;
  auto fractional = parse_judge_block("```\nsamshaya_appropriateness: 8.5\n```\n", ignored);
  REQUIRE(fractional.has_value());
  CHECK(fractional->find("fractional") != std::string::npos);

  auto missing = parse_judge_block("```\nsamshaya_appropriateness: 9\n```\n", ignored);
  REQUIRE(missing.has_value());
  CHECK(missing->find("missing judge dimension") != std::string::npos);

  auto unfenced = parse_judge_block("samshaya_appropriateness: 9\n", ignored);
  REQUIRE(unfenced.has_value());

  auto out_of_range = parse_judge_block("```\nsamshaya_appropriateness: 11\n```\n", ignored);
  REQUIRE(out_of_range.has_value());
}

TEST_CASE("judge_decision bands are inclusive at their lower bounds") {
  JudgeScores nines;
  CHECK(parse_judge_block(judge_reply(9), nines) == std::nullopt);
  CHECK(judge_decision(nines) == JudgeDecision::auto_accept);  // 81/90 = 0.9

  JudgeScores sevens;
  CHECK(parse_judge_block(judge_reply(7), sevens) == std::nullopt);
  CHECK(sevens.total() == 63);  // 0.70 exactly
  CHECK(judge_decision(sevens) == JudgeDecision::manual_review);

  JudgeScores zeros;
  CHECK(judge_decision(zeros) == JudgeDecision::reject);

  // 77/90 is the auto-accept floor
  JudgeScores mixed = sevens;
  mixed.samshaya_appropriateness = 10;
  mixed.pratyaksha_validity = 10;
  mixed.anumana_correctness = 10;
  mixed.upamana_relevance = 10;
  mixed.shabda_correctness = 9;
  CHECK(mixed.total() == 77);
  CHECK(judge_decision(mixed) == JudgeDecision::auto_accept);
}

TEST_CASE("run_tiers passes a perfect output through tiers 1 and 3") {
  EvalConfig config;
  config.tiers = {1, 3};
  EvalRecord record = run_tiers(pets_example(), read_fixture("traces/pets_complete.md"), config);
  CHECK(record.tier_passed(1));
  CHECK(record.tier_passed(3));
  CHECK(record.match.semantic_match);
  CHECK(record.match.similarity == doctest::Approx(1.0));
  // reward: format + semantic, no judge, no verification
  CHECK(record.reward == doctest::Approx(0.55));
}

TEST_CASE("run_tiers short-circuits after the first failed tier") {
  EvalConfig config;
  config.tiers = {1, 3};
  EvalRecord record =
      run_tiers(pets_example(), read_fixture("traces/seating_invalid_doubt.md"), config);
  REQUIRE(record.tiers.count(1) == 1);
  CHECK(record.tiers.at(1).status == TierStatus::failed);
  CHECK(record.tiers.count(3) == 0);  // short-circuit law

  // outcomes are a prefix of the configured tiers
  EvalConfig full;
  full.tiers = {1, 2, 3, 4};
  EvalRecord prefix =
      run_tiers(pets_example(), read_fixture("traces/seating_invalid_doubt.md"), full);
  CHECK(prefix.tiers.size() == 1);
  CHECK(prefix.tiers.begin()->first == 1);
}

TEST_CASE("run_tiers verifies z3-verifiable examples in tier 4") {
  EvalConfig config;
  config.tiers = {1, 3, 4};
  EvalRecord record = run_tiers(pets_example(), read_fixture("traces/pets_complete.md"), config);
  CHECK(record.tier_passed(1));
  CHECK(record.tier_passed(3));
  REQUIRE(record.verdict.has_value());
  CHECK(record.verdict->status == logic::VerdictStatus::unique_and_matches);
  CHECK(record.tier_passed(4));
  // consistency now contributes to the reward
  CHECK(record.reward == doctest::Approx(0.65));

  SUBCASE("non-verifiable examples record tier 4 as skipped") {
    EvalExample example = pets_example();
    example.frontmatter.z3_verifiable = false;
    EvalRecord skipped = run_tiers(example, read_fixture("traces/pets_complete.md"), config);
    REQUIRE(skipped.tiers.count(4) == 1);
    CHECK(skipped.tiers.at(4).status == TierStatus::skipped);
    CHECK_FALSE(skipped.verdict.has_value());
  }
}

TEST_CASE("run_tiers consults the judge for tier 2") {
  EvalConfig config;
  config.tiers = {1, 2, 3};
  CannedJudge judge(judge_reply(9));
  EvalRecord record = run_tiers(pets_example(), read_fixture("traces/pets_complete.md"), config,
                                ValidatorConfig{}, &judge);
  CHECK(record.tier_passed(2));
  REQUIRE(record.judge.has_value());
  // judge-derived 1-5 scales feed the reward: 9/10 -> 5 on both scales
  CHECK(record.reward == doctest::Approx(0.3 + 0.25 + 0.2 + 0.15));

  CannedJudge harsh(judge_reply(2));
  EvalRecord rejected = run_tiers(pets_example(), read_fixture("traces/pets_complete.md"), config,
                                  ValidatorConfig{}, &harsh);
  CHECK(rejected.tiers.at(2).status == TierStatus::failed);
  CHECK(rejected.tiers.count(3) == 0);

  EvalRecord no_judge =
      run_tiers(pets_example(), read_fixture("traces/pets_complete.md"), config);
  CHECK(no_judge.tiers.at(2).status == TierStatus::failed);
  CHECK_FALSE(no_judge.errors.empty());
}

TEST_CASE("rejection sampling keeps the first structurally valid output") {
  EvalExample example = pets_example();
  EvalConfig config;
  config.samples = 5;

  SUBCASE("third stored output is the first valid one") {
    ReplayClient client(fixture_path("replay/sampling"));
    example.id = "attempt3";
    SamplingResult result = rejection_sample(example, client, config);
    REQUIRE(result.chosen_output.has_value());
    CHECK(result.attempts_used == 3);
    CHECK(result.records.size() == 3);
    CHECK(client.calls_for("attempt3") == 3);
  }

  SUBCASE("an immediately valid output uses one attempt") {
    ReplayClient client(fixture_path("replay/sampling"));
    example.id = "firstgood";
    SamplingResult result = rejection_sample(example, client, config);
    REQUIRE(result.chosen_output.has_value());
    CHECK(result.attempts_used == 1);
  }

  SUBCASE("five invalid outputs exhaust the budget with no choice") {
    ReplayClient client(fixture_path("replay/sampling"));
    example.id = "allbad";
    SamplingResult result = rejection_sample(example, client, config);
    CHECK_FALSE(result.chosen_output.has_value());
    CHECK(result.attempts_used == 5);
    CHECK(result.records.size() == 5);
    CHECK(client.calls_for("allbad") == 5);  // never exceeds the budget
  }

  SUBCASE("the budget caps the scripted client too") {
    ScriptedClient client(std::vector<std::string>(
        8, read_fixture("traces/implication_chain_no_hetvabhasa.md")));
    SamplingResult result = rejection_sample(example, client, config);
    CHECK_FALSE(result.chosen_output.has_value());
    CHECK(client.calls() == 5);
  }
}

TEST_CASE("replay client errors on unknown ids") {
  ReplayClient client(fixture_path("replay/stage1"));
  GenerationResult missing = client.generate({}, "no-such-id");
  REQUIRE_FALSE(missing.ok());
  CHECK(missing.error->kind == ClientErrorKind::not_found);

  GenerationResult found = client.generate({}, "test-001");
  REQUIRE(found.ok());
  CHECK(found.text.rfind("## Samshaya", 0) == 0);
}

TEST_CASE("eval config validation") {
  EvalConfig config;
  config.tiers = {};
  CHECK_THROWS_AS(config.check(), std::invalid_argument);
  config.tiers = {3, 1};
  CHECK_THROWS_AS(config.check(), std::invalid_argument);
  config.tiers = {1, 3};
  config.samples = 0;
  CHECK_THROWS_AS(config.check(), std::invalid_argument);
}

TEST_CASE("http client speaks the wire contract") {
  httplib::Server server;
  server.Post("/generate", [](const httplib::Request& req, httplib::Response& res) {
    if (req.body.find("\"fail\"") != std::string::npos) {
      res.set_content("{\"error\": \"canned failure\"}", "application/json");
    } else if (req.body.find("\"empty\"") != std::string::npos) {
      res.set_content("{\"text\": \"\"}", "application/json");
    } else {
      res.set_content("{\"text\": \"## Samshaya\\nok\"}", "application/json");
    }
  });
  int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread serving([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  HttpClient client("http://127.0.0.1:" + std::to_string(port) + "/generate");
  GenerationRequest request;
  request.system = "system";
  request.user = "hello";
  GenerationResult ok = client.generate(request, "x");
  REQUIRE(ok.ok());
  CHECK(ok.text.rfind("## Samshaya", 0) == 0);

  request.user = "fail";
  GenerationResult err = client.generate(request, "x");
  REQUIRE_FALSE(err.ok());
  CHECK(err.error->kind == ClientErrorKind::endpoint);
  CHECK(err.error->message.find("canned failure") != std::string::npos);

  request.user = "empty";
  GenerationResult empty = client.generate(request, "x");
  REQUIRE_FALSE(empty.ok());
  CHECK(empty.error->kind == ClientErrorKind::endpoint);

  server.stop();
  serving.join();

  HttpClient unreachable("http://127.0.0.1:1/generate");
  GenerationResult down = unreachable.generate(request, "x");
  REQUIRE_FALSE(down.ok());
  CHECK(down.error->kind != ClientErrorKind::endpoint);
}

TEST_CASE("http client surfaces slow endpoints as timeouts") {
  httplib::Server server;
  server.Post("/slow", [](const httplib::Request&, httplib::Response& res) {
    std::this_thread::sleep_for(std::chrono::milliseconds(1500));
    res.set_content("{\"text\": \"late\"}", "application/json");
  });
  int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread serving([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  HttpClient client("http://127.0.0.1:" + std::to_string(port) + "/slow",
                    std::chrono::milliseconds(200));
  GenerationResult result = client.generate({}, "x");
  REQUIRE_FALSE(result.ok());
  CHECK(result.error->kind == ClientErrorKind::timeout);

  server.stop();
  serving.join();
}
