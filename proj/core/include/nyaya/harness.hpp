#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nyaya/logic.hpp"
#include "nyaya/scoring.hpp"
#include "nyaya/trace_model.hpp"
#include "nyaya/trace_parser.hpp"
#include "nyaya/validator.hpp"

// Tiered evaluation pipeline, model-client contract, judge rubric math,
// prompt/template assembly, grammar emission, and rejection sampling.

namespace nyaya {

struct EvalConfig {
  std::vector<int> tiers = {1, 3};  // non-empty, ascending
  int max_new_tokens = 0;           // 0 = full output
  double temperature = 0.0;
  bool format_prompting = true;
  int samples = 5;  // rejection-sampling budget

  void check() const;  // throws std::invalid_argument
};

struct GenerationRequest {
  std::string system;
  std::string user;
  double temperature = 0.0;
  int max_new_tokens = 0;
};

enum class ClientErrorKind { transport, endpoint, timeout, not_found };

struct ClientError {
  ClientErrorKind kind;
  std::string message;
};

struct GenerationResult {
  std::string text;
  std::optional<ClientError> error;

  bool ok() const { return !error.has_value(); }
};

// Text-generation endpoint abstraction. Implementations must either be safe
// for concurrent calls or return false from supports_concurrency().
class ModelClient {
 public:
  virtual ~ModelClient() = default;
  virtual GenerationResult generate(const GenerationRequest& request,
                                    std::string_view example_id) = 0;
  virtual bool supports_concurrency() const { return true; }
};

// Serves stored outputs from a directory keyed by example id: either a
// single "<id>.md" served on every call or numbered attempts "<id>.1.md",
// "<id>.2.md", ... served in sequence (the last one repeats when the
// sequence is exhausted).
class ReplayClient : public ModelClient {
 public:
  explicit ReplayClient(std::string directory);
  GenerationResult generate(const GenerationRequest& request,
                            std::string_view example_id) override;

  int calls_for(std::string_view example_id) const;
  int total_calls() const;

 private:
  struct State;
  std::shared_ptr<State> state_;
};

// POSTs {system, user, temperature, max_new_tokens} as JSON to the endpoint
// and expects {"text": ...} or {"error": ...} back. MODEL_API_KEY, when
// set, is sent as a bearer token.
class HttpClient : public ModelClient {
 public:
  explicit HttpClient(std::string endpoint_url,
                      std::chrono::milliseconds timeout = std::chrono::milliseconds(30000));
  GenerationResult generate(const GenerationRequest& request,
                            std::string_view example_id) override;

 private:
  std::string endpoint_;
  std::chrono::milliseconds timeout_;
};

struct PromptBundle {
  std::string system;
  std::string user;
};

// Byte-stable prompt assembly. With format prompting the user text carries
// the required-order instruction block and the skeletal section template,
// ending with the "### Nyaya Reasoning:" cue; without it, the problem text
// alone.
PromptBundle assemble_prompt(std::string_view problem_statement, bool format_prompting);

struct GrammarConfig {
  FallacySet fallacy_set = FallacySet::either;
};

// GBNF grammar whose root derives the six section headers in canonical
// order, with the doubt-type field constrained to the canonical keys and
// fallacy-check lines covering the configured set. Deterministic text.
std::string emit_grammar(const GrammarConfig& config = {});

// Test-oriented interpreter for the structural constraints the emitted
// grammar encodes: header order, enumerated doubt types, syllogism member
// completeness, required field labels and fallacy coverage. Free text is
// unconstrained. Leading text before the first header is tolerated.
bool grammar_accepts(std::string_view grammar_text, std::string_view trace_text);

struct JudgeScores {
  int samshaya_appropriateness = 0;
  int pratyaksha_validity = 0;
  int anumana_correctness = 0;
  int upamana_relevance = 0;
  int shabda_correctness = 0;
  int pancha_avayava_quality = 0;
  int tarka_meaningfulness = 0;
  int hetvabhasa_thoroughness = 0;
  int nirnaya_definitiveness = 0;

  int total() const;
  double normalized() const { return total() / 90.0; }
};

const std::vector<std::string>& judge_dimension_names();

enum class JudgeDecision { auto_accept, manual_review, reject };

JudgeDecision judge_decision(const JudgeScores& scores);

// Parses the judge client's fenced key/value block into scores. Fractional
// or out-of-range values and missing dimensions are rejected, not rounded.
// Returns error text on failure.
std::optional<std::string> parse_judge_block(std::string_view text, JudgeScores& scores);

enum class TierStatus { passed, failed, skipped };

struct TierOutcome {
  TierStatus status = TierStatus::failed;
  std::string detail;
};

struct EvalExample {
  std::string id;
  std::string problem_statement;
  Frontmatter frontmatter;
  std::optional<logic::LogicProblem> problem;  // enables tier 4
};

struct EvalRecord {
  std::string id;
  std::string raw_output;
  ParsedDocument parsed;
  ValidationReport report;
  MatchResult match;
  std::optional<logic::Verdict> verdict;
  std::optional<JudgeScores> judge;
  std::map<int, TierOutcome> tiers;  // present only for tiers that ran
  double reward = 0.0;
  ConditionTag condition;
  std::vector<std::string> errors;  // client/solver errors, never thrown

  bool tier_passed(int tier) const;
};

// Runs the configured tiers over one output, stopping at the first failed
// tier. Tier 4 runs only for z3_verifiable examples with a logic problem
// attached and is recorded as skipped otherwise. The reward is always
// computed from whatever components are available; absent 1-5 components
// default to the scale minimum.
EvalRecord run_tiers(const EvalExample& example, std::string_view output_text,
                     const EvalConfig& config, const ValidatorConfig& validator_config = {},
                     ModelClient* judge_client = nullptr);

struct SamplingResult {
  std::optional<std::string> chosen_output;
  int attempts_used = 0;
  std::vector<EvalRecord> records;
};

// Draws up to config.samples outputs from the client and keeps the first
// whose tier-1 verdict is valid.
SamplingResult rejection_sample(const EvalExample& example, ModelClient& client,
                                const EvalConfig& config,
                                const ValidatorConfig& validator_config = {});

}  // namespace nyaya
