#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nyaya/harness.hpp"
#include "text_util.hpp"

namespace nyaya {

namespace {

constexpr const char* kSystemPrompt =
    "You are a Nyaya reasoning engine. Follow the exact output format provided.";

constexpr const char* kFormatInstructions =
    "Required section order:\n"
    "1) ## Samshaya (Doubt Analysis)\n"
    "2) ## Pramana (Sources of Knowledge)\n"
    "3) ## Pancha Avayava (5-Member Syllogism)\n"
    "4) ## Tarka (Counterfactual Reasoning)\n"
    "5) ## Hetvabhasa (Fallacy Check)\n"
    "6) ## Nirnaya (Ascertainment)\n"
    "\n"
    "CRITICAL:\n"
    "- Response MUST start with: \"## Samshaya\"\n"
    "- Copy the template exactly.\n";

constexpr const char* kTemplateSkeleton =
    "## Samshaya (Doubt Analysis)\n"
    "**Doubt Type**:  **Justification**:\n"
    "---\n"
    "## Pramana (Sources of Knowledge)\n"
    "### Pratyaksha (Direct Perception)\n"
    "### Anumana (Inference)\n"
    "### Upamana (Comparison)\n"
    "### Shabda (Testimony)\n"
    "---\n"
    "## Pancha Avayava (5-Member Syllogism)\n"
    "### Syllogism 1:\n"
    "**Pratijna (Thesis)**: **Hetu (Reason)**:\n"
    "**Udaharana (Universal + Example)**:\n"
    "**Upanaya (Application)**:\n"
    "**Nigamana (Conclusion)**:\n"
    "---\n"
    "## Tarka (Counterfactual Reasoning)\n"
    "**Hypothesis**: **Consequence**:\n"
    "**Analysis**: **Resolution**:\n"
    "---\n"
    "## Hetvabhasa (Fallacy Check)\n"
    "Check for Savyabhichara / Viruddha /\n"
    "  Asiddha / Satpratipaksha / Badhita\n"
    "---\n"
    "## Nirnaya (Ascertainment)\n"
    "**Final Answer**: **Justification**:\n";

// Judge dimensions map onto the 1-5 reward scales by averaging the related
// 0-10 rubric scores.
int scale_1_5(double mean_0_10) {
  int scaled = 1 + static_cast<int>(std::lround(mean_0_10 / 10.0 * 4.0));
  return std::clamp(scaled, 1, 5);
}

}  // namespace

void EvalConfig::check() const {
  if (tiers.empty()) throw std::invalid_argument("EvalConfig: tiers must be non-empty");
  for (std::size_t i = 0; i < tiers.size(); ++i) {
    if (tiers[i] < 1 || tiers[i] > 4) throw std::invalid_argument("EvalConfig: unknown tier");
    if (i > 0 && tiers[i] <= tiers[i - 1]) {
      throw std::invalid_argument("EvalConfig: tiers must be ascending");
    }
  }
  if (samples < 1) throw std::invalid_argument("EvalConfig: samples must be >= 1");
  if (temperature < 0.0) throw std::invalid_argument("EvalConfig: temperature must be >= 0");
}

PromptBundle assemble_prompt(std::string_view problem_statement, bool format_prompting) {
  PromptBundle bundle;
  bundle.system = kSystemPrompt;
  if (!format_prompting) {
    bundle.user = std::string(problem_statement);
    return bundle;
  }
  std::ostringstream user;
  user << "### Problem:\n"
       << problem_statement << "\n\n### Instructions:\n"
       << kFormatInstructions << "\n### Template:\n"
       << kTemplateSkeleton << "\n### Nyaya Reasoning:\n";
  bundle.user = user.str();
  return bundle;
}

int JudgeScores::total() const {
  return samshaya_appropriateness + pratyaksha_validity + anumana_correctness +
         upamana_relevance + shabda_correctness + pancha_avayava_quality + tarka_meaningfulness +
         hetvabhasa_thoroughness + nirnaya_definitiveness;
}

const std::vector<std::string>& judge_dimension_names() {
  static const std::vector<std::string> names = {
      "samshaya_appropriateness", "pratyaksha_validity",   "anumana_correctness",
      "upamana_relevance",        "shabda_correctness",    "pancha_avayava_quality",
      "tarka_meaningfulness",     "hetvabhasa_thoroughness", "nirnaya_definitiveness",
  };
  return names;
}

JudgeDecision judge_decision(const JudgeScores& scores) {
  double n = scores.normalized();
  if (n >= 0.85) return JudgeDecision::auto_accept;
  if (n >= 0.70) return JudgeDecision::manual_review;
  return JudgeDecision::reject;
}

std::optional<std::string> parse_judge_block(std::string_view text, JudgeScores& scores) {
  std::vector<std::string> lines = text::split_lines(text);
  std::size_t begin = lines.size(), end = lines.size();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (text::trim(lines[i]).rfind("```", 0) != 0) continue;
    if (begin == lines.size()) {
      begin = i + 1;
    } else {
      end = i;
      break;
    }
  }
  if (begin == lines.size() || end == lines.size()) {
    return "judge output lacks a fenced score block";
  }

  std::map<std::string, int> values;
  for (std::size_t i = begin; i < end; ++i) {
    std::string line = text::trim(lines[i]);
    if (line.empty()) continue;
    std::size_t colon = line.find(':');
    if (colon == std::string::npos) return "malformed score line: " + line;
    std::string key = normalize_enum_token(line.substr(0, colon));
    std::string value = text::trim(line.substr(colon + 1));
    if (value.find('.') != std::string::npos) {
      return "fractional judge score rejected: " + line;
    }
    int parsed = 0;
    try {
      std::size_t used = 0;
      parsed = std::stoi(value, &used);
      if (used != value.size()) return "malformed score value: " + line;
    } catch (const std::exception&) {
      return "malformed score value: " + line;
    }
    if (parsed < 0 || parsed > 10) return "score out of range: " + line;
    values[key] = parsed;
  }

  std::array<int*, 9> slots = {
      &scores.samshaya_appropriateness, &scores.pratyaksha_validity,
      &scores.anumana_correctness,      &scores.upamana_relevance,
      &scores.shabda_correctness,       &scores.pancha_avayava_quality,
      &scores.tarka_meaningfulness,     &scores.hetvabhasa_thoroughness,
      &scores.nirnaya_definitiveness,
  };
  const auto& names = judge_dimension_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto it = values.find(names[i]);
    if (it == values.end()) return "missing judge dimension: " + names[i];
    *slots[i] = it->second;
  }
  return std::nullopt;
}

bool EvalRecord::tier_passed(int tier) const {
  auto it = tiers.find(tier);
  return it != tiers.end() && it->second.status == TierStatus::passed;
}

EvalRecord run_tiers(const EvalExample& example, std::string_view output_text,
                     const EvalConfig& config, const ValidatorConfig& validator_config,
                     ModelClient* judge_client) {
  config.check();
  EvalRecord record;
  record.id = example.id;
  record.raw_output = std::string(output_text);
  record.condition = ConditionTag{config.format_prompting, config.temperature};

  ParseOptions parse_options;
  parse_options.require_leading_samshaya = validator_config.require_leading_samshaya;
  record.parsed = parse_trace(output_text, parse_options);
  record.report = validate(record.parsed, validator_config);

  bool failed = false;
  for (int tier : config.tiers) {
    if (failed) break;
    TierOutcome outcome;
    switch (tier) {
      case 1: {
        outcome.status = record.report.valid ? TierStatus::passed : TierStatus::failed;
        if (!record.report.valid && !record.report.violations.empty()) {
          outcome.detail = record.report.violations.front().message;
        }
        break;
      }
      case 2: {
        if (!judge_client) {
          outcome.status = TierStatus::failed;
          outcome.detail = "no judge client configured";
          record.errors.push_back(outcome.detail);
          break;
        }
        GenerationRequest request;
        request.system =
            "Score each Nyaya phase from 0 to 10. Reply with a fenced block of "
            "`dimension: score` lines covering all nine dimensions.";
        request.user = example.problem_statement + "\n\n" + record.raw_output;
        request.temperature = 0.0;
        GenerationResult judged = judge_client->generate(request, example.id);
        if (!judged.ok()) {
          outcome.status = TierStatus::failed;
          outcome.detail = "judge client error: " + judged.error->message;
          record.errors.push_back(outcome.detail);
          break;
        }
        JudgeScores scores;
        if (auto err = parse_judge_block(judged.text, scores)) {
          outcome.status = TierStatus::failed;
          outcome.detail = *err;
          record.errors.push_back(*err);
          break;
        }
        record.judge = scores;
        JudgeDecision decision = judge_decision(scores);
        outcome.status = decision == JudgeDecision::reject ? TierStatus::failed
                                                           : TierStatus::passed;
        outcome.detail = decision == JudgeDecision::auto_accept   ? "auto_accept"
                         : decision == JudgeDecision::manual_review ? "manual_review"
                                                                    : "reject";
        break;
      }
      case 3: {
        record.match = match_answer(record.raw_output, example.frontmatter.ground_truth);
        outcome.status = record.match.semantic_match ? TierStatus::passed : TierStatus::failed;
        std::ostringstream detail;
        detail << "similarity " << record.match.similarity;
        outcome.detail = detail.str();
        break;
      }
      case 4: {
        const bool applicable = example.frontmatter.z3_verifiable.value_or(false) &&
                                example.problem.has_value();
        if (!applicable) {
          outcome.status = TierStatus::skipped;
          outcome.detail = "not z3-verifiable";
          break;
        }
        if (record.match.extracted_answer.empty()) {
          record.match = match_answer(record.raw_output, example.frontmatter.ground_truth);
        }
        try {
          logic::AssignmentAnswer answer =
              logic::parse_assignment(*example.problem, record.match.extracted_answer);
          record.verdict = logic::verify_answer(*example.problem, answer);
          outcome.status = record.verdict->status == logic::VerdictStatus::unique_and_matches
                               ? TierStatus::passed
                               : TierStatus::failed;
          outcome.detail = logic::verdict_status_name(record.verdict->status);
        } catch (const std::exception& e) {
          outcome.status = TierStatus::failed;
          outcome.detail = std::string("verifier error: ") + e.what();
          record.errors.push_back(outcome.detail);
        }
        break;
      }
      default: continue;
    }
    record.tiers[tier] = outcome;
    if (outcome.status == TierStatus::failed) failed = true;
  }

  int pramana_score = 1, tarka_score = 1;
  if (record.judge) {
    pramana_score = scale_1_5((record.judge->pratyaksha_validity +
                               record.judge->anumana_correctness + record.judge->upamana_relevance +
                               record.judge->shabda_correctness) /
                              4.0);
    tarka_score = scale_1_5(record.judge->tarka_meaningfulness);
  }
  bool consistent =
      record.verdict && record.verdict->status == logic::VerdictStatus::unique_and_matches;
  record.reward = composite_reward(record.report.valid, record.match.semantic_match,
                                   pramana_score, tarka_score, consistent);
  return record;
}

SamplingResult rejection_sample(const EvalExample& example, ModelClient& client,
                                const EvalConfig& config,
                                const ValidatorConfig& validator_config) {
  config.check();
  SamplingResult result;
  PromptBundle prompt = assemble_prompt(example.problem_statement, config.format_prompting);
  GenerationRequest request{prompt.system, prompt.user, config.temperature,
                            config.max_new_tokens};
  for (int attempt = 1; attempt <= config.samples; ++attempt) {
    result.attempts_used = attempt;
    GenerationResult generated = client.generate(request, example.id);
    if (!generated.ok()) {
      EvalRecord record;
      record.id = example.id;
      record.errors.push_back("client error: " + generated.error->message);
      result.records.push_back(std::move(record));
      continue;
    }
    EvalRecord record = run_tiers(example, generated.text, config, validator_config);
    bool valid = record.report.valid;
    result.records.push_back(std::move(record));
    if (valid) {
      result.chosen_output = generated.text;
      break;
    }
  }
  return result;
}

}  // namespace nyaya
