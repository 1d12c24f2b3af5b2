#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

// Tier-3 answer extraction and matching, corpus metrics with confidence
// intervals, ablation arithmetic, and the composite reward.

namespace nyaya {

inline constexpr double kSemanticMatchThreshold = 0.8;  // inclusive

enum class ExtractionMethod { final_answer_label, nirnaya_label, last_line };

struct MatchResult {
  std::string extracted_answer;
  ExtractionMethod method = ExtractionMethod::last_line;
  bool exact = false;
  bool normalized = false;
  double similarity = 0.0;
  bool semantic_match = false;
};

// First "Final Answer:" labeled line (bold markers tolerated, wrapped lines
// joined), else a "Nirnaya:" labeled line, else the last non-empty line not
// starting with '#'.
std::pair<std::string, ExtractionMethod> extract_answer(std::string_view output);

// Ground-truth recall over normalized token sets:
// |answer-tokens ∩ truth-tokens| / |truth-tokens|; empty truth -> 0.
double similarity(std::string_view answer, std::string_view ground_truth);

MatchResult match_answer(std::string_view output, std::string_view ground_truth,
                         double threshold = kSemanticMatchThreshold);

// Wilson score interval clipped to [0,1]. Throws std::invalid_argument for
// n = 0 or successes out of range.
std::pair<double, double> wilson_interval(int successes, int n, double z = 1.96);

struct ConditionTag {
  bool format_prompting = true;
  double temperature = 0.0;

  auto operator<=>(const ConditionTag&) const = default;
};

// Per-example outcome row consumed by `aggregate`.
struct ScoredRecord {
  std::string id;
  bool parse_ok = false;
  bool valid = false;            // tier-1 structural verdict (format adherence)
  bool semantic_evaluated = false;
  bool semantic_match = false;
  long output_tokens = 0;        // approximate whitespace tokens
  std::vector<std::string> failure_categories;  // primary category first
  std::optional<ConditionTag> condition;
  double reward = 0.0;
};

struct ConditionCell {
  ConditionTag tag;
  int n = 0;
  double format_rate = 0.0;
  double semantic_rate = 0.0;
};

struct EvalSummary {
  int n = 0;
  double format_rate = 0.0;
  double parse_rate = 0.0;
  double semantic_rate = 0.0;      // over records where tier 3 ran
  int semantic_evaluated = 0;
  std::pair<double, double> ci_format{0.0, 1.0};
  std::pair<double, double> ci_semantic{0.0, 1.0};
  double avg_output_length = 0.0;
  std::map<std::string, int> failure_histogram;  // primary failure per record
  std::vector<ConditionCell> per_condition;      // sorted, present when tagged
};

// Order-independent: shuffling records yields a bit-identical summary.
// Throws std::invalid_argument on empty input.
EvalSummary aggregate(const std::vector<ScoredRecord>& records);

struct AblationGrid {
  std::optional<double> format_on_temp_lo;
  std::optional<double> format_on_temp_hi;
  std::optional<double> format_off_temp_lo;
  std::optional<double> format_off_temp_hi;
};

// (rate[on,hi] - rate[on,lo]) - (rate[off,hi] - rate[off,lo]).
// Throws std::invalid_argument when a cell is missing.
double interaction_effect(const AblationGrid& grid);

struct RewardWeights {
  double format = 0.3;
  double semantic = 0.25;
  double pramana = 0.2;
  double tarka = 0.15;
  double consistency = 0.1;

  double sum() const { return format + semantic + pramana + tarka + consistency; }
};

// Weighted sum of the five components; binary components map to {0,1} and
// 1-5 scales to (s-1)/4. Throws std::invalid_argument for out-of-range
// scales.
double composite_reward(bool format_ok, bool semantic_ok, int pramana_score, int tarka_score,
                        bool consistent, const RewardWeights& weights = {});

}  // namespace nyaya
