#include "nyaya/scoring.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <stdexcept>

#include "text_util.hpp"

namespace nyaya {

namespace {

using text::is_blank;
using text::split_lines;
using text::trim;

// Matches "Label:" / "**Label**:" / "**Label:**" at the start of the line
// and returns the value, joined with wrapped continuation lines.
std::optional<std::string> labeled_value(const std::vector<std::string>& lines, std::size_t i,
                                         std::string_view wanted_key) {
  std::string key, value;
  if (!text::parse_bold_label(lines[i], key, value)) return std::nullopt;
  if (key != wanted_key) return std::nullopt;
  for (std::size_t j = i + 1; j < lines.size(); ++j) {
    const std::string& line = lines[j];
    if (is_blank(line) || text::is_horizontal_rule(line)) break;
    if (trim(line).front() == '#') break;
    std::string k, v;
    if (text::parse_bold_label(line, k, v)) break;
    value += ' ';
    value += trim(line);
  }
  return trim(value);
}

std::string strip_leading_label(std::string_view line) {
  std::string key, value;
  if (text::parse_bold_label(line, key, value)) return value;
  return trim(line);
}

}  // namespace

std::pair<std::string, ExtractionMethod> extract_answer(std::string_view output) {
  std::vector<std::string> lines = split_lines(output);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (auto v = labeled_value(lines, i, "final_answer")) {
      return {*v, ExtractionMethod::final_answer_label};
    }
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (auto v = labeled_value(lines, i, "nirnaya")) {
      return {*v, ExtractionMethod::nirnaya_label};
    }
  }
  for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
    std::string t = trim(*it);
    if (t.empty() || t.front() == '#' || text::is_horizontal_rule(t)) continue;
    return {strip_leading_label(t), ExtractionMethod::last_line};
  }
  return {"", ExtractionMethod::last_line};
}

double similarity(std::string_view answer, std::string_view ground_truth) {
  std::set<std::string> truth = text::token_set(ground_truth);
  if (truth.empty()) return 0.0;
  std::set<std::string> ans = text::token_set(answer);
  std::size_t shared = 0;
  for (const auto& t : truth) shared += ans.count(t);
  return static_cast<double>(shared) / static_cast<double>(truth.size());
}

MatchResult match_answer(std::string_view output, std::string_view ground_truth,
                         double threshold) {
  MatchResult r;
  auto [answer, method] = extract_answer(output);
  r.extracted_answer = answer;
  r.method = method;
  r.exact = answer == ground_truth;
  r.normalized = text::normalize_for_match(answer) == text::normalize_for_match(ground_truth);
  r.similarity = similarity(answer, ground_truth);
  r.semantic_match = r.similarity >= threshold;
  return r;
}

std::pair<double, double> wilson_interval(int successes, int n, double z) {
  if (n < 1) throw std::invalid_argument("wilson_interval: n must be >= 1");
  if (successes < 0 || successes > n) {
    throw std::invalid_argument("wilson_interval: successes out of range");
  }
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  double lo = std::max(0.0, center - half);
  double hi = std::min(1.0, center + half);
  return {lo, hi};
}

EvalSummary aggregate(const std::vector<ScoredRecord>& records) {
  if (records.empty()) throw std::invalid_argument("aggregate: no records");

  EvalSummary s;
  s.n = static_cast<int>(records.size());
  int parsed = 0, valid = 0, matched = 0, evaluated = 0;
  long long token_sum = 0;
  for (const auto& r : records) {
    parsed += r.parse_ok ? 1 : 0;
    valid += r.valid ? 1 : 0;
    if (r.semantic_evaluated) {
      ++evaluated;
      matched += r.semantic_match ? 1 : 0;
    }
    token_sum += r.output_tokens;
    if (!r.failure_categories.empty()) ++s.failure_histogram[r.failure_categories.front()];
  }
  s.parse_rate = static_cast<double>(parsed) / s.n;
  s.format_rate = static_cast<double>(valid) / s.n;
  s.semantic_evaluated = evaluated;
  s.semantic_rate = evaluated > 0 ? static_cast<double>(matched) / evaluated : 0.0;
  s.ci_format = wilson_interval(valid, s.n);
  s.ci_semantic = evaluated > 0 ? wilson_interval(matched, evaluated)
                                : std::pair<double, double>{0.0, 1.0};
  s.avg_output_length = static_cast<double>(token_sum) / s.n;

  std::map<ConditionTag, std::array<int, 3>> cells;  // n, valid, matched
  bool tagged = false;
  for (const auto& r : records) {
    if (!r.condition) continue;
    tagged = true;
    auto& c = cells[*r.condition];
    c[0] += 1;
    c[1] += r.valid ? 1 : 0;
    c[2] += r.semantic_match ? 1 : 0;
  }
  if (tagged) {
    for (const auto& [tag, c] : cells) {
      ConditionCell cell;
      cell.tag = tag;
      cell.n = c[0];
      cell.format_rate = static_cast<double>(c[1]) / c[0];
      cell.semantic_rate = static_cast<double>(c[2]) / c[0];
      s.per_condition.push_back(cell);
    }
  }
  return s;
}

double interaction_effect(const AblationGrid& grid) {
  if (!grid.format_on_temp_lo || !grid.format_on_temp_hi || !grid.format_off_temp_lo ||
      !grid.format_off_temp_hi) {
    throw std::invalid_argument("interaction_effect: missing grid cell");
  }
  return (*grid.format_on_temp_hi - *grid.format_on_temp_lo) -
         (*grid.format_off_temp_hi - *grid.format_off_temp_lo);
}

double composite_reward(bool format_ok, bool semantic_ok, int pramana_score, int tarka_score,
                        bool consistent, const RewardWeights& weights) {
  if (pramana_score < 1 || pramana_score > 5 || tarka_score < 1 || tarka_score > 5) {
    throw std::invalid_argument("composite_reward: 1-5 scale out of range");
  }
  auto scaled = [](int s) { return (s - 1) / 4.0; };
  return weights.format * (format_ok ? 1.0 : 0.0) + weights.semantic * (semantic_ok ? 1.0 : 0.0) +
         weights.pramana * scaled(pramana_score) + weights.tarka * scaled(tarka_score) +
         weights.consistency * (consistent ? 1.0 : 0.0);
}

}  // namespace nyaya
