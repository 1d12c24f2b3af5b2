#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "nyaya/trace_model.hpp"
#include "nyaya/trace_parser.hpp"

// Tier-1 structural validation and phase-quality scoring over parsed traces.
// Pure functions; reports for distinct documents can be computed concurrently.

namespace nyaya {

enum class UniversalRuleMode { lenient, strict };

struct ValidatorConfig {
  FallacySet fallacy_set = FallacySet::either;
  UniversalRuleMode universal_rule_mode = UniversalRuleMode::lenient;
  bool require_leading_samshaya = false;
  bool corpus_mode = false;
};

enum class SemanticViolation {
  pramana_type_missing,
  udaharana_no_universal_rule,
  hetvabhasa_incomplete,
  tarka_tautological,
};

struct Violation {
  // Exactly one of `parse` / `semantic` is set.
  std::optional<ParseFailure> parse;
  std::optional<SemanticViolation> semantic;
  std::optional<PramanaKind> pramana_kind;  // pramana_type_missing
  int syllogism_index = 0;                  // udaharana_no_universal_rule, 1-based
  int checked_count = 0;                    // hetvabhasa_incomplete
  std::string message;

  std::string category() const;
};

struct ValidationReport {
  bool valid = false;
  std::vector<Violation> violations;
  std::array<bool, kPhaseCount> phase_bitmap{};
  int syllogism_count = 0;
  int quality_score = 0;  // 0-10, Table-style phase-quality thresholds

  bool all_phases_present() const;
};

// Passes when the text states a universal "Wherever ..." rule. Lenient mode
// requires the introducing "wherever" only; strict mode additionally wants a
// "there" consequent in the same sentence.
bool check_universal_rule(std::string_view udaharana, UniversalRuleMode mode);

enum class TarkaVerdict { meaningful, tautological };

// Heuristic: tautological iff the hypothesis carries no negation cue and its
// token overlap with the final conclusion is >= 0.9.
TarkaVerdict check_tarka_tautology(const TarkaPhase& tarka, const NirnayaPhase& nirnaya,
                                   const std::vector<Syllogism>& syllogisms);

ValidationReport validate(const ParsedDocument& parsed, const ValidatorConfig& config = {});

// Phase-quality score on the 0-10 scale: hard zero when any pramana kind is
// missing, fewer than two complete syllogisms exist, the tarka is
// tautological, or Samshaya/Nirnaya are absent; otherwise 10 for five
// fallacy checks, 7 for three or four, 0 below three.
int quality_score(const ParsedDocument& parsed, const ValidatorConfig& config = {});

}  // namespace nyaya
