#include "nyaya/validator.hpp"

#include <algorithm>
#include <set>

#include "text_util.hpp"

namespace nyaya {

namespace {

using text::token_set;
using text::tokenize;
using text::trim;

bool pramana_block_ok(const std::map<PramanaKind, PramanaBlock>& blocks, PramanaKind kind) {
  auto it = blocks.find(kind);
  if (it == blocks.end() || !it->second.present) return false;
  // "None" under a heading counts as present-but-empty and is accepted.
  return !trim(it->second.content).empty();
}

double overlap(const std::string& a, const std::string& b) {
  std::set<std::string> sa = token_set(a);
  std::set<std::string> sb = token_set(b);
  if (sb.empty()) return 0.0;
  std::size_t shared = 0;
  for (const auto& t : sb) shared += sa.count(t);
  return static_cast<double>(shared) / static_cast<double>(sb.size());
}

int complete_syllogisms_with_rule(const std::vector<Syllogism>& syllogisms,
                                  UniversalRuleMode mode) {
  int n = 0;
  for (const auto& s : syllogisms) {
    if (s.complete() && check_universal_rule(s.udaharana, mode)) ++n;
  }
  return n;
}

// Best fallacy coverage under the configured set; "either" takes the better
// of both namings rather than mixing them.
int fallacy_coverage(const HetvabhasaPhase& phase, FallacySet set) {
  if (set == FallacySet::either) {
    return std::max(phase.checked_count(FallacySet::canonical),
                    phase.checked_count(FallacySet::alternate));
  }
  return phase.checked_count(set);
}

}  // namespace

std::string Violation::category() const {
  if (parse) return failure_category(*parse);
  switch (*semantic) {
    case SemanticViolation::pramana_type_missing: return "pramana_type_missing";
    case SemanticViolation::udaharana_no_universal_rule: return "udaharana_no_universal_rule";
    case SemanticViolation::hetvabhasa_incomplete: return "hetvabhasa_incomplete";
    case SemanticViolation::tarka_tautological: return "tarka_tautological";
  }
  return "other";
}

bool ValidationReport::all_phases_present() const {
  return std::all_of(phase_bitmap.begin(), phase_bitmap.end(), [](bool b) { return b; });
}

bool check_universal_rule(std::string_view udaharana, UniversalRuleMode mode) {
  auto tokens = tokenize(udaharana);
  auto wherever = std::find(tokens.begin(), tokens.end(), "wherever");
  if (wherever == tokens.end()) return false;
  if (mode == UniversalRuleMode::lenient) return true;
  // strict: a "there" consequent in the same sentence
  std::string norm = text::to_lower(std::string(udaharana));
  std::size_t start = norm.find("wherever");
  if (start == std::string::npos) return false;
  std::size_t stop = norm.find('.', start);
  std::string sentence = norm.substr(start, stop == std::string::npos ? std::string::npos
                                                                      : stop - start);
  auto sentence_tokens = tokenize(sentence);
  return std::count(sentence_tokens.begin(), sentence_tokens.end(), "there") > 0;
}

TarkaVerdict check_tarka_tautology(const TarkaPhase& tarka, const NirnayaPhase& nirnaya,
                                   const std::vector<Syllogism>& syllogisms) {
  const std::string& hypothesis =
      tarka.form == TarkaForm::single_test ? tarka.test : tarka.hypothesis;
  auto tokens = token_set(hypothesis);
  const bool negation_cue = tokens.count("not") || tokens.count("no") ||
                            tokens.count("cannot") || tokens.count("opposite") ||
                            tokens.count("negation") ||
                            (tokens.count("suppose") && tokens.count("false"));
  if (negation_cue) return TarkaVerdict::meaningful;

  std::string conclusion = trim(nirnaya.final_answer);
  if (conclusion.empty() && !syllogisms.empty()) {
    conclusion = syllogisms.back().nigamana;
  }
  if (conclusion.empty()) return TarkaVerdict::meaningful;
  return overlap(hypothesis, conclusion) >= 0.9 ? TarkaVerdict::tautological
                                                : TarkaVerdict::meaningful;
}

ValidationReport validate(const ParsedDocument& parsed, const ValidatorConfig& config) {
  ValidationReport report;
  const NyayaTrace& trace = parsed.trace;
  report.phase_bitmap = trace.phase_presence;
  report.syllogism_count = static_cast<int>(trace.pancha_avayava.size());

  for (const ParseFailure& f : parsed.failures) {
    Violation v;
    v.parse = f;
    v.message = f.message;
    report.violations.push_back(std::move(v));
  }

  if (trace.phase_present(Phase::pramana)) {
    for (PramanaKind kind : all_pramana_kinds()) {
      if (pramana_block_ok(trace.pramana, kind)) continue;
      Violation v;
      v.semantic = SemanticViolation::pramana_type_missing;
      v.pramana_kind = kind;
      v.message = "Pramana type missing: " + std::string(pramana_kind_key(kind));
      report.violations.push_back(std::move(v));
    }
  }

  for (std::size_t i = 0; i < trace.pancha_avayava.size(); ++i) {
    const Syllogism& s = trace.pancha_avayava[i];
    if (trim(s.udaharana).empty()) continue;  // already an incomplete_syllogism failure
    if (check_universal_rule(s.udaharana, config.universal_rule_mode)) continue;
    Violation v;
    v.semantic = SemanticViolation::udaharana_no_universal_rule;
    v.syllogism_index = static_cast<int>(i) + 1;
    v.message = "Udaharana " + std::to_string(i + 1) + " lacks a universal rule";
    report.violations.push_back(std::move(v));
  }

  if (trace.phase_present(Phase::hetvabhasa)) {
    int coverage = fallacy_coverage(trace.hetvabhasa, config.fallacy_set);
    if (coverage < 5) {
      Violation v;
      v.semantic = SemanticViolation::hetvabhasa_incomplete;
      v.checked_count = coverage;
      v.message = "Hetvabhasa incomplete: " + std::to_string(coverage) + " of 5 checks";
      report.violations.push_back(std::move(v));
    }
  }

  if (trace.phase_present(Phase::tarka) && trace.phase_present(Phase::nirnaya) &&
      check_tarka_tautology(trace.tarka, trace.nirnaya, trace.pancha_avayava) ==
          TarkaVerdict::tautological) {
    Violation v;
    v.semantic = SemanticViolation::tarka_tautological;
    v.message = "Tarka does not test the conclusion (tautological)";
    report.violations.push_back(std::move(v));
  }

  report.valid = report.violations.empty();
  report.quality_score = quality_score(parsed, config);
  return report;
}

int quality_score(const ParsedDocument& parsed, const ValidatorConfig& config) {
  const NyayaTrace& trace = parsed.trace;
  if (!trace.phase_present(Phase::samshaya) || !trace.phase_present(Phase::nirnaya)) return 0;
  if (!trace.phase_present(Phase::pramana) || !trace.phase_present(Phase::tarka) ||
      !trace.phase_present(Phase::hetvabhasa) || !trace.phase_present(Phase::pancha_avayava)) {
    return 0;
  }
  for (PramanaKind kind : all_pramana_kinds()) {
    if (!pramana_block_ok(trace.pramana, kind)) return 0;
  }
  if (complete_syllogisms_with_rule(trace.pancha_avayava, config.universal_rule_mode) < 2) {
    return 0;
  }
  if (check_tarka_tautology(trace.tarka, trace.nirnaya, trace.pancha_avayava) ==
      TarkaVerdict::tautological) {
    return 0;
  }
  int coverage = fallacy_coverage(trace.hetvabhasa, config.fallacy_set);
  if (coverage >= 5) return 10;
  if (coverage >= 3) return 7;
  return 0;
}

}  // namespace nyaya
