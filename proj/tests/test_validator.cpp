#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nyaya/trace_parser.hpp"
#include "nyaya/validator.hpp"
#include "support.hpp"

using namespace nyaya;
using testsupport::read_fixture;

namespace {

ValidationReport report_for(const std::string& text, ValidatorConfig config = {}) {
  return validate(parse_trace(text), config);
}

}  // namespace

TEST_CASE("a complete trace validates with an all-true phase bitmap") {
  ValidationReport report = report_for(read_fixture("traces/pets_complete.md"));
  CHECK(report.valid);
  CHECK(report.all_phases_present());
  CHECK(report.syllogism_count == 1);
  // schema validity and phase quality are independent gates: one complete
  // syllogism validates but scores zero
  CHECK(report.quality_score == 0);
}

TEST_CASE("a trace with a missing section is invalid") {
  ValidationReport report = report_for(read_fixture("traces/implication_chain_no_hetvabhasa.md"));
  CHECK_FALSE(report.valid);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].category() == "missing_hetvabhasa");
  CHECK_FALSE(report.all_phases_present());
}

TEST_CASE("valid implies all phases present and at least one syllogism") {
  const char* fixtures[] = {
      "corpus/stage1/test-001.md", "corpus/stage1/test-002.md", "corpus/stage1/test-003.md",
      "corpus/stage1/test-004.md", "corpus/stage1/test-005.md", "corpus/stage1/test-006.md",
      "corpus/stage1/test-007.md", "corpus/stage1/test-008.md", "corpus/stage1/seed-003.md",
      "corpus/stage1/seed-005.md",
  };
  for (const char* path : fixtures) {
    ValidationReport report = report_for(read_fixture(path));
    CHECK(report.valid);
    CHECK(report.all_phases_present());
    CHECK(report.syllogism_count >= 1);
  }
}

TEST_CASE("check_universal_rule lenient and strict modes") {
  CHECK(check_universal_rule(
      "Wherever a person cannot have an item, they must have one of the remaining items.",
      UniversalRuleMode::lenient));
  CHECK_FALSE(check_universal_rule(
      "Wherever a person cannot have an item, they must have one of the remaining items.",
      UniversalRuleMode::strict));
  CHECK(check_universal_rule(
      "Wherever a direct constraint assigns entity E to position P, there E occupies P.",
      UniversalRuleMode::strict));
  CHECK_FALSE(check_universal_rule("For instance, John sits in seat 5.",
                                   UniversalRuleMode::lenient));
  CHECK_FALSE(check_universal_rule("For instance, John sits in seat 5.",
                                   UniversalRuleMode::strict));
}

TEST_CASE("strict udaharana mode flags the lenient-only trace") {
  ValidatorConfig strict;
  strict.universal_rule_mode = UniversalRuleMode::strict;
  ValidationReport report = report_for(read_fixture("traces/pets_complete.md"), strict);
  CHECK_FALSE(report.valid);
  bool found = false;
  for (const auto& v : report.violations) {
    found |= v.category() == "udaharana_no_universal_rule";
  }
  CHECK(found);
}

TEST_CASE("tarka tautology heuristic") {
  std::vector<Syllogism> syllogisms;
  NirnayaPhase nirnaya;
  nirnaya.final_answer = "Alice has the fish, Bob has the cat, and Carol has the dog.";

  TarkaPhase meaningful;
  meaningful.hypothesis = "Suppose Alice does not have the fish or Carol does not have the dog.";
  CHECK(check_tarka_tautology(meaningful, nirnaya, syllogisms) == TarkaVerdict::meaningful);

  TarkaPhase tautological;
  tautological.hypothesis = "Alice has the fish, Bob has the cat, and Carol has the dog.";
  CHECK(check_tarka_tautology(tautological, nirnaya, syllogisms) == TarkaVerdict::tautological);

  TarkaPhase opposite;
  opposite.hypothesis = "Assume the opposite of the conclusion.";
  CHECK(check_tarka_tautology(opposite, nirnaya, syllogisms) == TarkaVerdict::meaningful);
}

TEST_CASE("quality score follows the phase-quality thresholds") {
  // two complete syllogisms, five checks, meaningful tarka
  CHECK(validate(parse_trace(read_fixture("corpus/stage0/seed-001.md")),
                 ValidatorConfig{})
            .quality_score == 10);

  // one syllogism scores zero despite schema validity
  CHECK(report_for(read_fixture("traces/pets_complete.md")).quality_score == 0);

  // 3 of 5 fallacies with two syllogisms lands in the partial-credit band
  std::string doc = read_fixture("corpus/stage1/test-002.md");
  auto drop_line = [](std::string text, const std::string& needle) {
    auto lines = testsupport::lines_of(text);
    std::vector<std::string> out;
    for (auto& line : lines) {
      if (line.find(needle) == std::string::npos) out.push_back(line);
    }
    return testsupport::join_lines(out);
  };
  std::string three_checks = drop_line(drop_line(doc, "sadhyasama"), "kalaatita");
  ParsedDocument parsed = parse_trace(three_checks);
  CHECK(quality_score(parsed) == 7);
  // and below three checks the score collapses to zero
  std::string two_checks = drop_line(three_checks, "prakaranasama");
  CHECK(quality_score(parse_trace(two_checks)) == 0);
}

TEST_CASE("explicit None under a pramana heading counts as present") {
  std::string base = read_fixture("traces/pets_complete.md");
  std::string pos = base.find("- Alice does not have the dog.") != std::string::npos
                        ? base.replace(base.find("- Alice does not have the dog."), 30, "- None")
                        : base;
  ValidationReport report = report_for(pos);
  CHECK(report.valid);
}

TEST_CASE("each violation code is reachable by a single edit of a valid fixture") {
  std::string base = read_fixture("traces/pets_complete.md");

  auto single_category = [](const ValidationReport& report) {
    REQUIRE(report.violations.size() == 1);
    return report.violations[0].category();
  };

  CHECK(single_category(report_for(testsupport::delete_section(base, "Hetvabhasa"))) ==
        "missing_hetvabhasa");
  CHECK(single_category(report_for(testsupport::swap_sections(base, 1, 3))) == "other");
  CHECK(single_category(report_for(testsupport::corrupt_doubt_type(base, "structural"))) ==
        "invalid_doubt_type");
  CHECK(single_category(report_for(testsupport::delete_member(base, "Upanaya"))) == "other");

  // pramana_type_missing via deleting one evidence subsection header
  std::string no_upamana;
  for (const auto& line : testsupport::lines_of(base)) {
    if (line.rfind("### Upamana", 0) == 0) continue;
    no_upamana += line + "\n";
  }
  ValidationReport pramana_report = report_for(no_upamana);
  REQUIRE(pramana_report.violations.size() == 1);
  CHECK(pramana_report.violations[0].category() == "pramana_type_missing");

  // udaharana_no_universal_rule via rewording the rule
  std::string no_rule = base;
  auto pos = no_rule.find("Wherever");
  REQUIRE(pos != std::string::npos);
  no_rule.replace(pos, 8, "Usually,");
  ValidationReport rule_report = report_for(no_rule);
  REQUIRE(rule_report.violations.size() == 1);
  CHECK(rule_report.violations[0].category() == "udaharana_no_universal_rule");

  // hetvabhasa_incomplete via dropping two check lines
  std::string fewer_checks;
  for (const auto& line : testsupport::lines_of(base)) {
    if (line.find("Satpratipaksha") != std::string::npos) continue;
    if (line.find("Badhita") != std::string::npos) continue;
    fewer_checks += line + "\n";
  }
  ValidationReport checks_report = report_for(fewer_checks);
  REQUIRE(checks_report.violations.size() == 1);
  CHECK(checks_report.violations[0].category() == "hetvabhasa_incomplete");
  CHECK(checks_report.violations[0].checked_count == 3);

  // tarka_tautological via restating the conclusion as the hypothesis
  std::string tautological = base;
  auto hyp = tautological.find("**Hypothesis**: Suppose Alice does not have the fish or Carol does");
  REQUIRE(hyp != std::string::npos);
  auto line_end = tautological.find("not have the dog.\n", hyp);
  REQUIRE(line_end != std::string::npos);
  tautological.replace(hyp, line_end + 18 - hyp,
                       "**Hypothesis**: Alice has the fish, Bob has the cat, and Carol has "
                       "the dog.\n");
  ValidationReport tarka_report = report_for(tautological);
  REQUIRE(tarka_report.violations.size() == 1);
  CHECK(tarka_report.violations[0].category() == "tarka_tautological");
}

TEST_CASE("fallacy-set configuration changes the verdict") {
  // the pets trace uses the alternate naming
  std::string base = read_fixture("traces/pets_complete.md");
  ValidatorConfig canonical_only;
  canonical_only.fallacy_set = FallacySet::canonical;
  CHECK_FALSE(report_for(base, canonical_only).valid);
  ValidatorConfig alternate_only;
  alternate_only.fallacy_set = FallacySet::alternate;
  CHECK(report_for(base, alternate_only).valid);
  CHECK(report_for(base, ValidatorConfig{}).valid);  // either

  // the seating corpus document uses the canonical yaml block
  std::string canonical_doc = read_fixture("corpus/stage1/test-002.md");
  CHECK(report_for(canonical_doc, canonical_only).valid);
  CHECK_FALSE(report_for(canonical_doc, alternate_only).valid);
}

TEST_CASE("corpus mode surfaces frontmatter failures through validation") {
  ParseOptions options;
  options.corpus_mode = true;
  ParsedDocument doc = parse_trace("---\nid: x\nproblem_type: boolean_sat\n---\n" +
                                       read_fixture("traces/pets_complete.md"),
                                   options);
  ValidationReport report = validate(doc);
  CHECK_FALSE(report.valid);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].parse->code == FailureCode::frontmatter_missing_field);
}
