#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nyaya/trace_parser.hpp"
#include "support.hpp"

using namespace nyaya;
using testsupport::read_fixture;

namespace {

std::vector<ParseFailure> failures_of(const std::string& text, ParseOptions options = {}) {
  return parse_trace(text, options).failures;
}

}  // namespace

TEST_CASE("frontmatter parses the template key subset") {
  std::string doc = read_fixture("corpus/stage1/test-001.md");
  std::vector<ParseFailure> failures;
  auto [fm, rest] = parse_frontmatter(doc, failures, true);
  REQUIRE(fm.has_value());
  CHECK(failures.empty());
  CHECK(fm->id == "test-001");
  CHECK(fm->problem_type == "constraint_satisfaction");
  CHECK(fm->difficulty == "simple");
  CHECK(fm->ground_truth == "Alice has the fish, Bob has the cat, Carol has the dog");
  CHECK(fm->z3_verifiable == true);
  CHECK(fm->metadata.at("author") == "manual");
  CHECK(rest.find("# Problem") != std::string::npos);
}

TEST_CASE("frontmatter absence leaves the text unchanged") {
  std::string text = "no delimiters here\n## Samshaya\n";
  std::vector<ParseFailure> failures;
  auto [fm, rest] = parse_frontmatter(text, failures);
  CHECK_FALSE(fm.has_value());
  CHECK(failures.empty());
  CHECK(rest == text);
}

TEST_CASE("frontmatter without a closing delimiter is malformed") {
  std::vector<ParseFailure> failures;
  auto [fm, rest] = parse_frontmatter("---\nid: x\nno closing\n", failures);
  CHECK_FALSE(fm.has_value());
  REQUIRE(failures.size() == 1);
  CHECK(failures[0].code == FailureCode::malformed_frontmatter);
  (void)rest;
}

TEST_CASE("corpus mode reports each absent mandatory key") {
  std::vector<ParseFailure> failures;
  parse_frontmatter("---\nid: x\nproblem_type: boolean_sat\n---\nbody\n", failures, true);
  REQUIRE(failures.size() == 1);
  CHECK(failures[0].code == FailureCode::frontmatter_missing_field);
  CHECK(failures[0].field == "ground_truth");
}

TEST_CASE("split_sections yields the six canonical sections for a complete trace") {
  std::string leading;
  auto sections = split_sections(read_fixture("traces/pets_complete.md"), leading);
  REQUIRE(sections.size() == 6);
  CHECK(sections[0].name == "Samshaya");
  CHECK(sections[1].name == "Pramana");
  CHECK(sections[2].name == "Pancha Avayava");
  CHECK(sections[3].name == "Tarka");
  CHECK(sections[4].name == "Hetvabhasa");
  CHECK(sections[5].name == "Nirnaya");
  CHECK(leading.empty());
}

TEST_CASE("split_sections ignores header glosses and horizontal rules") {
  std::string leading;
  auto a = split_sections("## Pramana (Sources of Knowledge)\nbody\n", leading);
  auto b = split_sections("## Pramana (Evidence Sources)\nbody\n", leading);
  REQUIRE(a.size() == 1);
  REQUIRE(b.size() == 1);
  CHECK(a[0].name == b[0].name);
  auto c = split_sections("---\n## Tarka\n---\ntext\n---\n", leading);
  REQUIRE(c.size() == 1);
  CHECK(c[0].body.find("---") == std::string::npos);
}

TEST_CASE("split_sections with no headers puts everything in leading text") {
  std::string leading;
  auto sections = split_sections("just prose\nmore prose\n", leading);
  CHECK(sections.empty());
  CHECK(leading == "just prose\nmore prose\n");
}

TEST_CASE("five-section trace parses with Hetvabhasa absent") {
  std::string leading;
  auto sections =
      split_sections(read_fixture("traces/implication_chain_no_hetvabhasa.md"), leading);
  REQUIRE(sections.size() == 5);
  CHECK(sections[4].name == "Nirnaya");
  CHECK(leading.find("chain of implications") != std::string::npos);

  auto failures = failures_of(read_fixture("traces/implication_chain_no_hetvabhasa.md"));
  REQUIRE(failures.size() == 1);
  CHECK(failures[0].code == FailureCode::missing_section);
  CHECK(failures[0].phase == Phase::hetvabhasa);
  CHECK(failures[0].message == "Missing required section: Hetvabhasa");
}

TEST_CASE("truncated trace reports both missing sections, Hetvabhasa first") {
  auto failures = failures_of(read_fixture("traces/implication_chain_truncated.md"));
  REQUIRE(failures.size() == 2);
  CHECK(failures[0].code == FailureCode::missing_section);
  CHECK(failures[0].phase == Phase::hetvabhasa);
  CHECK(failures[1].code == FailureCode::missing_section);
  CHECK(failures[1].phase == Phase::nirnaya);
}

TEST_CASE("complete trace parses cleanly with alternate fallacy names") {
  ParsedDocument doc = parse_trace(read_fixture("traces/pets_complete.md"));
  CHECK(doc.parse_ok());
  CHECK(doc.trace.pancha_avayava.size() == 1);
  CHECK(doc.trace.pancha_avayava[0].complete());
  CHECK(doc.trace.hetvabhasa.checked_count(FallacySet::alternate) == 5);
  REQUIRE(doc.trace.samshaya.doubt_type.has_value());
  CHECK(doc.trace.samshaya.doubt_type->key == "vipratipatti");
  CHECK(doc.trace.samshaya.doubt_type->is_canonical());
  // bold markers and parentheticals are stripped from member labels
  CHECK(doc.trace.pancha_avayava[0].pratijna.rfind("Alice has the fish", 0) == 0);
  // wrapped lines are joined
  CHECK(doc.trace.nirnaya.final_answer ==
        "Alice has the fish, Bob has the cat, and Carol has the dog.");
}

TEST_CASE("invalid doubt type carries the normalized token") {
  auto failures = failures_of(read_fixture("traces/seating_invalid_doubt.md"));
  REQUIRE(!failures.empty());
  CHECK(failures[0].code == FailureCode::invalid_doubt_type);
  CHECK(failures[0].token == "vipratipatti_samshaya");
  CHECK(failures[0].message == "Invalid doubt type: vipratipatti_samshaya");
}

TEST_CASE("leading text is tolerated by default and rejected in strict mode") {
  std::string text = read_fixture("traces/implication_chain_no_hetvabhasa.md");
  ParsedDocument tolerant = parse_trace(text);
  CHECK(tolerant.trace.leading_text.find("chain of implications") != std::string::npos);
  bool leading_flagged = false;
  for (const auto& f : tolerant.failures) {
    leading_flagged |= f.message.find("must start") != std::string::npos;
  }
  CHECK_FALSE(leading_flagged);

  ParseOptions strict;
  strict.require_leading_samshaya = true;
  ParsedDocument rejected = parse_trace(text, strict);
  bool found = false;
  for (const auto& f : rejected.failures) {
    found |= f.message.find("must start") != std::string::npos;
  }
  CHECK(found);
}

TEST_CASE("tarka forms: four-field requires Analysis, single Test stands alone") {
  std::string four = "## Samshaya\n**Doubt Type**: Vipratipatti\n**Justification**: j\n"
                     "## Tarka\n**Hypothesis**: h\n**Consequence**: c\n**Resolution**: r\n";
  ParsedDocument doc = parse_trace(four);
  bool missing_analysis = false;
  for (const auto& f : doc.failures) {
    missing_analysis |= f.code == FailureCode::missing_required_field && f.field == "Analysis";
  }
  CHECK(missing_analysis);

  std::string single = "## Tarka\n**Test**: Assume the opposite; contradiction follows.\n";
  ParsedDocument doc2 = parse_trace(single);
  CHECK(doc2.trace.tarka.form == TarkaForm::single_test);
  for (const auto& f : doc2.failures) {
    CHECK(f.phase != Phase::tarka);
  }
}

TEST_CASE("deleting any one phase yields exactly one missing_section failure") {
  std::string base = read_fixture("traces/pets_complete.md");
  const char* words[] = {"Samshaya", "Pramana", "Pancha", "Tarka", "Hetvabhasa", "Nirnaya"};
  for (int i = 0; i < 6; ++i) {
    std::string mutated = testsupport::delete_section(base, words[i]);
    auto failures = failures_of(mutated);
    REQUIRE(failures.size() == 1);
    CHECK(failures[0].code == FailureCode::missing_section);
    CHECK(static_cast<int>(*failures[0].phase) == i);
  }
}

TEST_CASE("swapping any two phases yields a section order violation") {
  std::string base = read_fixture("traces/pets_complete.md");
  for (std::size_t a = 0; a < 6; ++a) {
    for (std::size_t b = a + 1; b < 6; ++b) {
      std::string mutated = testsupport::swap_sections(base, a, b);
      auto failures = failures_of(mutated);
      REQUIRE(failures.size() == 1);
      CHECK(failures[0].code == FailureCode::section_order_violation);
    }
  }
}

TEST_CASE("corrupting the doubt type to any non-canonical token is caught") {
  std::string base = read_fixture("traces/pets_complete.md");
  const char* bad[] = {"Pramana Dharma", "Vipratipatti Samshaya (gloss)", "structural"};
  for (const char* surface : bad) {
    auto failures = failures_of(testsupport::corrupt_doubt_type(base, surface));
    REQUIRE(failures.size() == 1);
    CHECK(failures[0].code == FailureCode::invalid_doubt_type);
    CHECK(failures[0].token == normalize_enum_token(surface));
  }
}

TEST_CASE("member deletion yields exactly the incomplete_syllogism failure") {
  std::string base = read_fixture("traces/pets_complete.md");
  const char* members[] = {"Pratijna", "Hetu", "Udaharana", "Upanaya", "Nigamana"};
  for (const char* member : members) {
    auto failures = failures_of(testsupport::delete_member(base, member));
    REQUIRE(failures.size() == 1);
    CHECK(failures[0].code == FailureCode::incomplete_syllogism);
    CHECK(failures[0].syllogism_index == 1);
    REQUIRE(failures[0].missing_members.size() == 1);
    CHECK(failures[0].missing_members[0] == normalize_enum_token(member));
  }
}

TEST_CASE("the Answer label is accepted for the Nirnaya final answer") {
  std::string text = read_fixture("traces/pets_complete.md");
  auto pos = text.find("**Final Answer**:");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 17, "**Answer**:");
  ParsedDocument doc = parse_trace(text);
  CHECK(doc.parse_ok());
  CHECK(doc.trace.nirnaya.final_answer.rfind("Alice has the fish", 0) == 0);
}

TEST_CASE("anumana inference subtypes are collected when present") {
  ParsedDocument doc = parse_trace(read_fixture("corpus/stage1/test-005.md"),
                                   ParseOptions{.corpus_mode = true});
  REQUIRE(doc.parse_ok());
  const PramanaBlock& anumana = doc.trace.pramana.at(PramanaKind::anumana);
  REQUIRE(anumana.subtypes.size() == 2);
  CHECK(anumana.subtypes[0] == AnumanaSubtype::purvavat);
  // and the pets trace omits them, which is fine
  ParsedDocument pets = parse_trace(read_fixture("traces/pets_complete.md"));
  CHECK(pets.trace.pramana.at(PramanaKind::anumana).subtypes.empty());
}

TEST_CASE("a duplicated section keeps its first occurrence") {
  std::string text = read_fixture("traces/pets_complete.md");
  text += "\n## Nirnaya (Ascertainment)\n**Final Answer**: something else entirely\n"
          "**Justification**: duplicate block\n";
  ParsedDocument doc = parse_trace(text);
  CHECK(doc.parse_ok());
  CHECK(doc.trace.nirnaya.final_answer ==
        "Alice has the fish, Bob has the cat, and Carol has the dog.");
}

TEST_CASE("parse_trace is deterministic") {
  std::string text = read_fixture("traces/seating_invalid_doubt.md");
  ParsedDocument a = parse_trace(text);
  ParsedDocument b = parse_trace(text);
  REQUIRE(a.failures.size() == b.failures.size());
  for (std::size_t i = 0; i < a.failures.size(); ++i) {
    CHECK(a.failures[i].message == b.failures[i].message);
  }
  CHECK(a.trace_text == b.trace_text);
  CHECK(a.trace.leading_text == b.trace.leading_text);
}

TEST_CASE("parse_trace neither crashes nor wavers on arbitrary input") {
  auto rng = testsupport::seeded_rng(42424242);
  const char* tokens[] = {"## Samshaya", "## Pramana",  "### Syllogism 1:", "**Doubt Type**:",
                          "---",         "```",         "**Justification**:", "## Nirnaya",
                          "- item",      "plain text",  "**Test**:",          "# Problem",
                          "Check for Viruddha: No",     "(gloss",             "::"};
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    int lines = static_cast<int>(rng() % 30);
    for (int i = 0; i < lines; ++i) {
      text += tokens[rng() % (sizeof(tokens) / sizeof(tokens[0]))];
      if (rng() % 3 == 0) text += " extra words";
      text += '\n';
    }
    ParsedDocument a = parse_trace(text);
    ParsedDocument b = parse_trace(text);
    CHECK(a.failures.size() == b.failures.size());
    CHECK(a.trace.phases_present() == b.trace.phases_present());
  }
}

TEST_CASE("classify_failures reproduces the per-example error tables") {
  const char* stage1_ids[] = {"seed-003", "seed-005", "test-001", "test-002", "test-003",
                              "test-004", "test-005", "test-006", "test-007", "test-008"};
  std::vector<std::vector<ParseFailure>> stage1;
  for (const char* id : stage1_ids) {
    stage1.push_back(failures_of(read_fixture(std::string("replay/stage1/") + id + ".md")));
  }
  auto histogram = classify_failures(stage1, ReportingMode::primary);
  CHECK(histogram["missing_hetvabhasa"] == 2);
  CHECK(histogram["missing_nirnaya"] == 1);
  CHECK(histogram["missing_required_field:justification"] == 1);
  CHECK(histogram["invalid_doubt_type"] == 2);
  CHECK(histogram.size() == 4);

  SUBCASE("empty input gives an all-zero histogram") {
    CHECK(classify_failures({}, ReportingMode::primary).empty());
  }

  SUBCASE("combined set adds the pancha-avayava categories") {
    const char* stage0_ids[] = {"seed-001", "seed-003", "test-001", "test-003",
                                "test-005", "test-007", "test-008"};
    auto combined = stage1;
    for (const char* id : stage0_ids) {
      combined.push_back(failures_of(read_fixture(std::string("replay/stage0/") + id + ".md")));
    }
    auto table = classify_failures(combined, ReportingMode::primary);
    CHECK(table["missing_hetvabhasa"] == 2);
    CHECK(table["missing_nirnaya"] == 1);
    CHECK(table["missing_required_field:justification"] == 1);
    CHECK(table["invalid_doubt_type"] == 2);
    CHECK(table["missing_pancha_avayava"] == 1);
    CHECK(table["missing_syllogism"] == 1);
    CHECK(table.size() == 6);
  }

  SUBCASE("all mode counts every failure of a document") {
    auto all = classify_failures(stage1, ReportingMode::all);
    // the truncated seating trace contributes its missing sections too
    CHECK(all["missing_hetvabhasa"] == 3);
    CHECK(all["missing_nirnaya"] == 2);
  }
}
