#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nyaya/trace_model.hpp"

// Converts Markdown-with-frontmatter documents into Frontmatter + problem
// statement + NyayaTrace. All functions are pure; documents may be parsed
// concurrently with no shared state.

namespace nyaya {

enum class FailureCode {
  missing_section,
  missing_required_field,
  invalid_doubt_type,
  missing_syllogism,
  incomplete_syllogism,
  section_order_violation,
  frontmatter_missing_field,
  malformed_frontmatter,
};

struct ParseFailure {
  FailureCode code;
  std::optional<Phase> phase;          // missing_section / missing_required_field / order
  std::string field;                   // missing_required_field / frontmatter_missing_field
  std::string token;                   // invalid_doubt_type: normalized key
  int syllogism_index = 0;             // incomplete_syllogism, 1-based
  std::vector<std::string> missing_members;
  std::string message;
};

// Taxonomy buckets used for failure histograms. missing_required_field is
// qualified by the field name ("missing_required_field:justification").
std::string failure_category(const ParseFailure& f);

struct ParsedDocument {
  std::optional<Frontmatter> frontmatter;
  std::string problem_statement;  // "# Problem" body up to the first "##" section
  std::string trace_text;         // raw text from the first phase header onward
  NyayaTrace trace;
  std::vector<ParseFailure> failures;

  bool parse_ok() const { return failures.empty(); }
};

struct ParseOptions {
  // When set, absent mandatory frontmatter keys (id, problem_type,
  // ground_truth) are reported as failures.
  bool corpus_mode = false;
  // Reject any text before the first phase header.
  bool require_leading_samshaya = false;
};

// Parses a leading "---" ... "---" block. Returns the frontmatter (absent
// when the document does not start with a delimiter) and the remainder
// text after the closing delimiter. Failures are appended to `failures`.
std::pair<std::optional<Frontmatter>, std::string> parse_frontmatter(
    std::string_view document, std::vector<ParseFailure>& failures, bool corpus_mode = false);

struct Section {
  std::string name;   // header tokens before any parenthetical, e.g. "Pramana"
  std::string body;   // lines until the next "## " header
};

// Splits the post-frontmatter body on "## " headers. Horizontal rules are
// dropped; text before the first header lands in `leading_text`.
std::vector<Section> split_sections(std::string_view body, std::string& leading_text);

ParsedDocument parse_trace(std::string_view document, const ParseOptions& options = {});

enum class ReportingMode { primary, all };

// Histogram over taxonomy categories. In primary mode only the first
// failure of each document is counted, matching per-example error tables.
std::map<std::string, int> classify_failures(
    const std::vector<std::vector<ParseFailure>>& failures_per_document,
    ReportingMode mode = ReportingMode::all);

}  // namespace nyaya
