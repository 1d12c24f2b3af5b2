#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "nyaya/harness.hpp"
#include "nyaya/scoring.hpp"

// Evaluation report document: JSON serialization of per-example rows plus
// the corpus summary, with a self-consistency check on load.

namespace nyaya {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

struct ReportConfigEcho {
  std::vector<int> tiers;
  int max_new_tokens = 0;
  double temperature = 0.0;
  bool format_prompting = true;
  int samples = 1;
  std::string corpus;
  std::string source;  // replay directory or endpoint URL
};

struct ReportDocument {
  int schema_version = kReportSchemaVersion;
  std::string tool_version = kToolVersion;
  ReportConfigEcho config;
  std::vector<ScoredRecord> rows;
  EvalSummary summary;
};

ScoredRecord project_record(const EvalRecord& record);

ReportDocument build_report(const std::vector<EvalRecord>& records,
                            const ReportConfigEcho& config);

std::string report_to_json_text(const ReportDocument& report);

// Throws std::runtime_error on schema violations or when the embedded
// summary does not match a recomputation from the rows.
ReportDocument report_from_json_text(std::string_view json_text);

// Human-readable summary table.
std::string render_report_text(const ReportDocument& report);

// Validation verdict rendering shared by the CLI.
std::string validation_to_json_text(const std::string& path, const ParsedDocument& doc,
                                    const ValidationReport& report);

}  // namespace nyaya
