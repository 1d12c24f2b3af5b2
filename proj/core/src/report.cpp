#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "nyaya/report.hpp"
#include "text_util.hpp"

namespace nyaya {

using json = nlohmann::ordered_json;

namespace {

json summary_to_json(const EvalSummary& s) {
  json j;
  j["n"] = s.n;
  j["format_rate"] = s.format_rate;
  j["parse_rate"] = s.parse_rate;
  j["semantic_rate"] = s.semantic_rate;
  j["semantic_evaluated"] = s.semantic_evaluated;
  j["ci_format"] = {s.ci_format.first, s.ci_format.second};
  j["ci_semantic"] = {s.ci_semantic.first, s.ci_semantic.second};
  j["avg_output_length"] = s.avg_output_length;
  j["failure_histogram"] = s.failure_histogram;
  if (!s.per_condition.empty()) {
    json cells = json::array();
    for (const auto& c : s.per_condition) {
      cells.push_back({{"format_prompting", c.tag.format_prompting},
                       {"temperature", c.tag.temperature},
                       {"n", c.n},
                       {"format_rate", c.format_rate},
                       {"semantic_rate", c.semantic_rate}});
    }
    j["per_condition"] = cells;
  }
  return j;
}

EvalSummary summary_from_json(const json& j) {
  EvalSummary s;
  s.n = j.at("n").get<int>();
  s.format_rate = j.at("format_rate").get<double>();
  s.parse_rate = j.at("parse_rate").get<double>();
  s.semantic_rate = j.at("semantic_rate").get<double>();
  s.semantic_evaluated = j.at("semantic_evaluated").get<int>();
  s.ci_format = {j.at("ci_format")[0].get<double>(), j.at("ci_format")[1].get<double>()};
  s.ci_semantic = {j.at("ci_semantic")[0].get<double>(), j.at("ci_semantic")[1].get<double>()};
  s.avg_output_length = j.at("avg_output_length").get<double>();
  for (const auto& [key, value] : j.at("failure_histogram").items()) {
    s.failure_histogram[key] = value.get<int>();
  }
  if (j.contains("per_condition")) {
    for (const auto& c : j["per_condition"]) {
      ConditionCell cell;
      cell.tag.format_prompting = c.at("format_prompting").get<bool>();
      cell.tag.temperature = c.at("temperature").get<double>();
      cell.n = c.at("n").get<int>();
      cell.format_rate = c.at("format_rate").get<double>();
      cell.semantic_rate = c.at("semantic_rate").get<double>();
      s.per_condition.push_back(cell);
    }
  }
  return s;
}

bool summaries_equal(const EvalSummary& a, const EvalSummary& b) {
  auto close = [](double x, double y) { return std::abs(x - y) < 1e-12; };
  return a.n == b.n && close(a.format_rate, b.format_rate) && close(a.parse_rate, b.parse_rate) &&
         close(a.semantic_rate, b.semantic_rate) &&
         a.semantic_evaluated == b.semantic_evaluated &&
         close(a.ci_format.first, b.ci_format.first) &&
         close(a.ci_format.second, b.ci_format.second) &&
         close(a.ci_semantic.first, b.ci_semantic.first) &&
         close(a.ci_semantic.second, b.ci_semantic.second) &&
         close(a.avg_output_length, b.avg_output_length) &&
         a.failure_histogram == b.failure_histogram;
}

}  // namespace

ScoredRecord project_record(const EvalRecord& record) {
  ScoredRecord row;
  row.id = record.id;
  row.parse_ok = record.parsed.parse_ok();
  row.valid = record.report.valid;
  auto tier3 = record.tiers.find(3);
  row.semantic_evaluated = tier3 != record.tiers.end();
  row.semantic_match = row.semantic_evaluated && record.match.semantic_match;
  row.output_tokens = static_cast<long>(text::whitespace_token_count(record.raw_output));
  for (const auto& f : record.parsed.failures) {
    row.failure_categories.push_back(failure_category(f));
  }
  row.condition = record.condition;
  row.reward = record.reward;
  return row;
}

ReportDocument build_report(const std::vector<EvalRecord>& records,
                            const ReportConfigEcho& config) {
  ReportDocument report;
  report.config = config;
  for (const auto& r : records) report.rows.push_back(project_record(r));
  std::sort(report.rows.begin(), report.rows.end(),
            [](const ScoredRecord& a, const ScoredRecord& b) { return a.id < b.id; });
  report.summary = aggregate(report.rows);
  return report;
}

std::string report_to_json_text(const ReportDocument& report) {
  json j;
  j["schema_version"] = report.schema_version;
  j["tool_version"] = report.tool_version;
  json config;
  config["tiers"] = report.config.tiers;
  config["max_new_tokens"] = report.config.max_new_tokens;
  config["temperature"] = report.config.temperature;
  config["format_prompting"] = report.config.format_prompting;
  config["samples"] = report.config.samples;
  config["corpus"] = report.config.corpus;
  config["source"] = report.config.source;
  j["config"] = config;

  json rows = json::array();
  for (const auto& r : report.rows) {
    json row;
    row["id"] = r.id;
    row["parse_ok"] = r.parse_ok;
    row["valid"] = r.valid;
    row["semantic_evaluated"] = r.semantic_evaluated;
    row["semantic_match"] = r.semantic_match;
    row["output_tokens"] = r.output_tokens;
    row["failure_categories"] = r.failure_categories;
    row["reward"] = r.reward;
    if (r.condition) {
      row["condition"] = {{"format_prompting", r.condition->format_prompting},
                          {"temperature", r.condition->temperature}};
    }
    rows.push_back(row);
  }
  j["examples"] = rows;
  j["summary"] = summary_to_json(report.summary);
  return j.dump(2) + "\n";
}

ReportDocument report_from_json_text(std::string_view json_text) {
  json j = json::parse(json_text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw std::runtime_error("report: not a JSON object");
  }
  for (const char* key : {"schema_version", "tool_version", "config", "examples", "summary"}) {
    if (!j.contains(key)) throw std::runtime_error(std::string("report: missing key ") + key);
  }
  ReportDocument report;
  report.schema_version = j["schema_version"].get<int>();
  if (report.schema_version != kReportSchemaVersion) {
    throw std::runtime_error("report: unsupported schema version");
  }
  report.tool_version = j["tool_version"].get<std::string>();
  const json& config = j["config"];
  report.config.tiers = config.value("tiers", std::vector<int>{});
  report.config.max_new_tokens = config.value("max_new_tokens", 0);
  report.config.temperature = config.value("temperature", 0.0);
  report.config.format_prompting = config.value("format_prompting", true);
  report.config.samples = config.value("samples", 1);
  report.config.corpus = config.value("corpus", "");
  report.config.source = config.value("source", "");

  for (const auto& row : j["examples"]) {
    ScoredRecord r;
    r.id = row.at("id").get<std::string>();
    r.parse_ok = row.at("parse_ok").get<bool>();
    r.valid = row.at("valid").get<bool>();
    r.semantic_evaluated = row.at("semantic_evaluated").get<bool>();
    r.semantic_match = row.at("semantic_match").get<bool>();
    r.output_tokens = row.at("output_tokens").get<long>();
    r.failure_categories = row.value("failure_categories", std::vector<std::string>{});
    r.reward = row.value("reward", 0.0);
    if (row.contains("condition")) {
      ConditionTag tag;
      tag.format_prompting = row["condition"].at("format_prompting").get<bool>();
      tag.temperature = row["condition"].at("temperature").get<double>();
      r.condition = tag;
    }
    report.rows.push_back(std::move(r));
  }
  report.summary = summary_from_json(j["summary"]);

  // self-consistency: the stored summary must be recomputable from the rows
  EvalSummary recomputed = aggregate(report.rows);
  if (!summaries_equal(recomputed, report.summary)) {
    throw std::runtime_error("report: summary does not match per-example rows");
  }
  return report;
}

std::string render_report_text(const ReportDocument& report) {
  std::ostringstream out;
  const EvalSummary& s = report.summary;
  out << "examples: " << s.n << "\n";
  out << std::fixed << std::setprecision(3);
  out << "format adherence: " << s.format_rate << "  CI95 [" << s.ci_format.first << ", "
      << s.ci_format.second << "]\n";
  out << "parse success:    " << s.parse_rate << "\n";
  out << "semantic (over " << s.semantic_evaluated << " evaluated): " << s.semantic_rate
      << "  CI95 [" << s.ci_semantic.first << ", " << s.ci_semantic.second << "]\n";
  out << "avg output tokens (approx): " << std::setprecision(1) << s.avg_output_length << "\n";
  if (!s.failure_histogram.empty()) {
    out << "failure categories (primary per example):\n";
    for (const auto& [category, count] : s.failure_histogram) {
      out << "  " << category << ": " << count << "\n";
    }
  }
  out << "rows:\n";
  for (const auto& r : report.rows) {
    out << "  " << r.id << "  parse=" << (r.parse_ok ? "yes" : "no")
        << " valid=" << (r.valid ? "yes" : "no") << " semantic=";
    if (r.semantic_evaluated) {
      out << (r.semantic_match ? "yes" : "no");
    } else {
      out << "--";
    }
    out << " reward=" << std::setprecision(3) << r.reward;
    if (!r.failure_categories.empty()) out << "  [" << r.failure_categories.front() << "]";
    out << "\n";
  }
  return out.str();
}

std::string validation_to_json_text(const std::string& path, const ParsedDocument& doc,
                                    const ValidationReport& report) {
  json j;
  j["path"] = path;
  if (doc.frontmatter && !doc.frontmatter->id.empty()) j["id"] = doc.frontmatter->id;
  j["parse_ok"] = doc.parse_ok();
  j["valid"] = report.valid;
  j["quality_score"] = report.quality_score;
  j["syllogism_count"] = report.syllogism_count;
  json bitmap = json::array();
  for (bool b : report.phase_bitmap) bitmap.push_back(b);
  j["phase_bitmap"] = bitmap;
  json violations = json::array();
  for (const auto& v : report.violations) {
    violations.push_back({{"category", v.category()}, {"message", v.message}});
  }
  j["violations"] = violations;
  return j.dump(2) + "\n";
}

}  // namespace nyaya
