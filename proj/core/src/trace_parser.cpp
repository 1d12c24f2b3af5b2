#include "nyaya/trace_parser.hpp"

#include <algorithm>
#include <array>
#include <sstream>

#include "text_util.hpp"

namespace nyaya {

namespace {

using text::is_blank;
using text::is_horizontal_rule;
using text::normalize_for_match;
using text::split_lines;
using text::trim;

bool is_fence(std::string_view line) { return trim(line).rfind("```", 0) == 0; }

std::string unquote(std::string s) {
  s = trim(s);
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\''))) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

std::optional<bool> parse_bool(std::string_view s) {
  std::string v = text::to_lower(trim(s));
  if (v == "true" || v == "yes") return true;
  if (v == "false" || v == "no") return false;
  return std::nullopt;
}

std::optional<Phase> phase_from_name(std::string_view name) {
  std::string norm = normalize_for_match(name);
  for (Phase p : canonical_phase_order()) {
    if (norm == normalize_for_match(phase_name(p))) return p;
  }
  return std::nullopt;
}

ParseFailure make_missing_section(Phase p) {
  ParseFailure f;
  f.code = FailureCode::missing_section;
  f.phase = p;
  f.message = "Missing required section: " + std::string(phase_name(p));
  return f;
}

ParseFailure make_missing_field(Phase p, std::string field) {
  ParseFailure f;
  f.code = FailureCode::missing_required_field;
  f.phase = p;
  f.message = "Missing " + std::string(phase_name(p)) + " " + field + " field";
  f.field = std::move(field);
  return f;
}

// An ordered "**Label**: value" field list with wrapped-line continuation.
struct FieldScan {
  std::map<std::string, std::string> values;

  const std::string* get(std::string_view key) const {
    auto it = values.find(std::string(key));
    if (it == values.end() || trim(it->second).empty()) return nullptr;
    return &it->second;
  }
};

FieldScan scan_fields(std::string_view body) {
  FieldScan out;
  std::string current_key;
  bool in_fence = false;
  for (const std::string& line : split_lines(body)) {
    if (is_fence(line)) {
      in_fence = !in_fence;
      current_key.clear();
      continue;
    }
    if (in_fence) continue;
    if (is_blank(line) || is_horizontal_rule(line) || trim(line).front() == '#') {
      current_key.clear();
      continue;
    }
    std::string key, value;
    if (text::parse_bold_label(line, key, value)) {
      current_key = key;
      if (out.values.find(key) == out.values.end()) out.values[key] = value;
      continue;
    }
    if (!current_key.empty()) {
      std::string& v = out.values[current_key];
      if (!v.empty()) v += ' ';
      v += trim(line);
    }
  }
  return out;
}

std::vector<Section> split_on_header(std::string_view body, std::string_view marker,
                                     std::string& leading) {
  std::vector<Section> sections;
  std::ostringstream lead;
  std::ostringstream* sink = &lead;
  std::ostringstream current;
  bool in_fence = false;
  auto flush = [&] {
    if (!sections.empty()) sections.back().body = current.str();
    current.str("");
  };
  for (const std::string& line : split_lines(body)) {
    if (is_fence(line)) in_fence = !in_fence;
    if (!in_fence && line.rfind(marker, 0) == 0) {
      flush();
      std::string header = trim(line.substr(marker.size()));
      std::size_t paren = header.find('(');
      std::string name = trim(paren == std::string::npos ? header : header.substr(0, paren));
      sections.push_back({name, ""});
      sink = &current;
      continue;
    }
    if (!in_fence && is_horizontal_rule(line)) continue;
    (*sink) << line << '\n';
  }
  flush();
  leading = lead.str();
  return sections;
}

SamshayaPhase parse_samshaya(std::string_view body, std::vector<ParseFailure>& failures) {
  SamshayaPhase out;
  FieldScan fields = scan_fields(body);
  if (const std::string* doubt = fields.get("doubt_type")) {
    DoubtValue v;
    v.raw = *doubt;
    v.key = normalize_enum_token(*doubt);
    v.canonical = doubt_type_from_key(v.key);
    out.doubt_type = v;
    if (!v.is_canonical()) {
      ParseFailure f;
      f.code = FailureCode::invalid_doubt_type;
      f.phase = Phase::samshaya;
      f.token = v.key;
      f.message = "Invalid doubt type: " + v.key;
      failures.push_back(std::move(f));
    }
  } else {
    failures.push_back(make_missing_field(Phase::samshaya, "Doubt Type"));
  }
  if (const std::string* just = fields.get("justification")) {
    out.justification = *just;
  } else {
    failures.push_back(make_missing_field(Phase::samshaya, "Justification"));
  }
  return out;
}

std::map<PramanaKind, PramanaBlock> parse_pramana(std::string_view body) {
  std::map<PramanaKind, PramanaBlock> out;
  std::string ignored;
  for (const Section& sub : split_on_header(body, "### ", ignored)) {
    std::string norm = normalize_for_match(sub.name);
    for (PramanaKind k : all_pramana_kinds()) {
      if (norm != pramana_kind_key(k)) continue;
      PramanaBlock block;
      block.present = true;
      block.content = trim(sub.body);
      for (const std::string& line : split_lines(sub.body)) {
        std::string t = trim(line);
        if (t.rfind("- ", 0) == 0) t = trim(t.substr(2));
        if (text::istarts_with(t, "type:")) {
          auto subtype = anumana_subtype_from_key(normalize_enum_token(t.substr(5)));
          if (subtype) block.subtypes.push_back(*subtype);
        }
      }
      if (out.find(k) == out.end()) out[k] = std::move(block);
    }
  }
  return out;
}

std::vector<Syllogism> parse_pancha_avayava(std::string_view body,
                                            std::vector<ParseFailure>& failures) {
  std::vector<Syllogism> out;
  std::string ignored;
  for (const Section& sub : split_on_header(body, "### ", ignored)) {
    if (!text::istarts_with(normalize_for_match(sub.name), "syllogism")) continue;
    Syllogism s;
    // topic text after "Syllogism N:" was stripped with the parenthetical
    // rule only if parenthesised; recover it from the raw name.
    std::size_t colon = sub.name.find(':');
    if (colon != std::string::npos) s.topic = trim(sub.name.substr(colon + 1));
    FieldScan fields = scan_fields(sub.body);
    if (const std::string* v = fields.get("pratijna")) s.pratijna = *v;
    if (const std::string* v = fields.get("hetu")) s.hetu = *v;
    if (const std::string* v = fields.get("udaharana")) s.udaharana = *v;
    if (const std::string* v = fields.get("upanaya")) s.upanaya = *v;
    if (const std::string* v = fields.get("nigamana")) s.nigamana = *v;
    out.push_back(std::move(s));
  }
  if (out.empty()) {
    ParseFailure f;
    f.code = FailureCode::missing_syllogism;
    f.phase = Phase::pancha_avayava;
    f.message = "Pancha Avayava missing syllogism";
    failures.push_back(std::move(f));
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto missing = out[i].missing_members();
    if (missing.empty()) continue;
    ParseFailure f;
    f.code = FailureCode::incomplete_syllogism;
    f.phase = Phase::pancha_avayava;
    f.syllogism_index = static_cast<int>(i) + 1;
    f.missing_members = missing;
    std::string joined;
    for (const auto& m : missing) {
      if (!joined.empty()) joined += ", ";
      joined += m;
    }
    f.message = "Incomplete syllogism " + std::to_string(i + 1) + ": missing " + joined;
    failures.push_back(std::move(f));
  }
  return out;
}

TarkaPhase parse_tarka(std::string_view body, std::vector<ParseFailure>& failures) {
  TarkaPhase out;
  FieldScan fields = scan_fields(body);
  const bool four_field = fields.get("hypothesis") || fields.get("consequence") ||
                          fields.get("analysis") || fields.get("resolution");
  if (!four_field && fields.get("test")) {
    out.form = TarkaForm::single_test;
    out.test = *fields.get("test");
    return out;
  }
  out.form = TarkaForm::four_field;
  if (const std::string* v = fields.get("hypothesis")) out.hypothesis = *v;
  if (const std::string* v = fields.get("consequence")) out.consequence = *v;
  if (const std::string* v = fields.get("analysis")) out.analysis = *v;
  if (const std::string* v = fields.get("resolution")) out.resolution = *v;
  if (out.analysis.empty()) {
    failures.push_back(make_missing_field(Phase::tarka, "Analysis"));
  }
  return out;
}

HetvabhasaPhase parse_hetvabhasa(std::string_view body) {
  HetvabhasaPhase out;
  const auto& known = fallacy_keys(FallacySet::either);
  for (const std::string& raw_line : split_lines(body)) {
    std::string line = trim(raw_line);
    if (line.empty() || is_fence(line)) continue;
    if (text::istarts_with(line, "check for ")) {
      std::size_t colon = line.find(':');
      if (colon == std::string::npos) continue;
      std::string key = normalize_enum_token(line.substr(10, colon - 10));
      out.checks[key] = trim(line.substr(colon + 1));
      continue;
    }
    std::size_t colon = line.find(':');
    if (colon == std::string::npos) continue;
    std::string key = normalize_enum_token(line.substr(0, colon));
    std::string value = trim(line.substr(colon + 1));
    if (key == "reasoning") {
      out.reasoning = unquote(value);
    } else if (std::find(known.begin(), known.end(), key) != known.end()) {
      out.checks[key] = value;
    }
  }
  return out;
}

NirnayaPhase parse_nirnaya(std::string_view body, std::vector<ParseFailure>& failures) {
  NirnayaPhase out;
  FieldScan fields = scan_fields(body);
  if (const std::string* v = fields.get("status")) {
    std::string key = normalize_enum_token(*v);
    if (key == "definitive_knowledge") {
      out.status = NirnayaStatus::definitive_knowledge;
    } else if (key.rfind("hypothesis", 0) == 0) {
      out.status = NirnayaStatus::hypothesis_requiring_verification;
    }
  }
  const std::string* answer = fields.get("final_answer");
  if (!answer) answer = fields.get("answer");
  if (answer) {
    out.final_answer = *answer;
  } else {
    failures.push_back(make_missing_field(Phase::nirnaya, "Final Answer"));
  }
  if (const std::string* v = fields.get("justification")) {
    out.justification = *v;
  } else {
    failures.push_back(make_missing_field(Phase::nirnaya, "Justification"));
  }
  if (const std::string* v = fields.get("confidence")) {
    std::string key = normalize_enum_token(*v);
    if (key.rfind("high", 0) == 0) out.confidence = Confidence::high;
    else if (key.rfind("medium", 0) == 0) out.confidence = Confidence::medium;
    else if (key.rfind("low", 0) == 0) out.confidence = Confidence::low;
  }
  return out;
}

}  // namespace

std::string failure_category(const ParseFailure& f) {
  switch (f.code) {
    case FailureCode::missing_section:
      if (f.phase == Phase::hetvabhasa) return "missing_hetvabhasa";
      if (f.phase == Phase::nirnaya) return "missing_nirnaya";
      if (f.phase == Phase::pancha_avayava) return "missing_pancha_avayava";
      return "other";
    case FailureCode::missing_required_field: {
      std::string field = normalize_for_match(f.field);
      for (char& c : field) {
        if (c == ' ') c = '_';
      }
      return "missing_required_field:" + field;
    }
    case FailureCode::invalid_doubt_type: return "invalid_doubt_type";
    case FailureCode::missing_syllogism: return "missing_syllogism";
    default: return "other";
  }
}

std::pair<std::optional<Frontmatter>, std::string> parse_frontmatter(
    std::string_view document, std::vector<ParseFailure>& failures, bool corpus_mode) {
  auto report_missing = [&](const Frontmatter* fm) {
    if (!corpus_mode) return;
    static const std::array<const char*, 3> required = {"id", "problem_type", "ground_truth"};
    for (const char* key : required) {
      bool present = false;
      if (fm) {
        if (std::string_view(key) == "id") present = !fm->id.empty();
        if (std::string_view(key) == "problem_type") present = !fm->problem_type.empty();
        if (std::string_view(key) == "ground_truth") present = !fm->ground_truth.empty();
      }
      if (!present) {
        ParseFailure f;
        f.code = FailureCode::frontmatter_missing_field;
        f.field = key;
        f.message = std::string("Missing frontmatter field: ") + key;
        failures.push_back(std::move(f));
      }
    }
  };

  std::vector<std::string> lines = split_lines(document);
  if (lines.empty() || trim(lines[0]) != "---") {
    report_missing(nullptr);
    return {std::nullopt, std::string(document)};
  }

  std::size_t close = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]) == "---") {
      close = i;
      break;
    }
  }
  if (close == 0) {
    ParseFailure f;
    f.code = FailureCode::malformed_frontmatter;
    f.message = "Malformed frontmatter: missing closing delimiter";
    failures.push_back(std::move(f));
    report_missing(nullptr);
    std::ostringstream rest;
    for (std::size_t i = 1; i < lines.size(); ++i) rest << lines[i] << '\n';
    return {std::nullopt, rest.str()};
  }

  Frontmatter fm;
  bool in_metadata = false;
  for (std::size_t i = 1; i < close; ++i) {
    const std::string& line = lines[i];
    if (is_blank(line)) continue;
    bool indented = line.rfind("  ", 0) == 0 || line.rfind('\t', 0) == 0;
    std::string t = trim(line);
    std::size_t colon = t.find(':');
    if (colon == std::string::npos) continue;
    std::string key = trim(t.substr(0, colon));
    std::string value = unquote(t.substr(colon + 1));

    if (!indented) in_metadata = false;
    if (!indented && key == "metadata" && value.empty()) {
      in_metadata = true;
      continue;
    }

    auto assign = [&](const std::string& k, const std::string& v) {
      if (k == "id") fm.id = v;
      else if (k == "problem_type") fm.problem_type = v;
      else if (k == "difficulty") fm.difficulty = v;
      else if (k == "ground_truth") fm.ground_truth = v;
      else if (k == "z3_verifiable") fm.z3_verifiable = parse_bool(v);
      else if (k == "negative_example") fm.negative_example = parse_bool(v);
      else fm.metadata[k] = v;
    };
    if (in_metadata && indented) {
      if (key == "z3_verifiable" || key == "negative_example") {
        assign(key, value);
      } else {
        fm.metadata[key] = value;
      }
    } else {
      assign(key, value);
    }
  }

  std::ostringstream rest;
  for (std::size_t i = close + 1; i < lines.size(); ++i) rest << lines[i] << '\n';
  report_missing(&fm);
  return {fm, rest.str()};
}

std::vector<Section> split_sections(std::string_view body, std::string& leading_text) {
  return split_on_header(body, "## ", leading_text);
}

ParsedDocument parse_trace(std::string_view document, const ParseOptions& options) {
  ParsedDocument doc;
  auto [fm, body] = parse_frontmatter(document, doc.failures, options.corpus_mode);
  doc.frontmatter = fm;

  // Peel off a "# Problem" block when present, keeping its body up to the
  // first "## " section header.
  {
    std::vector<std::string> lines = split_lines(body);
    std::size_t first_section = lines.size();
    bool in_fence = false;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (is_fence(lines[i])) in_fence = !in_fence;
      if (!in_fence && lines[i].rfind("## ", 0) == 0) {
        first_section = i;
        break;
      }
    }
    std::size_t problem_start = lines.size();
    for (std::size_t i = 0; i < first_section; ++i) {
      if (lines[i].rfind("# ", 0) == 0 &&
          normalize_for_match(lines[i].substr(2)) == "problem") {
        problem_start = i;
        break;
      }
    }
    if (problem_start < first_section) {
      std::ostringstream problem;
      for (std::size_t i = problem_start + 1; i < first_section; ++i) {
        if (is_horizontal_rule(lines[i])) continue;
        problem << lines[i] << '\n';
      }
      doc.problem_statement = trim(problem.str());
      // drop the consumed problem block from the leading text
      std::ostringstream remain;
      for (std::size_t i = 0; i < problem_start; ++i) remain << lines[i] << '\n';
      for (std::size_t i = first_section; i < lines.size(); ++i) remain << lines[i] << '\n';
      body = remain.str();
    }
  }

  std::string leading;
  std::vector<Section> sections = split_sections(body, leading);
  doc.trace.leading_text = trim(leading);

  // Raw trace slice, from the first phase header onward.
  {
    std::size_t pos = std::string::npos;
    std::string_view b = body;
    if (b.rfind("## ", 0) == 0) pos = 0;
    if (pos == std::string::npos) {
      auto p = b.find("\n## ");
      if (p != std::string::npos) pos = p + 1;
    }
    doc.trace_text = pos == std::string::npos ? "" : trim(std::string(b.substr(pos)));
    if (!doc.trace_text.empty()) doc.trace_text += '\n';
  }

  if (options.require_leading_samshaya && !doc.trace.leading_text.empty()) {
    ParseFailure f;
    f.code = FailureCode::section_order_violation;
    f.phase = Phase::samshaya;
    f.message = "Response must start with the Samshaya section";
    doc.failures.push_back(std::move(f));
  }

  // First occurrence of each phase, in encounter order.
  std::array<const Section*, kPhaseCount> found{};
  std::vector<Phase> encounter_order;
  for (const Section& s : sections) {
    auto phase = phase_from_name(s.name);
    if (!phase) continue;
    auto idx = static_cast<std::size_t>(*phase);
    if (!found[idx]) {
      found[idx] = &s;
      encounter_order.push_back(*phase);
    }
  }

  for (Phase p : canonical_phase_order()) {
    const Section* sec = found[static_cast<std::size_t>(p)];
    doc.trace.phase_presence[static_cast<std::size_t>(p)] = sec != nullptr;
    if (!sec) {
      doc.failures.push_back(make_missing_section(p));
      continue;
    }
    switch (p) {
      case Phase::samshaya: doc.trace.samshaya = parse_samshaya(sec->body, doc.failures); break;
      case Phase::pramana: doc.trace.pramana = parse_pramana(sec->body); break;
      case Phase::pancha_avayava:
        doc.trace.pancha_avayava = parse_pancha_avayava(sec->body, doc.failures);
        break;
      case Phase::tarka: doc.trace.tarka = parse_tarka(sec->body, doc.failures); break;
      case Phase::hetvabhasa: doc.trace.hetvabhasa = parse_hetvabhasa(sec->body); break;
      case Phase::nirnaya: doc.trace.nirnaya = parse_nirnaya(sec->body, doc.failures); break;
    }
  }

  // One violation for the first phase found out of canonical order.
  for (std::size_t i = 1; i < encounter_order.size(); ++i) {
    if (static_cast<int>(encounter_order[i]) < static_cast<int>(encounter_order[i - 1])) {
      ParseFailure f;
      f.code = FailureCode::section_order_violation;
      f.phase = encounter_order[i];
      f.message = "Section order violation: " + std::string(phase_name(encounter_order[i])) +
                  " out of canonical position";
      doc.failures.push_back(std::move(f));
      break;
    }
  }

  return doc;
}

std::map<std::string, int> classify_failures(
    const std::vector<std::vector<ParseFailure>>& failures_per_document, ReportingMode mode) {
  std::map<std::string, int> histogram;
  for (const auto& failures : failures_per_document) {
    if (failures.empty()) continue;
    if (mode == ReportingMode::primary) {
      ++histogram[failure_category(failures.front())];
    } else {
      for (const auto& f : failures) ++histogram[failure_category(f)];
    }
  }
  return histogram;
}

}  // namespace nyaya
