#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "nyaya/harness.hpp"
#include "text_util.hpp"

namespace nyaya {

namespace {

using text::is_blank;
using text::is_horizontal_rule;
using text::normalize_for_match;
using text::split_lines;
using text::trim;

std::string title_case_key(std::string_view key) {
  std::string out;
  bool start = true;
  for (char c : key) {
    if (c == '_') {
      out.push_back(' ');
      start = true;
    } else if (start) {
      out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
      start = false;
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::vector<std::string> quoted_literals(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (line[i] != '"') {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    std::string lit;
    while (j < line.size() && line[j] != '"') {
      if (line[j] == '\\' && j + 1 < line.size()) ++j;
      lit.push_back(line[j]);
      ++j;
    }
    out.push_back(lit);
    i = j + 1;
  }
  return out;
}

bool is_fence(std::string_view line) { return trim(line).rfind("```", 0) == 0; }

// Minimal field lookup with wrapped-line continuation, independent of the
// production parser so acceptor/validator agreement stays a real check.
std::string find_field(const std::vector<std::string>& lines, std::size_t begin, std::size_t end,
                       const std::set<std::string>& keys) {
  for (std::size_t i = begin; i < end; ++i) {
    std::string key, value;
    if (!text::parse_bold_label(lines[i], key, value)) continue;
    if (!keys.count(key)) continue;
    for (std::size_t j = i + 1; j < end; ++j) {
      const std::string& line = lines[j];
      if (is_blank(line) || is_horizontal_rule(line) || trim(line).front() == '#') break;
      std::string k, v;
      if (text::parse_bold_label(line, k, v)) break;
      value += ' ';
      value += trim(line);
    }
    return trim(value);
  }
  return "";
}

}  // namespace

std::string emit_grammar(const GrammarConfig& config) {
  std::ostringstream g;
  g << "# GBNF grammar for six-phase Nyaya reasoning traces.\n";
  g << "root ::= samshaya-section pramana-section pancha-avayava-section tarka-section "
       "hetvabhasa-section nirnaya-section\n";
  g << "\n";
  g << "nl ::= \"\\r\"? \"\\n\"\n";
  g << "divider ::= \"---\" nl\n";
  g << "pad ::= ( divider | nl )*\n";
  g << "gloss ::= \" (\" [^)\\r\\n]* \")\"\n";
  g << "rest ::= [^\\r\\n]*\n";
  g << "text-line ::= [^#\\r\\n] [^\\r\\n]* nl\n";
  g << "free-text ::= ( text-line | nl | divider )*\n";
  g << "cont ::= [^#*\\r\\n] [^\\r\\n]* nl\n";
  g << "\n";
  g << "samshaya-section ::= \"## Samshaya\" gloss? nl pad field-doubt-type free-text "
       "field-samshaya-justification free-text\n";
  g << "field-doubt-type ::= \"**Doubt Type**: \" doubt-type gloss? rest nl\n";
  g << "doubt-type ::= ";
  bool first = true;
  for (DoubtType t : all_doubt_types()) {
    if (!first) g << " | ";
    g << '"' << title_case_key(doubt_type_key(t)) << '"';
    first = false;
  }
  g << "\n";
  g << "field-samshaya-justification ::= \"**Justification**: \" rest nl cont*\n";
  g << "\n";
  g << "pramana-section ::= \"## Pramana\" gloss? nl pad sub-pratyaksha sub-anumana "
       "sub-upamana sub-shabda\n";
  g << "sub-pratyaksha ::= \"### Pratyaksha\" gloss? nl free-text\n";
  g << "sub-anumana ::= \"### Anumana\" gloss? nl free-text\n";
  g << "sub-upamana ::= \"### Upamana\" gloss? nl free-text\n";
  g << "sub-shabda ::= \"### Shabda\" gloss? nl free-text\n";
  g << "\n";
  g << "pancha-avayava-section ::= \"## Pancha Avayava\" gloss? nl pad syllogism+\n";
  g << "syllogism ::= \"### Syllogism \" [0-9]+ ( \":\" rest )? nl member-pratijna member-hetu "
       "member-udaharana member-upanaya member-nigamana free-text\n";
  g << "member-pratijna ::= \"**Pratijna\" gloss? \"**: \" rest nl cont*\n";
  g << "member-hetu ::= \"**Hetu\" gloss? \"**: \" rest nl cont*\n";
  g << "member-udaharana ::= \"**Udaharana\" gloss? \"**: \" rest nl cont*\n";
  g << "member-upanaya ::= \"**Upanaya\" gloss? \"**: \" rest nl cont*\n";
  g << "member-nigamana ::= \"**Nigamana\" gloss? \"**: \" rest nl cont*\n";
  g << "\n";
  g << "tarka-section ::= \"## Tarka\" gloss? nl pad ( tarka-four-field | tarka-single-test ) "
       "free-text\n";
  g << "tarka-four-field ::= field-hypothesis field-consequence field-analysis "
       "field-resolution\n";
  g << "field-hypothesis ::= \"**Hypothesis**: \" rest nl cont*\n";
  g << "field-consequence ::= \"**Consequence**: \" rest nl cont*\n";
  g << "field-analysis ::= \"**Analysis**: \" rest nl cont*\n";
  g << "field-resolution ::= \"**Resolution**: \" rest nl cont*\n";
  g << "tarka-single-test ::= \"**Test**: \" rest nl cont*\n";
  g << "\n";
  g << "hetvabhasa-section ::= \"## Hetvabhasa\" gloss? nl pad fallacy-block free-text\n";
  const bool canonical = config.fallacy_set != FallacySet::alternate;
  const bool alternate = config.fallacy_set != FallacySet::canonical;
  g << "fallacy-block ::= ";
  if (canonical) g << "fallacy-checks-canonical";
  if (canonical && alternate) g << " | ";
  if (alternate) g << "fallacy-checks-alternate";
  g << "\n";
  auto emit_set = [&](const char* rule, FallacySet set) {
    g << rule << " ::=";
    for (const auto& key : fallacy_keys(set)) g << " check-" << key;
    g << "\n";
    for (const auto& key : fallacy_keys(set)) {
      g << "check-" << key << " ::= check-prefix \"" << title_case_key(key)
        << "\" \":\" rest nl\n";
    }
  };
  if (canonical) emit_set("fallacy-checks-canonical", FallacySet::canonical);
  if (alternate) emit_set("fallacy-checks-alternate", FallacySet::alternate);
  g << "check-prefix ::= \"Check for \" | \"  \"\n";
  g << "\n";
  g << "nirnaya-section ::= \"## Nirnaya\" gloss? nl pad field-status? field-final-answer "
       "field-nirnaya-justification free-text\n";
  g << "field-status ::= \"**Status**: \" rest nl\n";
  g << "field-final-answer ::= \"**\" ( \"Final Answer\" | \"Answer\" ) \"**: \" rest nl cont*\n";
  g << "field-nirnaya-justification ::= \"**Justification**: \" rest nl cont*\n";
  return g.str();
}

bool grammar_accepts(std::string_view grammar_text, std::string_view trace_text) {
  // -- interpret the grammar text --
  std::vector<std::string> section_order;       // normalized header names
  std::vector<std::string> doubt_keys;          // normalized enum keys
  std::vector<std::vector<std::string>> fallacy_sets;
  std::vector<std::string> member_labels;       // normalized member keys

  std::vector<std::string> block_rules;
  std::map<std::string, std::vector<std::string>> set_rules;  // rule -> check rules
  std::map<std::string, std::string> check_names;             // check rule -> key

  for (const std::string& line : split_lines(grammar_text)) {
    std::size_t def = line.find("::=");
    if (def == std::string::npos) continue;
    std::string rule = trim(line.substr(0, def));
    std::string rhs = line.substr(def + 3);
    auto literals = quoted_literals(rhs);
    if (!literals.empty() && literals.front().rfind("## ", 0) == 0) {
      section_order.push_back(normalize_for_match(literals.front().substr(3)));
    }
    if (rule == "doubt-type") {
      for (const auto& lit : literals) doubt_keys.push_back(normalize_enum_token(lit));
    }
    if (rule.rfind("member-", 0) == 0 && !literals.empty()) {
      std::string label = literals.front();
      if (label.rfind("**", 0) == 0) label = label.substr(2);
      member_labels.push_back(normalize_enum_token(label));
    }
    if (rule == "fallacy-block") {
      std::istringstream refs(rhs);
      std::string tok;
      while (refs >> tok) {
        if (tok != "|") block_rules.push_back(tok);
      }
    }
    if (rule.rfind("fallacy-checks-", 0) == 0) {
      std::istringstream refs(rhs);
      std::string tok;
      while (refs >> tok) {
        if (tok.rfind("check-", 0) == 0) set_rules[rule].push_back(tok);
      }
    }
    if (rule.rfind("check-", 0) == 0 && !literals.empty()) {
      check_names[rule] = normalize_enum_token(literals.front());
    }
  }
  for (const auto& block : block_rules) {
    auto it = set_rules.find(block);
    if (it == set_rules.end()) continue;
    std::vector<std::string> keys;
    for (const auto& check : it->second) {
      auto name = check_names.find(check);
      if (name != check_names.end()) keys.push_back(name->second);
    }
    if (!keys.empty()) fallacy_sets.push_back(std::move(keys));
  }
  if (section_order.size() != kPhaseCount) return false;

  // -- scan the trace --
  std::vector<std::string> lines = split_lines(trace_text);
  struct Span {
    std::string name;
    std::size_t begin, end;
  };
  std::vector<Span> spans;
  bool in_fence = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (is_fence(lines[i])) in_fence = !in_fence;
    if (in_fence || lines[i].rfind("## ", 0) != 0) continue;
    std::string header = trim(lines[i].substr(3));
    std::size_t paren = header.find('(');
    if (paren != std::string::npos) header = trim(header.substr(0, paren));
    if (!spans.empty()) spans.back().end = i;
    spans.push_back({normalize_for_match(header), i + 1, lines.size()});
  }

  // first occurrence of each grammar section, in encounter order
  std::vector<std::string> seen;
  std::map<std::string, Span> by_name;
  for (const auto& s : spans) {
    if (std::find(section_order.begin(), section_order.end(), s.name) == section_order.end()) {
      continue;
    }
    if (by_name.count(s.name)) continue;
    by_name[s.name] = s;
    seen.push_back(s.name);
  }
  if (seen != section_order) return false;

  auto section = [&](std::size_t idx) { return by_name.at(section_order[idx]); };

  // Samshaya: enumerated doubt type + justification
  {
    Span s = section(0);
    std::string doubt = find_field(lines, s.begin, s.end, {"doubt_type"});
    if (doubt.empty()) return false;
    std::string key = normalize_enum_token(doubt);
    if (std::find(doubt_keys.begin(), doubt_keys.end(), key) == doubt_keys.end()) return false;
    if (find_field(lines, s.begin, s.end, {"justification"}).empty()) return false;
  }

  // Pramana: the four evidence subsections with non-blank bodies
  {
    Span s = section(1);
    std::map<std::string, bool> has;
    std::string current;
    for (std::size_t i = s.begin; i < s.end; ++i) {
      if (lines[i].rfind("### ", 0) == 0) {
        std::string name = trim(lines[i].substr(4));
        std::size_t paren = name.find('(');
        if (paren != std::string::npos) name = trim(name.substr(0, paren));
        current = normalize_for_match(name);
        continue;
      }
      if (!current.empty() && !is_blank(lines[i]) && !is_horizontal_rule(lines[i])) {
        has[current] = true;
      }
    }
    for (const char* kind : {"pratyaksha", "anumana", "upamana", "shabda"}) {
      if (!has[kind]) return false;
    }
  }

  // Pancha Avayava: at least one syllogism block, each with all member labels
  {
    Span s = section(2);
    std::vector<std::pair<std::size_t, std::size_t>> blocks;
    for (std::size_t i = s.begin; i < s.end; ++i) {
      if (lines[i].rfind("### ", 0) != 0) continue;
      if (!text::istarts_with(trim(lines[i].substr(4)), "syllogism")) continue;
      if (!blocks.empty()) blocks.back().second = i;
      blocks.push_back({i + 1, s.end});
    }
    if (blocks.empty()) return false;
    for (const auto& [begin, end] : blocks) {
      for (const auto& label : member_labels) {
        if (find_field(lines, begin, end, {label}).empty()) return false;
      }
    }
  }

  // Tarka: four-field (analysis required) or single test
  {
    Span s = section(3);
    bool four = !find_field(lines, s.begin, s.end, {"hypothesis"}).empty() ||
                !find_field(lines, s.begin, s.end, {"consequence"}).empty() ||
                !find_field(lines, s.begin, s.end, {"analysis"}).empty() ||
                !find_field(lines, s.begin, s.end, {"resolution"}).empty();
    if (four) {
      if (find_field(lines, s.begin, s.end, {"analysis"}).empty()) return false;
    } else if (find_field(lines, s.begin, s.end, {"test"}).empty()) {
      return false;
    }
  }

  // Hetvabhasa: one allowed naming set fully covered
  {
    Span s = section(4);
    std::set<std::string> found;
    for (std::size_t i = s.begin; i < s.end; ++i) {
      std::string line = trim(lines[i]);
      if (line.empty()) continue;
      if (text::istarts_with(line, "check for ")) {
        std::size_t colon = line.find(':');
        if (colon != std::string::npos) {
          found.insert(normalize_enum_token(line.substr(10, colon - 10)));
        }
        continue;
      }
      std::size_t colon = line.find(':');
      if (colon != std::string::npos) found.insert(normalize_enum_token(line.substr(0, colon)));
    }
    bool covered = false;
    for (const auto& set : fallacy_sets) {
      covered |= std::all_of(set.begin(), set.end(),
                             [&](const std::string& k) { return found.count(k) > 0; });
    }
    if (!covered) return false;
  }

  // Nirnaya: final answer (or answer) + justification
  {
    Span s = section(5);
    if (find_field(lines, s.begin, s.end, {"final_answer", "answer"}).empty()) return false;
    if (find_field(lines, s.begin, s.end, {"justification"}).empty()) return false;
  }

  return true;
}

}  // namespace nyaya
