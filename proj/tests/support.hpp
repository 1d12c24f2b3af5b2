#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

// Shared helpers for the test suites: fixture loading and text-level
// trace surgery used by the mutation properties.

namespace testsupport {

inline std::string fixture_path(const std::string& relative) {
  return std::string(NYAYA_FIXTURE_DIR) + "/" + relative;
}

inline std::string read_fixture(const std::string& relative) {
  std::ifstream in(fixture_path(relative), std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture: " + relative);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t i = 0;
  while (i <= text.size()) {
    std::size_t j = text.find('\n', i);
    if (j == std::string::npos) {
      if (i < text.size()) lines.push_back(text.substr(i));
      break;
    }
    lines.push_back(text.substr(i, j - i));
    i = j + 1;
  }
  return lines;
}

inline std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& line : lines) {
    out += line;
    out += '\n';
  }
  return out;
}

// [begin, end) line spans of the "## " sections of a trace.
struct SectionSpan {
  std::string header;  // full header line
  std::size_t begin = 0;
  std::size_t end = 0;
};

inline std::vector<SectionSpan> section_spans(const std::vector<std::string>& lines) {
  std::vector<SectionSpan> spans;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].rfind("## ", 0) != 0) continue;
    if (!spans.empty()) spans.back().end = i;
    spans.push_back({lines[i], i, lines.size()});
  }
  return spans;
}

inline std::string delete_section(const std::string& text, const std::string& phase_word) {
  auto lines = lines_of(text);
  auto spans = section_spans(lines);
  for (const auto& span : spans) {
    if (span.header.find(phase_word) == std::string::npos) continue;
    std::vector<std::string> out(lines.begin(), lines.begin() + static_cast<long>(span.begin));
    out.insert(out.end(), lines.begin() + static_cast<long>(span.end), lines.end());
    return join_lines(out);
  }
  throw std::runtime_error("section not found: " + phase_word);
}

inline std::string swap_sections(const std::string& text, std::size_t a, std::size_t b) {
  auto lines = lines_of(text);
  auto spans = section_spans(lines);
  if (a >= spans.size() || b >= spans.size()) throw std::runtime_error("bad span index");
  if (a > b) std::swap(a, b);
  std::vector<std::string> out(lines.begin(), lines.begin() + static_cast<long>(spans[a].begin));
  out.insert(out.end(), lines.begin() + static_cast<long>(spans[b].begin),
             lines.begin() + static_cast<long>(spans[b].end));
  out.insert(out.end(), lines.begin() + static_cast<long>(spans[a].end),
             lines.begin() + static_cast<long>(spans[b].begin));
  out.insert(out.end(), lines.begin() + static_cast<long>(spans[a].begin),
             lines.begin() + static_cast<long>(spans[a].end));
  out.insert(out.end(), lines.begin() + static_cast<long>(spans[b].end), lines.end());
  return join_lines(out);
}

inline std::string corrupt_doubt_type(const std::string& text, const std::string& bad_surface) {
  auto lines = lines_of(text);
  for (auto& line : lines) {
    if (line.find("**Doubt Type**:") != std::string::npos) {
      line = "**Doubt Type**: " + bad_surface;
      return join_lines(lines);
    }
  }
  throw std::runtime_error("no doubt type line");
}

// Removes a member label line (plus wrapped continuation) from the
// first syllogism block that carries it.
inline std::string delete_member(const std::string& text, const std::string& member_label) {
  auto lines = lines_of(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].rfind("**" + member_label, 0) != 0) continue;
    std::size_t end = i + 1;
    while (end < lines.size() && !lines[end].empty() && lines[end].rfind("**", 0) != 0 &&
           lines[end].rfind("#", 0) != 0 && lines[end].rfind("---", 0) != 0) {
      ++end;
    }
    std::vector<std::string> out(lines.begin(), lines.begin() + static_cast<long>(i));
    out.insert(out.end(), lines.begin() + static_cast<long>(end), lines.end());
    return join_lines(out);
  }
  throw std::runtime_error("member not found: " + member_label);
}

inline std::mt19937_64 seeded_rng(std::uint64_t seed = 20250811ULL) {
  return std::mt19937_64(seed);
}

}  // namespace testsupport
