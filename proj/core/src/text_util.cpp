#include "text_util.hpp"

#include <cctype>

namespace nyaya::text {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

}  // namespace

std::string trim(std::string_view s) {
  std::size_t b = 0;
  while (b < s.size() && is_space(s[b])) ++b;
  std::size_t e = s.size();
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::string to_lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) out.push_back(lower(c));
  return out;
}

std::string normalize_for_match(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (is_alnum(c)) {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(lower(c));
    } else {
      pending_space = true;
    }
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view s) {
  std::string norm = normalize_for_match(s);
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < norm.size()) {
    std::size_t j = norm.find(' ', i);
    if (j == std::string::npos) j = norm.size();
    if (j > i) out.emplace_back(norm.substr(i, j - i));
    i = j + 1;
  }
  return out;
}

std::set<std::string> token_set(std::string_view s) {
  auto toks = tokenize(s);
  return {toks.begin(), toks.end()};
}

std::size_t whitespace_token_count(std::string_view s) {
  std::size_t count = 0;
  bool in_token = false;
  for (char c : s) {
    if (is_space(c)) {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      ++count;
    }
  }
  return count;
}

std::string strip_bold(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    if (i + 1 < s.size() && s[i] == '*' && s[i + 1] == '*') {
      i += 2;
    } else {
      out.push_back(s[i]);
      ++i;
    }
  }
  return out;
}

std::string strip_parentheticals(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  int depth = 0;
  for (char c : s) {
    if (c == '(') {
      ++depth;
    } else if (c == ')') {
      if (depth > 0) --depth;
    } else if (depth == 0) {
      out.push_back(c);
    }
  }
  return out;
}

std::vector<std::string> split_lines(std::string_view s) {
  std::vector<std::string> lines;
  std::size_t i = 0;
  while (i <= s.size()) {
    std::size_t j = s.find('\n', i);
    if (j == std::string::npos) {
      if (i < s.size()) lines.emplace_back(s.substr(i));
      break;
    }
    std::string_view line = s.substr(i, j - i);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.emplace_back(line);
    i = j + 1;
  }
  return lines;
}

bool is_horizontal_rule(std::string_view line) {
  std::string t = trim(line);
  return t.size() >= 3 && t.find_first_not_of('-') == std::string::npos;
}

bool is_blank(std::string_view line) { return trim(line).empty(); }

bool parse_bold_label(std::string_view line, std::string& label_key, std::string& value) {
  std::string_view rest = line;
  // optional leading list marker
  std::size_t pos = 0;
  while (pos < rest.size() && (rest[pos] == ' ' || rest[pos] == '\t')) ++pos;
  if (pos + 1 < rest.size() && rest[pos] == '-' && rest[pos + 1] == ' ') pos += 2;
  rest.remove_prefix(pos);

  bool bold = rest.size() >= 2 && rest[0] == '*' && rest[1] == '*';
  if (bold) rest.remove_prefix(2);

  // Label: letters, spaces and an optional "( ... )" gloss, ending at the
  // closing bold marker or the colon.
  std::size_t i = 0;
  int depth = 0;
  while (i < rest.size()) {
    char c = rest[i];
    if (c == '(') {
      ++depth;
    } else if (c == ')') {
      if (depth == 0) return false;
      --depth;
    } else if (depth == 0) {
      if (c == ':') break;
      if (bold && c == '*' && i + 1 < rest.size() && rest[i + 1] == '*') break;
      if (!(std::isalpha(static_cast<unsigned char>(c)) || c == ' ' || c == '/' || c == '+' ||
            c == '-')) {
        return false;
      }
    }
    ++i;
  }
  if (i == 0 || i >= rest.size()) return false;

  std::string label(rest.substr(0, i));
  rest.remove_prefix(i);
  if (bold) {
    if (!(rest.size() >= 2 && rest[0] == '*' && rest[1] == '*')) return false;
    rest.remove_prefix(2);
  }
  // allow "**Label:**" as well as "**Label**:"
  if (!rest.empty() && rest[0] == ':') {
    rest.remove_prefix(1);
  } else if (!label.empty() && label.back() == ':') {
    label.pop_back();
  } else {
    return false;
  }

  std::string key_src = strip_parentheticals(label);
  std::string norm = normalize_for_match(key_src);
  if (norm.empty()) return false;
  for (char& c : norm) {
    if (c == ' ') c = '_';
  }
  label_key = norm;
  value = trim(rest);
  return true;
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (lower(a[i]) != lower(b[i])) return false;
  }
  return true;
}

bool istarts_with(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && iequals(s.substr(0, prefix.size()), prefix);
}

}  // namespace nyaya::text
