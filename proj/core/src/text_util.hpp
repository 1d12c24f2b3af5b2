#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

// Internal text helpers shared by the parser, validator and scorer.

namespace nyaya::text {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

// Lowercase, map non-alphanumerics to spaces, collapse runs.
std::string normalize_for_match(std::string_view s);

// normalize_for_match + split; preserves duplicates and order.
std::vector<std::string> tokenize(std::string_view s);

// Token *set* of the normalized text.
std::set<std::string> token_set(std::string_view s);

// Count of whitespace-separated tokens (approximate output length).
std::size_t whitespace_token_count(std::string_view s);

// Strips "**" bold markers anywhere in the string.
std::string strip_bold(std::string_view s);

// Removes "(...)" spans (non-nested) from the string.
std::string strip_parentheticals(std::string_view s);

// Splits into lines; the trailing newline does not produce an empty line.
std::vector<std::string> split_lines(std::string_view s);

bool is_horizontal_rule(std::string_view line);
bool is_blank(std::string_view line);

// True when `line` is "**Label**: value" (bold markers and a parenthetical
// gloss on the label tolerated). On match fills normalized label key
// (lowercase, underscores) and the value remainder.
bool parse_bold_label(std::string_view line, std::string& label_key, std::string& value);

bool iequals(std::string_view a, std::string_view b);
bool istarts_with(std::string_view s, std::string_view prefix);

}  // namespace nyaya::text
