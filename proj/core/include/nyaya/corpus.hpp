#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nyaya/trace_model.hpp"
#include "nyaya/trace_parser.hpp"

// Corpus management: JSONL conversion, deterministic split, dedup and
// distribution stats.

namespace nyaya {

struct TrainingInstance {
  std::string id;  // carried for ordering; not serialized
  std::string instruction;
  std::string input;  // always empty
  std::string output;
};

struct CorpusFileError {
  std::string path;
  std::vector<ParseFailure> failures;
  std::string message;
};

struct CorpusConversion {
  std::vector<TrainingInstance> instances;  // sorted by id
  std::vector<CorpusFileError> errors;
};

// One instance per valid corpus Markdown file: instruction is the
// "# Problem" body, output the trace from the first phase header onward.
// Invalid files are listed per-file; nothing is silently dropped.
CorpusConversion to_jsonl(const std::string& corpus_directory);

// One JSON object {"instruction", "input", "output"} per line.
std::string serialize_jsonl(const std::vector<TrainingInstance>& instances);
std::vector<TrainingInstance> parse_jsonl(std::string_view text);

// Deterministic Fisher-Yates shuffle over id-sorted instances driven by a
// splitmix64 generator; val = round((1-ratio)*n), train = n - val.
std::pair<std::vector<TrainingInstance>, std::vector<TrainingInstance>> split_corpus(
    std::vector<TrainingInstance> instances, double ratio = 0.8, std::uint64_t seed = 42);

struct DedupDrop {
  std::string dropped_id;
  std::string kept_id;
  std::string digest;  // hex SHA-256 of the normalized key
};

// Key: SHA-256 of whitespace-normalized instruction + "\n" + output; the
// first occurrence by sorted id wins.
std::pair<std::vector<TrainingInstance>, std::vector<DedupDrop>> dedup(
    std::vector<TrainingInstance> instances);

std::string sha256_hex(std::string_view data);

struct CorpusStats {
  int total = 0;
  std::map<std::string, int> by_problem_type;
  std::map<std::string, int> by_difficulty;
  int negative_examples = 0;
  int z3_verifiable = 0;
};

CorpusStats corpus_stats(const std::vector<Frontmatter>& frontmatters);
CorpusStats corpus_stats_for_directory(const std::string& corpus_directory);

// splitmix64 step; exposed for tests of the pinned split contract.
std::uint64_t splitmix64_next(std::uint64_t& state);

// Sorted *.md paths under a directory (non-recursive).
std::vector<std::string> list_corpus_files(const std::string& directory);

}  // namespace nyaya
