#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>
#include <openssl/evp.h>

#include "nyaya/corpus.hpp"
#include "text_util.hpp"

namespace nyaya {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending = true;
    } else {
      if (pending && !out.empty()) out.push_back(' ');
      pending = false;
      out.push_back(c);
    }
  }
  return out;
}

void sort_by_id(std::vector<TrainingInstance>& instances) {
  std::stable_sort(instances.begin(), instances.end(),
                   [](const TrainingInstance& a, const TrainingInstance& b) {
                     if (a.id != b.id) return a.id < b.id;
                     return a.instruction < b.instruction;
                   });
}

}  // namespace

std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<std::string> list_corpus_files(const std::string& directory) {
  std::vector<std::string> files;
  fs::path dir(directory);
  if (!fs::is_directory(dir)) {
    throw std::runtime_error("not a directory: " + directory);
  }
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".md") {
      files.push_back(entry.path().string());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

CorpusConversion to_jsonl(const std::string& corpus_directory) {
  CorpusConversion out;
  ParseOptions options;
  options.corpus_mode = true;
  for (const std::string& path : list_corpus_files(corpus_directory)) {
    std::string content;
    try {
      content = read_file(path);
    } catch (const std::exception& e) {
      out.errors.push_back({path, {}, e.what()});
      continue;
    }
    ParsedDocument doc = parse_trace(content, options);
    if (!doc.parse_ok()) {
      CorpusFileError err;
      err.path = path;
      err.failures = doc.failures;
      err.message = doc.failures.front().message;
      out.errors.push_back(std::move(err));
      continue;
    }
    TrainingInstance instance;
    instance.id = doc.frontmatter ? doc.frontmatter->id : "";
    instance.instruction = doc.problem_statement;
    instance.input = "";
    instance.output = doc.trace_text;
    out.instances.push_back(std::move(instance));
  }
  sort_by_id(out.instances);
  return out;
}

std::string serialize_jsonl(const std::vector<TrainingInstance>& instances) {
  std::ostringstream out;
  for (const auto& instance : instances) {
    json j;
    j["instruction"] = instance.instruction;
    j["input"] = instance.input;
    j["output"] = instance.output;
    out << j.dump() << '\n';
  }
  return out.str();
}

std::vector<TrainingInstance> parse_jsonl(std::string_view text) {
  std::vector<TrainingInstance> instances;
  int line_number = 0;
  for (const std::string& line : text::split_lines(text)) {
    ++line_number;
    if (text::trim(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw std::runtime_error("invalid JSONL at line " + std::to_string(line_number));
    }
    TrainingInstance instance;
    instance.instruction = j.value("instruction", "");
    instance.input = j.value("input", "");
    instance.output = j.value("output", "");
    instances.push_back(std::move(instance));
  }
  return instances;
}

std::pair<std::vector<TrainingInstance>, std::vector<TrainingInstance>> split_corpus(
    std::vector<TrainingInstance> instances, double ratio, std::uint64_t seed) {
  if (instances.empty()) throw std::invalid_argument("split_corpus: empty input");
  if (ratio < 0.0 || ratio > 1.0) throw std::invalid_argument("split_corpus: bad ratio");
  sort_by_id(instances);

  std::uint64_t state = seed;
  for (std::size_t i = instances.size() - 1; i > 0; --i) {
    std::size_t j = static_cast<std::size_t>(splitmix64_next(state) % (i + 1));
    std::swap(instances[i], instances[j]);
  }

  const auto n = instances.size();
  auto val = static_cast<std::size_t>(std::llround((1.0 - ratio) * static_cast<double>(n)));
  if (val > n) val = n;
  const std::size_t train = n - val;
  std::vector<TrainingInstance> train_set(instances.begin(),
                                          instances.begin() + static_cast<long>(train));
  std::vector<TrainingInstance> val_set(instances.begin() + static_cast<long>(train),
                                        instances.end());
  return {std::move(train_set), std::move(val_set)};
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

std::pair<std::vector<TrainingInstance>, std::vector<DedupDrop>> dedup(
    std::vector<TrainingInstance> instances) {
  sort_by_id(instances);
  std::vector<TrainingInstance> kept;
  std::vector<DedupDrop> dropped;
  std::map<std::string, std::string> seen;  // digest -> kept id
  for (auto& instance : instances) {
    std::string key =
        collapse_whitespace(instance.instruction) + "\n" + collapse_whitespace(instance.output);
    std::string digest = sha256_hex(key);
    auto [it, inserted] = seen.emplace(digest, instance.id);
    if (inserted) {
      kept.push_back(std::move(instance));
    } else {
      dropped.push_back({instance.id, it->second, digest});
    }
  }
  return {std::move(kept), std::move(dropped)};
}

CorpusStats corpus_stats(const std::vector<Frontmatter>& frontmatters) {
  CorpusStats stats;
  stats.total = static_cast<int>(frontmatters.size());
  for (const auto& fm : frontmatters) {
    if (!fm.problem_type.empty()) ++stats.by_problem_type[fm.problem_type];
    if (fm.difficulty && !fm.difficulty->empty()) ++stats.by_difficulty[*fm.difficulty];
    if (fm.negative_example.value_or(false)) ++stats.negative_examples;
    if (fm.z3_verifiable.value_or(false)) ++stats.z3_verifiable;
  }
  return stats;
}

CorpusStats corpus_stats_for_directory(const std::string& corpus_directory) {
  std::vector<Frontmatter> frontmatters;
  for (const std::string& path : list_corpus_files(corpus_directory)) {
    std::vector<ParseFailure> failures;
    auto [fm, _] = parse_frontmatter(read_file(path), failures);
    if (fm) frontmatters.push_back(std::move(*fm));
  }
  return corpus_stats(frontmatters);
}

}  // namespace nyaya
