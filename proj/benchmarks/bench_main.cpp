#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "nyaya/harness.hpp"
#include "nyaya/logic.hpp"
#include "nyaya/scoring.hpp"
#include "nyaya/trace_parser.hpp"
#include "nyaya/validator.hpp"

namespace {

std::string read_fixture(const std::string& relative) {
  std::ifstream in(std::string(NYAYA_FIXTURE_DIR) + "/" + relative, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const std::string& complete_trace() {
  static const std::string text = read_fixture("traces/pets_complete.md");
  return text;
}

void BM_ParseTrace(benchmark::State& state) {
  const std::string& text = complete_trace();
  for (auto _ : state) {
    benchmark::DoNotOptimize(nyaya::parse_trace(text));
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseTrace);

void BM_Validate(benchmark::State& state) {
  nyaya::ParsedDocument doc = nyaya::parse_trace(complete_trace());
  for (auto _ : state) {
    benchmark::DoNotOptimize(nyaya::validate(doc));
  }
}
BENCHMARK(BM_Validate);

void BM_Similarity(benchmark::State& state) {
  const std::string answer = "Alice has the fish, Bob has the cat, and Carol has the dog.";
  const std::string truth = "Alice has the fish, Bob has the cat, Carol has the dog";
  for (auto _ : state) {
    benchmark::DoNotOptimize(nyaya::similarity(answer, truth));
  }
}
BENCHMARK(BM_Similarity);

void BM_BruteForceSolve(benchmark::State& state) {
  nyaya::logic::LogicProblem seating =
      nyaya::logic::problem_from_json_text(read_fixture("problems/seating.json"));
  for (auto _ : state) {
    benchmark::DoNotOptimize(nyaya::logic::brute_force_solve(seating));
  }
}
BENCHMARK(BM_BruteForceSolve);

void BM_EmitSmtlib(benchmark::State& state) {
  nyaya::logic::LogicProblem pets =
      nyaya::logic::problem_from_json_text(read_fixture("problems/pets.json"));
  auto answer = nyaya::logic::brute_force_solve(pets).front();
  for (auto _ : state) {
    benchmark::DoNotOptimize(nyaya::logic::emit_smtlib(pets, answer));
  }
}
BENCHMARK(BM_EmitSmtlib);

void BM_GrammarAccepts(benchmark::State& state) {
  std::string grammar = nyaya::emit_grammar({});
  const std::string& text = complete_trace();
  for (auto _ : state) {
    benchmark::DoNotOptimize(nyaya::grammar_accepts(grammar, text));
  }
}
BENCHMARK(BM_GrammarAccepts);

}  // namespace

BENCHMARK_MAIN();
