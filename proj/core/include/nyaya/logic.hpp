#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Machine-checkable representation of the formal-logic problem families, a
// brute-force oracle, answer-text parsing, and SMT-LIB emission for external
// verification.

namespace nyaya::logic {

enum class ProblemKind { bijection, horn };

enum class ConstraintType { assign, forbid };

// One explicit constraint of a bijection problem: entity gets / does not
// get the named value.
struct Constraint {
  ConstraintType type;
  std::string entity;
  std::string value;

  std::string describe() const;
  bool operator==(const Constraint&) const = default;
};

struct HornFact {
  std::string var;
  bool value = true;
};

struct HornRule {
  std::string antecedent;
  std::string consequent;
};

// Transitive-ordering problems are encoded as bijections onto rank
// positions; no third kind exists.
struct LogicProblem {
  ProblemKind kind = ProblemKind::bijection;

  // bijection
  std::vector<std::string> entities;
  std::vector<std::string> values;
  std::vector<Constraint> constraints;

  // horn
  std::vector<std::string> variables;
  std::vector<HornFact> facts;
  std::vector<HornRule> rules;

  // Throws std::invalid_argument when structurally unsound (duplicates,
  // size mismatch, undeclared rule variables).
  void check() const;
};

LogicProblem problem_from_json_text(std::string_view json_text);
std::string problem_to_json_text(const LogicProblem& problem);

enum class Truth { yes, no, undetermined };

struct AssignmentAnswer {
  std::map<std::string, std::string> bijection;  // entity -> value
  std::map<std::string, Truth> horn;             // variable -> truth

  bool empty() const { return bijection.empty() && horn.empty(); }
};

enum class HornMode { closed_world, open_world };

// All satisfying assignments. Bijections enumerate permutations (entity
// count <= 8); horn problems take the least fixed point of the rules over
// the facts, defaulting unforced variables to false (closed world) or
// undetermined (open mode). Throws std::invalid_argument past the size
// bounds.
std::vector<AssignmentAnswer> brute_force_solve(const LogicProblem& problem,
                                                HornMode mode = HornMode::closed_world);

enum class VerdictStatus {
  unique_and_matches,
  satisfies_but_not_unique,
  violates,
  no_solution,
  mismatch,
};

struct Verdict {
  VerdictStatus status;
  std::vector<Constraint> violated;  // violates
  std::string expected;              // mismatch
  std::string detail;
};

std::string verdict_status_name(VerdictStatus s);

Verdict verify_answer(const LogicProblem& problem, const AssignmentAnswer& answer);

// Template extraction over "<Entity> has the <value>", "<Entity> sits in
// seat <n>" and "<Var> is true/false" clauses; unmatched clauses are
// ignored and entities match case-insensitively.
AssignmentAnswer parse_assignment(const LogicProblem& problem, std::string_view answer_text);

struct SmtScripts {
  std::string problem_only;       // constraints, (check-sat)
  std::string answer_satisfies;   // constraints + answer, expect sat
  std::string answer_uniqueness;  // constraints + not(answer), expect unsat
};

// Deterministic, byte-stable SMT-LIB 2 emission. Bijections use integer
// value indices with distinctness and range assertions.
SmtScripts emit_smtlib(const LogicProblem& problem,
                       const std::optional<AssignmentAnswer>& answer = std::nullopt);

enum class SolverStatus { sat, unsat, unknown, solver_error };

struct SolverResult {
  SolverStatus status = SolverStatus::solver_error;
  std::string output;  // captured text for solver_error
};

// Runs `solver_path <script-file>` and reads the verdict from the first
// output line. Callable concurrently; each call uses its own temporary
// file.
SolverResult run_solver(std::string_view script_text, std::string_view solver_path,
                        std::chrono::milliseconds timeout = std::chrono::milliseconds(10000));

}  // namespace nyaya::logic
