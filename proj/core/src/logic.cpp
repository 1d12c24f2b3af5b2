#include "nyaya/logic.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "text_util.hpp"

namespace nyaya::logic {

namespace {

using json = nlohmann::ordered_json;

constexpr std::size_t kMaxBijectionEntities = 8;
constexpr std::size_t kMaxHornVariables = 24;

void require(bool cond, const std::string& message) {
  if (!cond) throw std::invalid_argument(message);
}

std::optional<std::size_t> index_of_ci(const std::vector<std::string>& items,
                                       std::string_view name) {
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (text::iequals(items[i], name)) return i;
  }
  return std::nullopt;
}

bool constraint_holds(const Constraint& c, const std::map<std::string, std::string>& assignment) {
  auto it = assignment.find(c.entity);
  if (it == assignment.end()) return true;  // partial answers cannot violate
  bool equal = text::iequals(it->second, c.value);
  return c.type == ConstraintType::assign ? equal : !equal;
}

// Closed-world horn evaluation: forced-true set is the least fixed point of
// the rules over the positive facts; negative facts pin variables false.
// Returns nullopt on contradiction.
std::optional<std::map<std::string, Truth>> horn_fixed_point(const LogicProblem& p,
                                                             HornMode mode) {
  std::set<std::string> forced_true;
  std::set<std::string> pinned_false;
  for (const auto& f : p.facts) {
    if (f.value) forced_true.insert(f.var);
    else pinned_false.insert(f.var);
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& r : p.rules) {
      if (forced_true.count(r.antecedent) && !forced_true.count(r.consequent)) {
        forced_true.insert(r.consequent);
        changed = true;
      }
    }
  }
  for (const auto& v : forced_true) {
    if (pinned_false.count(v)) return std::nullopt;
  }
  std::map<std::string, Truth> out;
  for (const auto& v : p.variables) {
    if (forced_true.count(v)) {
      out[v] = Truth::yes;
    } else if (pinned_false.count(v)) {
      out[v] = Truth::no;
    } else {
      out[v] = mode == HornMode::closed_world ? Truth::no : Truth::undetermined;
    }
  }
  return out;
}

bool bijection_answer_total(const LogicProblem& p, const AssignmentAnswer& a) {
  for (const auto& e : p.entities) {
    if (a.bijection.find(e) == a.bijection.end()) return false;
  }
  return true;
}

std::string render_bijection(const LogicProblem& p,
                             const std::map<std::string, std::string>& assignment) {
  std::string out;
  for (const auto& e : p.entities) {
    auto it = assignment.find(e);
    if (it == assignment.end()) continue;
    if (!out.empty()) out += ", ";
    out += e + ": " + it->second;
  }
  return out;
}

std::string render_horn(const LogicProblem& p, const std::map<std::string, Truth>& values) {
  std::string out;
  for (const auto& v : p.variables) {
    auto it = values.find(v);
    if (it == values.end()) continue;
    if (!out.empty()) out += ", ";
    const char* t = it->second == Truth::yes ? "true"
                    : it->second == Truth::no ? "false"
                                              : "undetermined";
    out += v + ": " + t;
  }
  return out;
}

}  // namespace

std::string Constraint::describe() const {
  return (type == ConstraintType::assign ? "assign(" : "forbid(") + entity + ", " + value + ")";
}

void LogicProblem::check() const {
  if (kind == ProblemKind::bijection) {
    require(!entities.empty(), "bijection problem has no entities");
    require(entities.size() == values.size(), "entities and values differ in count");
    std::set<std::string> e(entities.begin(), entities.end());
    std::set<std::string> v(values.begin(), values.end());
    require(e.size() == entities.size(), "duplicate entity");
    require(v.size() == values.size(), "duplicate value");
    for (const auto& c : constraints) {
      require(index_of_ci(entities, c.entity).has_value(), "constraint names unknown entity: " + c.entity);
      require(index_of_ci(values, c.value).has_value(), "constraint names unknown value: " + c.value);
    }
  } else {
    require(!variables.empty(), "horn problem has no variables");
    std::set<std::string> v(variables.begin(), variables.end());
    require(v.size() == variables.size(), "duplicate variable");
    for (const auto& f : facts) {
      require(v.count(f.var) > 0, "fact names unknown variable: " + f.var);
    }
    for (const auto& r : rules) {
      require(v.count(r.antecedent) > 0, "rule names unknown variable: " + r.antecedent);
      require(v.count(r.consequent) > 0, "rule names unknown variable: " + r.consequent);
    }
  }
}

LogicProblem problem_from_json_text(std::string_view json_text) {
  json j = json::parse(json_text, nullptr, true);
  LogicProblem p;
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "bijection") {
    p.kind = ProblemKind::bijection;
    p.entities = j.at("entities").get<std::vector<std::string>>();
    p.values = j.at("values").get<std::vector<std::string>>();
    for (const auto& c : j.value("constraints", json::array())) {
      Constraint out;
      std::string type = c.at("type").get<std::string>();
      require(type == "assign" || type == "forbid", "unknown constraint type: " + type);
      out.type = type == "assign" ? ConstraintType::assign : ConstraintType::forbid;
      out.entity = c.at("entity").get<std::string>();
      out.value = c.at("value").get<std::string>();
      p.constraints.push_back(std::move(out));
    }
  } else if (kind == "horn") {
    p.kind = ProblemKind::horn;
    p.variables = j.at("variables").get<std::vector<std::string>>();
    for (const auto& f : j.value("facts", json::array())) {
      p.facts.push_back({f.at("var").get<std::string>(), f.value("value", true)});
    }
    for (const auto& r : j.value("rules", json::array())) {
      p.rules.push_back({r.at("if").get<std::string>(), r.at("then").get<std::string>()});
    }
  } else {
    throw std::invalid_argument("unknown problem kind: " + kind);
  }
  p.check();
  return p;
}

std::string problem_to_json_text(const LogicProblem& problem) {
  json j;
  if (problem.kind == ProblemKind::bijection) {
    j["kind"] = "bijection";
    j["entities"] = problem.entities;
    j["values"] = problem.values;
    json cs = json::array();
    for (const auto& c : problem.constraints) {
      cs.push_back({{"type", c.type == ConstraintType::assign ? "assign" : "forbid"},
                    {"entity", c.entity},
                    {"value", c.value}});
    }
    j["constraints"] = cs;
  } else {
    j["kind"] = "horn";
    j["variables"] = problem.variables;
    json fs = json::array();
    for (const auto& f : problem.facts) fs.push_back({{"var", f.var}, {"value", f.value}});
    j["facts"] = fs;
    json rs = json::array();
    for (const auto& r : problem.rules) {
      rs.push_back({{"if", r.antecedent}, {"then", r.consequent}});
    }
    j["rules"] = rs;
  }
  return j.dump(2) + "\n";
}

std::vector<AssignmentAnswer> brute_force_solve(const LogicProblem& problem, HornMode mode) {
  problem.check();
  std::vector<AssignmentAnswer> solutions;
  if (problem.kind == ProblemKind::bijection) {
    require(problem.entities.size() <= kMaxBijectionEntities,
            "bijection too large for factorial enumeration");
    std::vector<std::size_t> perm(problem.entities.size());
    std::iota(perm.begin(), perm.end(), 0);
    do {
      std::map<std::string, std::string> assignment;
      for (std::size_t i = 0; i < perm.size(); ++i) {
        assignment[problem.entities[i]] = problem.values[perm[i]];
      }
      bool ok = std::all_of(problem.constraints.begin(), problem.constraints.end(),
                            [&](const Constraint& c) { return constraint_holds(c, assignment); });
      if (ok) {
        AssignmentAnswer a;
        a.bijection = std::move(assignment);
        solutions.push_back(std::move(a));
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    require(problem.variables.size() <= kMaxHornVariables, "horn problem too large");
    auto values = horn_fixed_point(problem, mode);
    if (values) {
      AssignmentAnswer a;
      a.horn = std::move(*values);
      solutions.push_back(std::move(a));
    }
  }
  return solutions;
}

Verdict verify_answer(const LogicProblem& problem, const AssignmentAnswer& answer) {
  problem.check();
  Verdict v;
  if (problem.kind == ProblemKind::bijection) {
    for (const auto& c : problem.constraints) {
      if (!constraint_holds(c, answer.bijection)) v.violated.push_back(c);
    }
    // injectivity over the answered part
    std::map<std::string, std::string> seen;  // value -> entity
    for (const auto& [entity, value] : answer.bijection) {
      std::string key = text::to_lower(value);
      auto [it, inserted] = seen.emplace(key, entity);
      if (!inserted) {
        v.detail = "value " + value + " assigned to both " + it->second + " and " + entity;
      }
    }
    if (!v.violated.empty() || !v.detail.empty()) {
      v.status = VerdictStatus::violates;
      return v;
    }
    auto solutions = brute_force_solve(problem);
    if (solutions.empty()) {
      v.status = VerdictStatus::no_solution;
      return v;
    }
    if (solutions.size() > 1) {
      v.status = VerdictStatus::satisfies_but_not_unique;
      v.detail = std::to_string(solutions.size()) + " satisfying assignments";
      return v;
    }
    const auto& sol = solutions.front().bijection;
    bool total = bijection_answer_total(problem, answer);
    bool matches = true;
    for (const auto& [entity, value] : answer.bijection) {
      auto it = sol.find(entity);
      if (it == sol.end() || !text::iequals(it->second, value)) matches = false;
    }
    if (total && matches) {
      v.status = VerdictStatus::unique_and_matches;
    } else {
      v.status = VerdictStatus::mismatch;
      v.expected = render_bijection(problem, sol);
    }
    return v;
  }

  // horn
  std::map<std::string, bool> answered;
  for (const auto& [var, truth] : answer.horn) {
    if (truth == Truth::undetermined) continue;
    answered[var] = truth == Truth::yes;
  }
  for (const auto& f : problem.facts) {
    auto it = answered.find(f.var);
    if (it != answered.end() && it->second != f.value) {
      v.violated.push_back({f.value ? ConstraintType::assign : ConstraintType::forbid, f.var,
                            f.value ? "true" : "false"});
    }
  }
  for (const auto& r : problem.rules) {
    auto a = answered.find(r.antecedent);
    auto c = answered.find(r.consequent);
    if (a != answered.end() && a->second && c != answered.end() && !c->second) {
      v.violated.push_back({ConstraintType::assign, r.antecedent + " -> " + r.consequent, "rule"});
    }
  }
  if (!v.violated.empty()) {
    v.status = VerdictStatus::violates;
    return v;
  }
  auto solutions = brute_force_solve(problem);
  if (solutions.empty()) {
    v.status = VerdictStatus::no_solution;
    return v;
  }
  const auto& sol = solutions.front().horn;
  bool total = true, matches = true;
  for (const auto& var : problem.variables) {
    auto it = answered.find(var);
    if (it == answered.end()) {
      total = false;
      continue;
    }
    Truth expected = sol.at(var);
    if ((expected == Truth::yes) != it->second) matches = false;
  }
  if (total && matches) {
    v.status = VerdictStatus::unique_and_matches;
  } else {
    v.status = VerdictStatus::mismatch;
    v.expected = render_horn(problem, sol);
  }
  return v;
}

AssignmentAnswer parse_assignment(const LogicProblem& problem, std::string_view answer_text) {
  AssignmentAnswer out;
  std::vector<std::string> tokens = text::tokenize(answer_text);

  auto value_of_ci = [&](std::string_view name) -> std::optional<std::string> {
    auto idx = index_of_ci(problem.values, name);
    if (!idx) return std::nullopt;
    return problem.values[*idx];
  };

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (problem.kind == ProblemKind::bijection) {
      auto entity_idx = index_of_ci(problem.entities, tokens[i]);
      if (!entity_idx) continue;
      const std::string& entity = problem.entities[*entity_idx];
      // "<entity> has the <value>"
      if (i + 3 < tokens.size() && tokens[i + 1] == "has" && tokens[i + 2] == "the") {
        if (auto v = value_of_ci(tokens[i + 3])) out.bijection[entity] = *v;
        continue;
      }
      if (i + 2 < tokens.size() && tokens[i + 1] == "has") {
        if (auto v = value_of_ci(tokens[i + 2])) out.bijection[entity] = *v;
        continue;
      }
      // "<entity> sits in seat <n>"
      if (i + 4 < tokens.size() && tokens[i + 1] == "sits" && tokens[i + 2] == "in" &&
          tokens[i + 3] == "seat") {
        if (auto v = value_of_ci(tokens[i + 4])) out.bijection[entity] = *v;
        continue;
      }
    } else {
      auto var_idx = index_of_ci(problem.variables, tokens[i]);
      if (!var_idx) continue;
      const std::string& var = problem.variables[*var_idx];
      // "<var> is true/false"
      if (i + 2 < tokens.size() && tokens[i + 1] == "is") {
        if (tokens[i + 2] == "true") out.horn[var] = Truth::yes;
        if (tokens[i + 2] == "false") out.horn[var] = Truth::no;
      }
    }
  }
  return out;
}

std::string verdict_status_name(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::unique_and_matches: return "unique_and_matches";
    case VerdictStatus::satisfies_but_not_unique: return "satisfies_but_not_unique";
    case VerdictStatus::violates: return "violates";
    case VerdictStatus::no_solution: return "no_solution";
    case VerdictStatus::mismatch: return "mismatch";
  }
  return "";
}

}  // namespace nyaya::logic
