#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cctype>
#include <cerrno>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "nyaya/logic.hpp"
#include "text_util.hpp"

namespace nyaya::logic {

namespace {

std::string symbol(std::string_view name) {
  std::string out;
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else {
      out.push_back('_');
    }
  }
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0]))) out.insert(0, "v_");
  return out;
}

std::size_t value_index(const LogicProblem& p, std::string_view value) {
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    if (text::iequals(p.values[i], value)) return i;
  }
  return 0;  // unreachable for checked problems
}

std::string answer_conjunction(const LogicProblem& p, const AssignmentAnswer& a) {
  std::ostringstream out;
  std::size_t terms = 0;
  if (p.kind == ProblemKind::bijection) {
    for (const auto& entity : p.entities) {
      auto it = a.bijection.find(entity);
      if (it == a.bijection.end()) continue;
      out << (terms ? " " : "") << "(= " << symbol(entity) << " "
          << value_index(p, it->second) << ")";
      ++terms;
    }
  } else {
    for (const auto& var : p.variables) {
      auto it = a.horn.find(var);
      if (it == a.horn.end() || it->second == Truth::undetermined) continue;
      if (it->second == Truth::yes) {
        out << (terms ? " " : "") << symbol(var);
      } else {
        out << (terms ? " " : "") << "(not " << symbol(var) << ")";
      }
      ++terms;
    }
  }
  if (terms == 0) return "true";
  if (terms == 1) return out.str();
  return "(and " + out.str() + ")";
}

std::string emit_problem(const LogicProblem& p) {
  std::ostringstream s;
  if (p.kind == ProblemKind::bijection) {
    s << "(set-logic QF_LIA)\n";
    s << "; value indices:";
    for (std::size_t i = 0; i < p.values.size(); ++i) s << " " << i << "=" << p.values[i];
    s << "\n";
    for (const auto& e : p.entities) s << "(declare-const " << symbol(e) << " Int)\n";
    for (const auto& e : p.entities) {
      s << "(assert (and (>= " << symbol(e) << " 0) (< " << symbol(e) << " "
        << p.values.size() << ")))\n";
    }
    if (p.entities.size() > 1) {
      s << "(assert (distinct";
      for (const auto& e : p.entities) s << " " << symbol(e);
      s << "))\n";
    }
    for (const auto& c : p.constraints) {
      std::size_t idx = value_index(p, c.value);
      if (c.type == ConstraintType::assign) {
        s << "(assert (= " << symbol(c.entity) << " " << idx << "))";
      } else {
        s << "(assert (not (= " << symbol(c.entity) << " " << idx << ")))";
      }
      s << " ; " << c.describe() << "\n";
    }
  } else {
    s << "(set-logic QF_UF)\n";
    for (const auto& v : p.variables) s << "(declare-const " << symbol(v) << " Bool)\n";
    for (const auto& f : p.facts) {
      if (f.value) {
        s << "(assert " << symbol(f.var) << ")\n";
      } else {
        s << "(assert (not " << symbol(f.var) << "))\n";
      }
    }
    for (const auto& r : p.rules) {
      s << "(assert (=> " << symbol(r.antecedent) << " " << symbol(r.consequent) << "))\n";
    }
  }
  return s.str();
}

}  // namespace

SmtScripts emit_smtlib(const LogicProblem& problem, const std::optional<AssignmentAnswer>& answer) {
  problem.check();
  SmtScripts scripts;
  std::string base = emit_problem(problem);
  scripts.problem_only = base + "(check-sat)\n";
  if (answer) {
    std::string conj = answer_conjunction(problem, *answer);
    scripts.answer_satisfies = base + "(assert " + conj + ")\n(check-sat)\n";
    scripts.answer_uniqueness = base + "(assert (not " + conj + "))\n(check-sat)\n";
  }
  return scripts;
}

SolverResult run_solver(std::string_view script_text, std::string_view solver_path,
                        std::chrono::milliseconds timeout) {
  namespace fs = std::filesystem;
  SolverResult result;

  if (solver_path.empty()) {
    result.output = "no solver path given";
    return result;
  }

  // unique temp file per call; safe for concurrent use
  fs::path dir = fs::temp_directory_path();
  static std::atomic<unsigned> counter{0};
  std::ostringstream name;
  name << "nyaya-smt-" << ::getpid() << "-" << counter.fetch_add(1) << ".smt2";
  fs::path script = dir / name.str();
  {
    std::ofstream out(script);
    if (!out) {
      result.output = "cannot write temporary script";
      return result;
    }
    out << script_text;
  }

  int pipefd[2];
  if (pipe(pipefd) != 0) {
    fs::remove(script);
    result.output = "pipe() failed";
    return result;
  }

  pid_t pid = fork();
  if (pid < 0) {
    close(pipefd[0]);
    close(pipefd[1]);
    fs::remove(script);
    result.output = "fork() failed";
    return result;
  }
  if (pid == 0) {
    dup2(pipefd[1], STDOUT_FILENO);
    dup2(pipefd[1], STDERR_FILENO);
    close(pipefd[0]);
    close(pipefd[1]);
    std::string exe(solver_path);
    std::string arg = script.string();
    execlp(exe.c_str(), exe.c_str(), arg.c_str(), static_cast<char*>(nullptr));
    std::fprintf(stdout, "exec failed: %s\n", std::strerror(errno));
    _exit(127);
  }

  close(pipefd[1]);
  std::string output;
  bool timed_out = false;
  auto deadline = std::chrono::steady_clock::now() + timeout;
  char buf[4096];
  while (true) {
    auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (remaining.count() <= 0) {
      timed_out = true;
      break;
    }
    struct pollfd pfd{pipefd[0], POLLIN, 0};
    int rc = poll(&pfd, 1, static_cast<int>(remaining.count()));
    if (rc == 0) {
      timed_out = true;
      break;
    }
    if (rc < 0) break;
    ssize_t n = read(pipefd[0], buf, sizeof(buf));
    if (n <= 0) break;
    output.append(buf, static_cast<std::size_t>(n));
  }
  close(pipefd[0]);
  if (timed_out) kill(pid, SIGKILL);
  int status = 0;
  waitpid(pid, &status, 0);
  fs::remove(script);

  if (timed_out) {
    result.output = "solver timed out";
    return result;
  }

  std::string first_line;
  if (auto lines = text::split_lines(output); !lines.empty()) {
    first_line = text::trim(lines.front());
  }
  if (first_line == "sat") {
    result.status = SolverStatus::sat;
  } else if (first_line == "unsat") {
    result.status = SolverStatus::unsat;
  } else if (first_line == "unknown") {
    result.status = SolverStatus::unknown;
  } else {
    result.status = SolverStatus::solver_error;
    result.output = output.empty() ? "no solver output" : output;
  }
  return result;
}

}  // namespace nyaya::logic
