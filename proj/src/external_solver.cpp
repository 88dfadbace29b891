#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "metromap/errors.hpp"
#include "metromap/lp_format.hpp"
#include "metromap/solution_format.hpp"
#include "metromap/solver.hpp"

namespace metromap {

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kFeasible: return "feasible";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kTimeout: return "timeout";
  }
  return "infeasible";
}

SolveStatus parse_solve_status(std::string_view text) {
  if (text == "optimal") return SolveStatus::kOptimal;
  if (text == "feasible") return SolveStatus::kFeasible;
  if (text == "infeasible") return SolveStatus::kInfeasible;
  if (text == "timeout") return SolveStatus::kTimeout;
  throw Error(ErrorCode::kSchema, "unknown solve status '" + std::string(text) + "'");
}

void SolveOptions::validate() const {
  if (!(time_limit > 0.0)) throw Error(ErrorCode::kInvalidParams, "time limit must be positive");
  if (!(mip_gap >= 0.0 && mip_gap < 1.0)) throw Error(ErrorCode::kInvalidParams, "MIP gap must lie in [0, 1)");
  if (threads < 1) throw Error(ErrorCode::kInvalidParams, "threads must be at least 1");
}

std::vector<double> MipSolution::values(const MipProblem& problem) const {
  std::vector<double> out(problem.variable_count());
  for (VarId v = 0; v < problem.variable_count(); ++v) {
    const auto it = assignment.find(problem.variable(v).name);
    if (it == assignment.end()) {
      throw Error(ErrorCode::kMissingVariable, "solution has no value for '" + problem.variable(v).name + "'");
    }
    out[v] = it->second;
  }
  return out;
}

namespace {

std::string format_number(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

std::string expand(std::string tmpl, const std::map<std::string, std::string>& values) {
  for (const auto& [key, value] : values) {
    const std::string pattern = "{" + key + "}";
    for (std::size_t p = tmpl.find(pattern); p != std::string::npos; p = tmpl.find(pattern, p + value.size())) {
      tmpl.replace(p, pattern.size(), value);
    }
  }
  return tmpl;
}

std::string quote(const std::string& path) {
  std::string out = "'";
  for (char c : path) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    const auto base = std::filesystem::temp_directory_path();
    for (int attempt = 0; attempt < 100; ++attempt) {
      path_ = base / ("metromap-" + std::to_string(::getpid()) + "-" + std::to_string(rd()));
      if (std::filesystem::create_directory(path_)) return;
    }
    throw Error(ErrorCode::kIo, "cannot create a temporary directory");
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

struct RunResult {
  int exit_code = 0;
  bool killed = false;
  bool cancelled = false;
};

RunResult run_shell(const std::string& command, const std::filesystem::path& log,
                    double deadline_seconds, std::stop_token stop) {
  const pid_t pid = ::fork();
  if (pid < 0) throw Error(ErrorCode::kIo, "fork failed");
  if (pid == 0) {
    ::setpgid(0, 0);
    const int fd = ::open(log.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (fd >= 0) {
      ::dup2(fd, 1);
      ::dup2(fd, 2);
      ::close(fd);
    }
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  RunResult r;
  const auto start = std::chrono::steady_clock::now();
  int status = 0;
  bool terminated = false;
  std::chrono::steady_clock::time_point term_time;
  while (true) {
    const pid_t w = ::waitpid(pid, &status, WNOHANG);
    if (w == pid) break;
    if (w < 0) throw Error(ErrorCode::kIo, "waitpid failed");
    const auto now = std::chrono::steady_clock::now();
    const double elapsed = std::chrono::duration<double>(now - start).count();
    const bool cancel = stop.stop_requested();
    if (!terminated && (cancel || elapsed > deadline_seconds)) {
      r.killed = true;
      r.cancelled = cancel;
      ::kill(-pid, SIGTERM);
      terminated = true;
      term_time = now;
    } else if (terminated && now - term_time > std::chrono::seconds(3)) {
      ::kill(-pid, SIGKILL);
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  if (WIFEXITED(status)) r.exit_code = WEXITSTATUS(status);
  else r.exit_code = 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
  return r;
}

}  // namespace

MipSolution solve_external(const MipProblem& problem, const SolveOptions& options,
                           std::stop_token stop) {
  options.validate();
  if (options.solver_command.empty()) {
    throw Error(ErrorCode::kSolverNotFound, "no solver command configured");
  }
  TempDir dir;
  const auto lp = dir.path() / "model.lp";
  const auto sol = dir.path() / "model.sol";
  const auto log = dir.path() / "solver.log";
  write_lp_file(problem, lp);

  const std::string command = expand(options.solver_command,
                                     {{"lp", quote(lp.string())},
                                      {"sol", quote(sol.string())},
                                      {"timelimit", format_number(options.time_limit)},
                                      {"gap", format_number(options.mip_gap)},
                                      {"threads", std::to_string(options.threads)}});

  const auto start = std::chrono::steady_clock::now();
  // The solver gets the limit itself; the grace period covers start-up and
  // writing the solution.
  const RunResult run = run_shell(command, log, options.time_limit + 10.0, stop);
  const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (!options.keep_files_in.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(options.keep_files_in, ec);
    for (const auto& f : {lp, sol, log}) {
      if (std::filesystem::exists(f)) {
        std::filesystem::copy_file(f, options.keep_files_in / f.filename(),
                                   std::filesystem::copy_options::overwrite_existing, ec);
      }
    }
  }

  const std::string log_text = slurp(log);
  if (run.cancelled) throw Error(ErrorCode::kSolverOutput, "solve cancelled");
  if (run.exit_code == 127 || run.exit_code == 126) {
    throw Error(ErrorCode::kSolverNotFound, "solver command failed to start: " + command + "\n" + log_text);
  }

  MipSolution result;
  if (!std::filesystem::exists(sol) || std::filesystem::file_size(sol) == 0) {
    if (run.killed) {
      result.status = SolveStatus::kTimeout;
      result.runtime_seconds = runtime;
      result.log = log_text;
      return result;
    }
    throw Error(ErrorCode::kSolverOutput,
                "solver wrote no solution (exit code " + std::to_string(run.exit_code) + ")\n" + log_text);
  }
  result = parse_solution(slurp(sol));
  result.runtime_seconds = runtime;
  result.log = log_text;
  if (run.killed && result.status == SolveStatus::kOptimal) result.status = SolveStatus::kFeasible;
  if (!result.has_values()) return result;

  // Solvers may omit zero-valued columns.
  for (const Variable& v : problem.variables()) {
    if (!result.assignment.contains(sanitize_lp_name(v.name))) {
      result.assignment[sanitize_lp_name(v.name)] = 0.0;
    }
  }
  std::map<std::string, double> by_name;
  for (const Variable& v : problem.variables()) by_name[v.name] = result.assignment.at(sanitize_lp_name(v.name));
  result.assignment = std::move(by_name);
  result.objective = problem.objective().evaluate(result.values(problem));
  if (options.polish) result = polish_solution(problem, result);
  return result;
}

}  // namespace metromap
