#pragma once

#include <filesystem>
#include <map>
#include <stop_token>
#include <string>
#include <string_view>
#include <vector>

#include "metromap/mip_problem.hpp"

namespace metromap {

class VariableRegistry;

enum class SolveStatus { kOptimal, kFeasible, kInfeasible, kTimeout };

std::string_view to_string(SolveStatus status);
SolveStatus parse_solve_status(std::string_view text);

struct SolveOptions {
  double time_limit = 300.0;  // seconds
  double mip_gap = 1e-6;
  // Shell command template. Placeholders: {lp} {sol} {timelimit} {gap} {threads}.
  std::string solver_command;
  int threads = 1;
  // Re-solve the LP with all integer variables fixed, to clean up solver
  // round-off in the continuous part.
  bool polish = true;
  // Keeps the temporary directory (LP, solution, log) for inspection.
  std::filesystem::path keep_files_in;

  void validate() const;
};

struct MipSolution {
  SolveStatus status = SolveStatus::kInfeasible;
  double objective = 0.0;
  double gap = 0.0;
  std::map<std::string, double> assignment;  // variable name -> value
  double runtime_seconds = 0.0;
  std::string log;

  bool has_values() const {
    return status == SolveStatus::kOptimal || status == SolveStatus::kFeasible;
  }
  // Values in declaration order; throws kMissingVariable on a gap.
  std::vector<double> values(const MipProblem& problem) const;
};

// Writes the LP file, runs the external command, and reads the solution back.
// Cancellation through `stop` kills the solver process group.
MipSolution solve_external(const MipProblem& problem, const SolveOptions& options,
                           std::stop_token stop = {});

// Exhaustive oracle for desk-scale models built by build_model. Each edge's
// alpha block, each vertex's beta block, each pair's gamma block (one active
// separation direction) and each bend's delta pair are enumerated; every
// residual continuous program is solved exactly by the dense simplex.
// Direction assignments are visited in order of a lower bound and pruned
// against the incumbent. Throws kBudgetExceeded once more than `limit`
// fixings have been tried.
MipSolution solve_exact_tiny(const MipProblem& problem, const VariableRegistry& registry,
                             double limit = 1048576.0);

// Fixes every integer and binary variable at its rounded value in `values`
// and re-solves the remaining LP. Returns the polished solution, or the input
// unchanged if the LP fails.
MipSolution polish_solution(const MipProblem& problem, const MipSolution& solution);

}  // namespace metromap
