#pragma once

#include <string_view>

#include "metromap/solver.hpp"

namespace metromap {

enum class SolutionFormat { kAuto, kPlain, kCbc, kHighs, kXml };

// Parses a solver solution file. Plain format:
//   # status optimal|feasible|infeasible|timeout
//   # objective <value>
//   # gap <value>
//   <name> <value>
// The CBC, HiGHS and CPLEX-XML grammars are recognized as well. Values are
// keyed by variable name as written in the file.
MipSolution parse_solution(std::string_view text, SolutionFormat format = SolutionFormat::kAuto);

SolutionFormat detect_solution_format(std::string_view text);

// Status keyword of a solver status line ("Optimal", "integer optimal
// solution", "Time limit reached", ...). `has_values` separates feasible from
// timeout when the solver stopped early.
SolveStatus interpret_status(std::string_view text, bool has_values);

}  // namespace metromap
