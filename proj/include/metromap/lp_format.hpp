#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "metromap/mip_problem.hpp"

namespace metromap {

// Variable or row name restricted to [A-Za-z0-9_]; a leading digit gets an
// `n` prefix.
std::string sanitize_lp_name(std::string_view name);

// CPLEX LP text for `problem`. Declaration order throughout, coefficients with
// 17 significant digits. Throws kNameCollision if two names sanitize alike.
std::string write_lp(const MipProblem& problem);
void write_lp_file(const MipProblem& problem, const std::filesystem::path& path);

// Reads the subset of the LP format produced by write_lp (plus the usual
// `=<`, `=>` spellings and line continuations). Variables appear in first-use
// order.
MipProblem read_lp(std::string_view text);

}  // namespace metromap
