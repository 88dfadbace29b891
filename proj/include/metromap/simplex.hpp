#pragma once

#include <vector>

#include "metromap/mip_problem.hpp"

namespace metromap {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0.0;
  std::vector<double> x;
};

// Dense two-phase primal simplex for small LPs. Integrality markers are
// ignored; bounds are taken from the variables. Dantzig pricing, switching to
// Bland's rule after a run of degenerate pivots.
LpResult solve_lp(const MipProblem& problem);

struct DenseRow {
  std::vector<double> coef;  // one entry per variable
  Relation relation = Relation::kLessEqual;
  double rhs = 0.0;
};

// Same routine on plain dense data: minimize cost·x s.t. rows, lower <= x <= upper.
LpResult solve_dense_lp(const std::vector<double>& cost, const std::vector<DenseRow>& rows,
                        const std::vector<double>& lower, const std::vector<double>& upper);

}  // namespace metromap
