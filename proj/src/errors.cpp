#include "metromap/errors.hpp"

namespace metromap {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSchema: return "schema";
    case ErrorCode::kUnknownVertex: return "unknown-vertex";
    case ErrorCode::kDuplicateVertex: return "duplicate-vertex";
    case ErrorCode::kZeroLengthEdge: return "zero-length-edge";
    case ErrorCode::kInvalidLine: return "invalid-line";
    case ErrorCode::kUncoveredEdge: return "uncovered-edge";
    case ErrorCode::kDegenerateCrossing: return "degenerate-crossing";
    case ErrorCode::kCollinearOverlap: return "collinear-overlap";
    case ErrorCode::kEqualAngles: return "equal-angles";
    case ErrorCode::kDegreeExceedsDirections: return "degree-exceeds-directions";
    case ErrorCode::kInvalidOrientation: return "invalid-orientation";
    case ErrorCode::kEmptyGraph: return "empty-graph";
    case ErrorCode::kTooFewSlopes: return "too-few-slopes";
    case ErrorCode::kInvalidParams: return "invalid-params";
    case ErrorCode::kAdjacentPair: return "adjacent-pair";
    case ErrorCode::kNameCollision: return "name-collision";
    case ErrorCode::kLpSyntax: return "lp-syntax";
    case ErrorCode::kSolverNotFound: return "solver-not-found";
    case ErrorCode::kSolverOutput: return "solver-output";
    case ErrorCode::kBudgetExceeded: return "budget-exceeded";
    case ErrorCode::kNotSolved: return "not-solved";
    case ErrorCode::kMissingVariable: return "missing-variable";
    case ErrorCode::kMissingCoordinates: return "missing-coordinates";
    case ErrorCode::kRoundBudget: return "round-budget";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

}  // namespace metromap
