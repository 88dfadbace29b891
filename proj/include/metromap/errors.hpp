#pragma once

#include <stdexcept>
#include <string>

namespace metromap {

enum class ErrorCode {
  kSchema,
  kUnknownVertex,
  kDuplicateVertex,
  kZeroLengthEdge,
  kInvalidLine,
  kUncoveredEdge,
  kDegenerateCrossing,
  kCollinearOverlap,
  kEqualAngles,
  kDegreeExceedsDirections,
  kInvalidOrientation,
  kEmptyGraph,
  kTooFewSlopes,
  kInvalidParams,
  kAdjacentPair,
  kNameCollision,
  kLpSyntax,
  kSolverNotFound,
  kSolverOutput,
  kBudgetExceeded,
  kNotSolved,
  kMissingVariable,
  kMissingCoordinates,
  kRoundBudget,
  kIo,
};

const char* to_string(ErrorCode code);

// Single exception type for the library; `code()` tells callers what went wrong.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by validate_degree; carries the offending vertex.
class DegreeExceedsDirections : public Error {
 public:
  DegreeExceedsDirections(std::string vertex_id, std::size_t degree, int k)
      : Error(ErrorCode::kDegreeExceedsDirections,
              "vertex '" + vertex_id + "' has degree " + std::to_string(degree) +
                  " but only " + std::to_string(2 * k) + " directions exist"),
        vertex_id_(std::move(vertex_id)) {}

  const std::string& vertex_id() const noexcept { return vertex_id_; }

 private:
  std::string vertex_id_;
};

}  // namespace metromap
