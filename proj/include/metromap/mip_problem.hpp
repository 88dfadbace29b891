#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace metromap {

using VarId = std::size_t;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class VarType { kContinuous, kBinary, kInteger };

struct Variable {
  std::string name;
  VarType type = VarType::kContinuous;
  double lower = 0.0;
  double upper = kInfinity;
};

struct Term {
  VarId var = 0;
  double coef = 0.0;
};

class LinearExpr {
 public:
  LinearExpr() = default;
  explicit LinearExpr(double constant) : constant_(constant) {}

  LinearExpr& add(VarId var, double coef) {
    terms_.push_back({var, coef});
    return *this;
  }
  LinearExpr& add(const LinearExpr& other, double scale = 1.0);
  LinearExpr& add_constant(double c) {
    constant_ += c;
    return *this;
  }

  const std::vector<Term>& terms() const { return terms_; }
  double constant() const { return constant_; }

  // Merges duplicate variables and drops zero coefficients; keeps first-seen order.
  LinearExpr normalized() const;

  double evaluate(std::span<const double> values) const;

 private:
  std::vector<Term> terms_;
  double constant_ = 0.0;
};

enum class Relation { kLessEqual, kEqual, kGreaterEqual };

struct Constraint {
  std::string name;
  LinearExpr expr;
  Relation relation = Relation::kLessEqual;
  double rhs = 0.0;
};

// A minimization MILP. Variables and constraints keep declaration order.
class MipProblem {
 public:
  VarId add_variable(std::string name, VarType type, double lower, double upper);
  VarId add_binary(std::string name) { return add_variable(std::move(name), VarType::kBinary, 0.0, 1.0); }
  void add_constraint(std::string name, LinearExpr expr, Relation relation, double rhs);
  void set_objective(LinearExpr objective) { objective_ = std::move(objective); }

  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const LinearExpr& objective() const { return objective_; }
  const Variable& variable(VarId id) const { return variables_.at(id); }

  std::size_t variable_count() const { return variables_.size(); }
  std::size_t constraint_count() const { return constraints_.size(); }
  std::size_t count(VarType type) const;

  std::optional<VarId> find_variable(std::string_view name) const;

  // Largest violation of any bound, row, or integrality requirement.
  double max_violation(std::span<const double> values) const;
  // Index of the row with the largest violation, if any violation exceeds `tolerance`.
  std::optional<std::size_t> worst_row(std::span<const double> values, double tolerance) const;

 private:
  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  LinearExpr objective_;
  std::map<std::string, VarId, std::less<>> names_;
};

double row_violation(const Constraint& row, std::span<const double> values);

}  // namespace metromap
