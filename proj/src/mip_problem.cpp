#include "metromap/mip_problem.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "metromap/errors.hpp"

namespace metromap {

LinearExpr& LinearExpr::add(const LinearExpr& other, double scale) {
  for (const Term& t : other.terms_) terms_.push_back({t.var, t.coef * scale});
  constant_ += other.constant_ * scale;
  return *this;
}

LinearExpr LinearExpr::normalized() const {
  LinearExpr out(constant_);
  std::unordered_map<VarId, std::size_t> slot;
  for (const Term& t : terms_) {
    auto [it, inserted] = slot.emplace(t.var, out.terms_.size());
    if (inserted) {
      out.terms_.push_back(t);
    } else {
      out.terms_[it->second].coef += t.coef;
    }
  }
  std::erase_if(out.terms_, [](const Term& t) { return t.coef == 0.0; });
  return out;
}

double LinearExpr::evaluate(std::span<const double> values) const {
  double sum = constant_;
  for (const Term& t : terms_) sum += t.coef * values[t.var];
  return sum;
}

VarId MipProblem::add_variable(std::string name, VarType type, double lower, double upper) {
  if (names_.contains(name)) {
    throw Error(ErrorCode::kNameCollision, "variable '" + name + "' declared twice");
  }
  const VarId id = variables_.size();
  names_.emplace(name, id);
  variables_.push_back({std::move(name), type, lower, upper});
  return id;
}

void MipProblem::add_constraint(std::string name, LinearExpr expr, Relation relation, double rhs) {
  for (const Term& t : expr.terms()) {
    if (t.var >= variables_.size()) {
      throw Error(ErrorCode::kMissingVariable, "constraint '" + name + "' uses an undeclared variable");
    }
    if (!std::isfinite(t.coef)) {
      throw Error(ErrorCode::kInvalidParams, "constraint '" + name + "' has a non-finite coefficient");
    }
  }
  constraints_.push_back({std::move(name), expr.normalized(), relation, rhs});
}

std::size_t MipProblem::count(VarType type) const {
  return static_cast<std::size_t>(std::count_if(
      variables_.begin(), variables_.end(), [type](const Variable& v) { return v.type == type; }));
}

std::optional<VarId> MipProblem::find_variable(std::string_view name) const {
  auto it = names_.find(name);
  if (it == names_.end()) return std::nullopt;
  return it->second;
}

double row_violation(const Constraint& row, std::span<const double> values) {
  const double lhs = row.expr.evaluate(values);
  switch (row.relation) {
    case Relation::kLessEqual: return std::max(0.0, lhs - row.rhs);
    case Relation::kGreaterEqual: return std::max(0.0, row.rhs - lhs);
    case Relation::kEqual: return std::abs(lhs - row.rhs);
  }
  return 0.0;
}

double MipProblem::max_violation(std::span<const double> values) const {
  double worst = 0.0;
  for (VarId i = 0; i < variables_.size(); ++i) {
    const Variable& v = variables_[i];
    worst = std::max({worst, v.lower - values[i], values[i] - v.upper});
    if (v.type != VarType::kContinuous) {
      worst = std::max(worst, std::abs(values[i] - std::round(values[i])));
    }
  }
  for (const Constraint& row : constraints_) worst = std::max(worst, row_violation(row, values));
  return worst;
}

std::optional<std::size_t> MipProblem::worst_row(std::span<const double> values,
                                                 double tolerance) const {
  std::optional<std::size_t> worst;
  double amount = tolerance;
  for (std::size_t r = 0; r < constraints_.size(); ++r) {
    const double v = row_violation(constraints_[r], values);
    if (v > amount) {
      amount = v;
      worst = r;
    }
  }
  return worst;
}

}  // namespace metromap
