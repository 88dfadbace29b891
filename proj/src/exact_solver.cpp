#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>

#include "metromap/errors.hpp"
#include "metromap/model_builder.hpp"
#include "metromap/simplex.hpp"
#include "metromap/solver.hpp"

namespace metromap {

namespace {

constexpr double kFeasTol = 1e-7;

struct ChoiceGroup {
  std::vector<VarId> vars;
  std::vector<std::vector<double>> options;
};

ChoiceGroup one_hot(const std::vector<VarId>& vars) {
  ChoiceGroup g{vars, {}};
  for (std::size_t i = 0; i < vars.size(); ++i) {
    std::vector<double> o(vars.size(), 0.0);
    o[i] = 1.0;
    g.options.push_back(std::move(o));
  }
  return g;
}

// Working copy of the model under partial fixing. Presolve fixes singleton
// equalities, turns singleton inequalities into bounds, drops rows that can
// never bind, and substitutes out variables defined by an equality whose
// implied range fits inside their bounds.
class Work {
 public:
  struct Row {
    std::vector<Term> terms;
    Relation rel = Relation::kLessEqual;
    double rhs = 0.0;
    bool alive = true;
  };
  struct Substitution {
    VarId var;
    double coef;
    std::vector<Term> others;
    double rhs;
  };

  explicit Work(const MipProblem& p) {
    const std::size_t n = p.variable_count();
    lo_.resize(n);
    hi_.resize(n);
    integral_.resize(n);
    for (VarId j = 0; j < n; ++j) {
      lo_[j] = p.variable(j).lower;
      hi_[j] = p.variable(j).upper;
      integral_[j] = p.variable(j).type != VarType::kContinuous;
    }
    fixed_.assign(n, 0);
    gone_.assign(n, 0);
    val_.assign(n, 0.0);
    cost_.assign(n, 0.0);
    for (const Term& t : p.objective().terms()) cost_[t.var] += t.coef;
    cost_const_ = p.objective().constant();
    for (const Constraint& c : p.constraints()) {
      rows_.push_back({c.expr.terms(), c.relation, c.rhs - c.expr.constant(), true});
    }
  }

  std::size_t size() const { return lo_.size(); }
  bool active(VarId j) const { return !fixed_[j] && !gone_[j]; }
  const std::vector<Row>& rows() const { return rows_; }
  double cost(VarId j) const { return cost_[j]; }
  double cost_constant() const { return cost_const_; }
  double lower(VarId j) const { return lo_[j]; }
  double upper(VarId j) const { return hi_[j]; }
  double value(VarId j) const { return val_[j]; }
  bool is_fixed(VarId j) const { return fixed_[j]; }
  const std::vector<Substitution>& substitutions() const { return subs_; }

  bool fix(VarId j, double v) {
    if (fixed_[j]) return std::abs(val_[j] - v) <= kFeasTol;
    if (v < lo_[j] - kFeasTol || v > hi_[j] + kFeasTol) return false;
    fixed_[j] = 1;
    val_[j] = std::clamp(v, lo_[j], hi_[j]);
    if (integral_[j]) val_[j] = std::round(val_[j]);
    cost_const_ += cost_[j] * val_[j];
    cost_[j] = 0.0;
    return true;
  }

  bool presolve() {
    for (int round = 0; round < 1000; ++round) {
      bool changed = false;
      for (Row& r : rows_) {
        if (!r.alive) continue;
        if (!absorb_fixed(r)) return false;
        if (!r.alive) {
          changed = true;
          continue;
        }
        const auto verdict = simplify(r);
        if (!verdict) return false;
        changed = changed || *verdict;
      }
      if (!changed) changed = substitute_one();
      if (!changed) return true;
    }
    return true;
  }

 private:
  // Moves fixed variables into the right-hand side. Returns false on a
  // violated empty row.
  bool absorb_fixed(Row& r) {
    std::erase_if(r.terms, [&](const Term& t) {
      if (!fixed_[t.var]) return false;
      r.rhs -= t.coef * val_[t.var];
      return true;
    });
    if (!r.terms.empty()) return true;
    r.alive = false;
    const double tol = kFeasTol * (1.0 + std::abs(r.rhs));
    switch (r.rel) {
      case Relation::kLessEqual: return 0.0 <= r.rhs + tol;
      case Relation::kGreaterEqual: return 0.0 >= r.rhs - tol;
      case Relation::kEqual: return std::abs(r.rhs) <= tol;
    }
    return true;
  }

  bool tighten(VarId j, double lo, double hi) {
    if (integral_[j]) {
      lo = std::ceil(lo - 1e-9);
      hi = std::floor(hi + 1e-9);
    }
    lo_[j] = std::max(lo_[j], lo);
    hi_[j] = std::min(hi_[j], hi);
    if (lo_[j] > hi_[j] + kFeasTol) return false;
    if (hi_[j] - lo_[j] <= 1e-12) return fix(j, 0.5 * (lo_[j] + hi_[j]));
    return true;
  }

  // nullopt = infeasible, otherwise whether anything changed.
  std::optional<bool> simplify(Row& r) {
    if (r.terms.size() == 1) {
      const Term t = r.terms.front();
      const double bound = r.rhs / t.coef;
      r.alive = false;
      bool ok = true;
      if (r.rel == Relation::kEqual) {
        ok = fix(t.var, bound);
      } else {
        const bool upper = (r.rel == Relation::kLessEqual) == (t.coef > 0);
        ok = upper ? tighten(t.var, -kInfinity, bound) : tighten(t.var, bound, kInfinity);
      }
      if (!ok) return std::nullopt;
      return true;
    }
    double amin = 0.0, amax = 0.0;
    for (const Term& t : r.terms) {
      amin += t.coef > 0 ? t.coef * lo_[t.var] : t.coef * hi_[t.var];
      amax += t.coef > 0 ? t.coef * hi_[t.var] : t.coef * lo_[t.var];
    }
    const double tol = kFeasTol * (1.0 + std::abs(r.rhs));
    if (r.rel != Relation::kGreaterEqual && amin > r.rhs + tol) return std::nullopt;
    if (r.rel != Relation::kLessEqual && amax < r.rhs - tol) return std::nullopt;
    if ((r.rel == Relation::kLessEqual && amax <= r.rhs) ||
        (r.rel == Relation::kGreaterEqual && amin >= r.rhs)) {
      r.alive = false;
      return true;
    }
    return false;
  }

  bool substitute_one() {
    for (std::size_t ri = 0; ri < rows_.size(); ++ri) {
      Row& r = rows_[ri];
      if (!r.alive || r.rel != Relation::kEqual || r.terms.size() < 2) continue;
      for (const Term& cand : r.terms) {
        if (integral_[cand.var]) continue;
        double smin = 0.0, smax = 0.0;
        for (const Term& t : r.terms) {
          if (t.var == cand.var) continue;
          smin += t.coef > 0 ? t.coef * lo_[t.var] : t.coef * hi_[t.var];
          smax += t.coef > 0 ? t.coef * hi_[t.var] : t.coef * lo_[t.var];
        }
        if (!std::isfinite(smin) || !std::isfinite(smax)) continue;
        double vlo = (r.rhs - smax) / cand.coef;
        double vhi = (r.rhs - smin) / cand.coef;
        if (vlo > vhi) std::swap(vlo, vhi);
        if (vlo < lo_[cand.var] - 1e-9 || vhi > hi_[cand.var] + 1e-9) continue;
        eliminate(ri, cand);
        return true;
      }
    }
    return false;
  }

  void eliminate(std::size_t ri, Term pivot) {
    Row def = rows_[ri];
    rows_[ri].alive = false;
    std::vector<Term> others;
    for (const Term& t : def.terms) {
      if (t.var != pivot.var) others.push_back(t);
    }
    for (Row& r : rows_) {
      if (!r.alive) continue;
      auto it = std::find_if(r.terms.begin(), r.terms.end(),
                             [&](const Term& t) { return t.var == pivot.var; });
      if (it == r.terms.end()) continue;
      const double f = it->coef / pivot.coef;
      r.terms.erase(it);
      for (const Term& o : others) add_term(r.terms, o.var, -f * o.coef);
      r.rhs -= f * def.rhs;
    }
    const double cf = cost_[pivot.var] / pivot.coef;
    if (cf != 0.0) {
      for (const Term& o : others) cost_[o.var] -= cf * o.coef;
      cost_const_ += cf * def.rhs;
      cost_[pivot.var] = 0.0;
    }
    gone_[pivot.var] = 1;
    subs_.push_back({pivot.var, pivot.coef, std::move(others), def.rhs});
  }

  static void add_term(std::vector<Term>& terms, VarId var, double coef) {
    for (auto it = terms.begin(); it != terms.end(); ++it) {
      if (it->var != var) continue;
      it->coef += coef;
      if (std::abs(it->coef) < 1e-14) terms.erase(it);
      return;
    }
    terms.push_back({var, coef});
  }

  std::vector<double> lo_, hi_, val_, cost_;
  std::vector<char> integral_, fixed_, gone_;
  double cost_const_ = 0.0;
  std::vector<Row> rows_;
  std::vector<Substitution> subs_;
};

struct Component {
  std::vector<VarId> vars;
  std::vector<std::size_t> rows;
  std::vector<std::size_t> groups;
};

std::size_t find(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) x = parent[x] = parent[parent[x]];
  return x;
}

// Connected components of the active variables; groups follow their members.
std::vector<Component> components(const Work& w, const std::vector<ChoiceGroup>& groups,
                                  const std::vector<std::size_t>& group_ids) {
  const std::size_t n = w.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto unite = [&](std::size_t a, std::size_t b) { parent[find(parent, a)] = find(parent, b); };
  for (const auto& r : w.rows()) {
    if (!r.alive) continue;
    for (std::size_t i = 1; i < r.terms.size(); ++i) unite(r.terms[0].var, r.terms[i].var);
  }
  for (std::size_t g : group_ids) {
    std::optional<VarId> first;
    for (VarId v : groups[g].vars) {
      if (!w.active(v)) continue;
      if (first) unite(*first, v);
      else first = v;
    }
  }
  std::vector<int> slot(n, -1);
  std::vector<Component> out;
  for (VarId v = 0; v < n; ++v) {
    if (!w.active(v)) continue;
    const std::size_t root = find(parent, v);
    if (slot[root] < 0) {
      slot[root] = static_cast<int>(out.size());
      out.emplace_back();
    }
    out[static_cast<std::size_t>(slot[root])].vars.push_back(v);
  }
  for (std::size_t ri = 0; ri < w.rows().size(); ++ri) {
    const auto& r = w.rows()[ri];
    if (!r.alive || r.terms.empty()) continue;
    out[static_cast<std::size_t>(slot[find(parent, r.terms[0].var)])].rows.push_back(ri);
  }
  for (std::size_t g : group_ids) {
    for (VarId v : groups[g].vars) {
      if (!w.active(v)) continue;
      out[static_cast<std::size_t>(slot[find(parent, v)])].groups.push_back(g);
      break;
    }
  }
  return out;
}

double combinations(const std::vector<ChoiceGroup>& groups, const std::vector<std::size_t>& ids) {
  double c = 1.0;
  for (std::size_t g : ids) c *= static_cast<double>(groups[g].options.size());
  return c;
}

bool apply_option(Work& w, const ChoiceGroup& g, std::size_t option) {
  for (std::size_t i = 0; i < g.vars.size(); ++i) {
    if (!w.fix(g.vars[i], g.options[option][i])) return false;
  }
  return true;
}

// Solves the continuous part of one component of `w` (already presolved).
// Returns the component's objective contribution and writes values.
std::optional<double> solve_component(const Work& w, const std::vector<VarId>& vars,
                                      std::vector<double>& values) {
  std::vector<VarId> lp_vars;
  std::vector<int> column(w.size(), -1);
  double obj = 0.0;
  for (VarId v : vars) {
    if (!w.active(v)) continue;
    column[v] = static_cast<int>(lp_vars.size());
    lp_vars.push_back(v);
  }
  std::vector<DenseRow> rows;
  std::vector<char> in_row(lp_vars.size(), 0);
  for (const auto& r : w.rows()) {
    if (!r.alive || r.terms.empty() || column[r.terms[0].var] < 0) continue;
    DenseRow d{std::vector<double>(lp_vars.size(), 0.0), r.rel, r.rhs};
    for (const Term& t : r.terms) {
      d.coef[static_cast<std::size_t>(column[t.var])] += t.coef;
      in_row[static_cast<std::size_t>(column[t.var])] = 1;
    }
    rows.push_back(std::move(d));
  }
  // Variables outside every row sit at their cheapest bound.
  std::vector<VarId> core;
  for (std::size_t i = 0; i < lp_vars.size(); ++i) {
    const VarId v = lp_vars[i];
    if (in_row[i]) {
      core.push_back(v);
      continue;
    }
    const double c = w.cost(v);
    double x = 0.0;
    if (c > 0) x = w.lower(v);
    else if (c < 0) x = w.upper(v);
    else x = std::isfinite(w.lower(v)) ? w.lower(v) : (std::isfinite(w.upper(v)) ? w.upper(v) : 0.0);
    if (!std::isfinite(x)) return std::nullopt;  // unbounded
    values[v] = x;
    obj += c * x;
  }
  if (core.empty()) return obj;
  if (core.size() != lp_vars.size()) {
    std::vector<int> col2(w.size(), -1);
    for (std::size_t i = 0; i < core.size(); ++i) col2[core[i]] = static_cast<int>(i);
    for (DenseRow& d : rows) {
      std::vector<double> c2(core.size(), 0.0);
      for (std::size_t i = 0; i < lp_vars.size(); ++i) {
        if (col2[lp_vars[i]] >= 0) c2[static_cast<std::size_t>(col2[lp_vars[i]])] = d.coef[i];
      }
      d.coef = std::move(c2);
    }
  }
  std::vector<double> cost(core.size()), lower(core.size()), upper(core.size());
  for (std::size_t i = 0; i < core.size(); ++i) {
    cost[i] = w.cost(core[i]);
    lower[i] = w.lower(core[i]);
    upper[i] = w.upper(core[i]);
  }
  const LpResult lp = solve_dense_lp(cost, rows, lower, upper);
  if (lp.status != LpStatus::kOptimal) return std::nullopt;
  for (std::size_t i = 0; i < core.size(); ++i) values[core[i]] = lp.x[i];
  return obj + lp.objective;
}

struct ComponentBest {
  double objective = kInfinity;
  std::vector<double> values;  // full-length, only component entries meaningful
  std::vector<VarId> fixed_vars;
  std::vector<Work::Substitution> subs;
};

std::optional<ComponentBest> best_in_component(const Work& base, const Component& comp,
                                               const std::vector<ChoiceGroup>& groups,
                                               double& budget_used, double limit) {
  std::vector<std::size_t> radix(comp.groups.size(), 0);
  std::optional<ComponentBest> best;
  const std::size_t base_subs = base.substitutions().size();
  while (true) {
    budget_used += 1.0;
    if (budget_used > limit) {
      throw Error(ErrorCode::kBudgetExceeded, "exact enumeration exceeded its fixing budget");
    }
    Work w = base;
    bool ok = true;
    for (std::size_t i = 0; i < comp.groups.size() && ok; ++i) {
      ok = apply_option(w, groups[comp.groups[i]], radix[i]);
    }
    if (ok) ok = w.presolve();
    if (ok) {
      std::vector<double> values(w.size(), 0.0);
      const auto obj = solve_component(w, comp.vars, values);
      if (obj) {
        double total = *obj;
        for (VarId v : comp.vars) {
          if (w.is_fixed(v)) {
            values[v] = w.value(v);
          }
        }
        // Constant part that depends on this component's fixings.
        total += w.cost_constant() - base.cost_constant();
        if (!best || total < best->objective - 1e-9) {
          ComponentBest b;
          b.objective = total;
          b.values = std::move(values);
          for (VarId v : comp.vars) {
            if (w.is_fixed(v)) b.fixed_vars.push_back(v);
          }
          b.subs.assign(w.substitutions().begin() + static_cast<std::ptrdiff_t>(base_subs),
                        w.substitutions().end());
          best = std::move(b);
        }
      }
    }
    std::size_t i = 0;
    for (; i < radix.size(); ++i) {
      if (++radix[i] < groups[comp.groups[i]].options.size()) break;
      radix[i] = 0;
    }
    if (i == radix.size()) break;
  }
  return best;
}

void back_substitute(std::vector<double>& x, const std::vector<Work::Substitution>& subs) {
  for (auto it = subs.rbegin(); it != subs.rend(); ++it) {
    double s = it->rhs;
    for (const Term& t : it->others) s -= t.coef * x[t.var];
    x[it->var] = s / it->coef;
  }
}

std::vector<ChoiceGroup> collect_groups(const MipProblem& p, const VariableRegistry& reg,
                                        std::size_t& alpha_groups) {
  std::vector<ChoiceGroup> groups;
  for (const auto& e : reg.edges) groups.push_back(one_hot(e.alpha));
  alpha_groups = groups.size();
  for (const auto& b : reg.beta) {
    if (!b.empty()) groups.push_back(one_hot(b));
  }
  for (const auto& pv : reg.pairs) groups.push_back(one_hot(pv.gamma));
  for (const auto& bv : reg.bends) {
    groups.push_back({{bv.delta1, bv.delta2}, {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}});
  }
  std::vector<char> covered(p.variable_count(), 0);
  for (const auto& g : groups) {
    for (VarId v : g.vars) {
      if (v >= p.variable_count()) throw Error(ErrorCode::kMissingVariable, "registry does not match the problem");
      covered[v] = 1;
    }
  }
  for (VarId v = 0; v < p.variable_count(); ++v) {
    if (!covered[v] && p.variable(v).type == VarType::kBinary) groups.push_back({{v}, {{0.0}, {1.0}}});
  }
  return groups;
}

constexpr double kSmallComponent = 64.0;

// Lower bound on every completion of an alpha fixing: small components are
// solved outright, the rest by their continuous relaxation.
std::optional<double> lower_bound(const Work& w, const std::vector<Component>& comps,
                                  const std::vector<ChoiceGroup>& groups, double& used, double limit) {
  double lb = w.cost_constant();
  for (const Component& comp : comps) {
    if (combinations(groups, comp.groups) <= kSmallComponent) {
      const auto best = best_in_component(w, comp, groups, used, limit);
      if (!best) return std::nullopt;
      lb += best->objective;
      continue;
    }
    std::vector<double> values(w.size(), 0.0);
    const auto relaxed = solve_component(w, comp.vars, values);
    if (!relaxed) return std::nullopt;
    lb += *relaxed;
  }
  return lb;
}

bool next_radix(std::vector<std::size_t>& radix, const std::vector<ChoiceGroup>& groups) {
  for (std::size_t i = 0; i < radix.size(); ++i) {
    if (++radix[i] < groups[i].options.size()) return true;
    radix[i] = 0;
  }
  return false;
}

}  // namespace

MipSolution solve_exact_tiny(const MipProblem& problem, const VariableRegistry& registry,
                             double limit) {
  const auto start = std::chrono::steady_clock::now();
  std::size_t alpha_groups = 0;
  const auto groups = collect_groups(problem, registry, alpha_groups);
  std::vector<std::size_t> alpha_ids(alpha_groups);
  std::iota(alpha_ids.begin(), alpha_ids.end(), 0);
  const double alpha_cases = combinations(groups, alpha_ids);
  if (alpha_cases > limit) {
    throw Error(ErrorCode::kBudgetExceeded,
                "exact enumeration needs " + std::to_string(static_cast<long long>(alpha_cases)) +
                    " direction fixings, limit is " + std::to_string(static_cast<long long>(limit)));
  }

  std::vector<std::size_t> inner_groups;
  for (std::size_t g = alpha_groups; g < groups.size(); ++g) inner_groups.push_back(g);

  MipSolution out;
  out.status = SolveStatus::kInfeasible;
  std::optional<std::vector<double>> best_x;
  double best_obj = kInfinity;
  double used = 0.0;
  const Work root(problem);

  auto fix_alpha = [&](const std::vector<std::size_t>& radix) -> std::optional<Work> {
    Work w = root;
    for (std::size_t g = 0; g < alpha_groups; ++g) {
      if (!apply_option(w, groups[g], radix[g])) return std::nullopt;
    }
    if (!w.presolve()) return std::nullopt;
    return w;
  };

  // Bound every direction assignment, then visit them cheapest first.
  struct Case {
    double bound;
    std::vector<std::size_t> radix;
  };
  std::vector<Case> cases;
  std::vector<std::size_t> radix(alpha_groups, 0);
  do {
    used += 1.0;
    if (used > limit) throw Error(ErrorCode::kBudgetExceeded, "exact enumeration exceeded its fixing budget");
    const auto w = fix_alpha(radix);
    if (!w) continue;
    const auto lb = lower_bound(*w, components(*w, groups, inner_groups), groups, used, limit);
    if (lb) cases.push_back({*lb, radix});
  } while (next_radix(radix, groups));
  std::stable_sort(cases.begin(), cases.end(), [](const Case& a, const Case& b) { return a.bound < b.bound; });

  for (const Case& c : cases) {
    if (c.bound >= best_obj - 1e-9 * std::max(1.0, std::abs(best_obj))) break;
    const Work w = *fix_alpha(c.radix);
    std::vector<double> x(problem.variable_count(), 0.0);
    for (VarId v = 0; v < x.size(); ++v) {
      if (w.is_fixed(v)) x[v] = w.value(v);
    }
    bool ok = true;
    std::vector<std::vector<Work::Substitution>> comp_subs;
    for (const Component& comp : components(w, groups, inner_groups)) {
      const auto best = best_in_component(w, comp, groups, used, limit);
      if (!best) {
        ok = false;
        break;
      }
      for (VarId v : comp.vars) x[v] = best->values[v];
      comp_subs.push_back(best->subs);
    }
    if (!ok) continue;
    for (const auto& s : comp_subs) back_substitute(x, s);
    back_substitute(x, w.substitutions());
    for (VarId v = 0; v < x.size(); ++v) {
      if (problem.variable(v).type != VarType::kContinuous) x[v] = std::round(x[v]);
    }
    const double obj = problem.objective().evaluate(x);
    if (obj < best_obj - 1e-9) {
      best_obj = obj;
      best_x = std::move(x);
    }
  }

  out.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!best_x) return out;
  const double violation = problem.max_violation(*best_x);
  if (violation > 1e-6) {
    throw Error(ErrorCode::kSolverOutput,
                "exact oracle produced a solution violating the model by " + std::to_string(violation));
  }
  out.status = SolveStatus::kOptimal;
  out.objective = best_obj;
  out.gap = 0.0;
  for (VarId v = 0; v < problem.variable_count(); ++v) {
    out.assignment[problem.variable(v).name] = (*best_x)[v];
  }
  out.log = "exact enumeration: " + std::to_string(static_cast<long long>(used)) + " residual programs";
  return out;
}

MipSolution polish_solution(const MipProblem& problem, const MipSolution& solution) {
  if (!solution.has_values()) return solution;
  const std::vector<double> start = solution.values(problem);
  Work w(problem);
  for (VarId v = 0; v < problem.variable_count(); ++v) {
    if (problem.variable(v).type == VarType::kContinuous) continue;
    if (!w.fix(v, std::round(start[v]))) return solution;
  }
  if (!w.presolve()) return solution;
  std::vector<double> x(problem.variable_count(), 0.0);
  for (VarId v = 0; v < x.size(); ++v) {
    if (w.is_fixed(v)) x[v] = w.value(v);
  }
  for (const Component& comp : components(w, {}, {})) {
    std::vector<double> values(x.size(), 0.0);
    if (!solve_component(w, comp.vars, values)) return solution;
    for (VarId v : comp.vars) x[v] = values[v];
  }
  back_substitute(x, w.substitutions());
  if (problem.max_violation(x) > std::max(1e-9, problem.max_violation(start))) return solution;
  MipSolution out = solution;
  for (VarId v = 0; v < x.size(); ++v) out.assignment[problem.variable(v).name] = x[v];
  out.objective = problem.objective().evaluate(x);
  return out;
}

}  // namespace metromap
