#include "metromap/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "metromap/errors.hpp"

namespace metromap {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-10;
constexpr int kDegenerateRun = 50;
constexpr long kMaxPivots = 200000;

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : m_(rows), n_(cols), data_((rows + 1) * (cols + 1), 0.0), basis_(rows, 0) {}

  double& at(std::size_t r, std::size_t c) { return data_[r * (n_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * (n_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, n_); }
  double& cost(std::size_t c) { return at(m_, c); }
  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t r, std::size_t c) {
    const double inv = 1.0 / at(r, c);
    double* pr = &data_[r * (n_ + 1)];
    for (std::size_t j = 0; j <= n_; ++j) pr[j] *= inv;
    pr[c] = 1.0;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r) continue;
      double* pi = &data_[i * (n_ + 1)];
      const double f = pi[c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= n_; ++j) pi[j] -= f * pr[j];
      pi[c] = 0.0;
    }
    basis_[r] = c;
  }

  void drop_row(std::size_t r) {
    for (std::size_t i = r; i < m_; ++i) {
      std::copy_n(&data_[(i + 1) * (n_ + 1)], n_ + 1, &data_[i * (n_ + 1)]);
    }
    data_.resize(m_ * (n_ + 1));
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
    --m_;
  }

  // Returns false if unbounded. Columns with blocked[c] never enter.
  bool optimize(const std::vector<bool>& blocked) {
    int degenerate = 0;
    for (long it = 0; it < kMaxPivots; ++it) {
      const bool bland = degenerate >= kDegenerateRun;
      std::size_t enter = n_;
      double best = -kCostTol;
      for (std::size_t j = 0; j < n_; ++j) {
        if (blocked[j]) continue;
        const double d = cost(j);
        if (bland) {
          if (d < -kCostTol) {
            enter = j;
            break;
          }
        } else if (d < best) {
          best = d;
          enter = j;
        }
      }
      if (enter == n_) return true;

      std::size_t leave = m_;
      double ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = at(i, enter);
        if (a <= kPivotTol) continue;
        const double q = rhs(i) / a;
        if (q < ratio - 1e-12 || (q <= ratio + 1e-12 && leave < m_ && basis_[i] < basis_[leave])) {
          ratio = q;
          leave = i;
        }
      }
      if (leave == m_) return false;
      degenerate = ratio <= 1e-12 ? degenerate + 1 : 0;
      pivot(leave, enter);
      if (rhs(leave) < 0.0 && rhs(leave) > -1e-11) rhs(leave) = 0.0;
    }
    throw Error(ErrorCode::kBudgetExceeded, "simplex pivot limit reached");
  }

 private:
  std::size_t m_, n_;
  std::vector<double> data_;
  std::vector<std::size_t> basis_;
};

enum class ColumnMap { kShifted, kMirrored, kSplit };

struct VarMap {
  ColumnMap kind = ColumnMap::kShifted;
  std::size_t col = 0;
  std::size_t neg = 0;  // second column for kSplit
  double offset = 0.0;
};

}  // namespace

LpResult solve_dense_lp(const std::vector<double>& cost, const std::vector<DenseRow>& rows,
                        const std::vector<double>& lower, const std::vector<double>& upper) {
  const std::size_t nv = cost.size();
  LpResult result;

  // Structural columns.
  std::vector<VarMap> map(nv);
  std::size_t ncols = 0;
  struct Extra {
    std::size_t col;
    double bound;
  };
  std::vector<Extra> caps;
  for (std::size_t j = 0; j < nv; ++j) {
    if (lower[j] > upper[j] + 1e-9) {
      result.status = LpStatus::kInfeasible;
      return result;
    }
    const bool lo = std::isfinite(lower[j]);
    const bool hi = std::isfinite(upper[j]);
    if (lo) {
      map[j] = {ColumnMap::kShifted, ncols++, 0, lower[j]};
      if (hi) caps.push_back({map[j].col, std::max(0.0, upper[j] - lower[j])});
    } else if (hi) {
      map[j] = {ColumnMap::kMirrored, ncols++, 0, upper[j]};
    } else {
      map[j] = {ColumnMap::kSplit, ncols, ncols + 1, 0.0};
      ncols += 2;
    }
  }

  struct Row {
    std::vector<double> a;
    Relation rel;
    double b;
  };
  std::vector<Row> work;
  std::vector<double> c(ncols, 0.0);
  for (std::size_t j = 0; j < nv; ++j) {
    const VarMap& vm = map[j];
    switch (vm.kind) {
      case ColumnMap::kShifted:
        c[vm.col] += cost[j];
        break;
      case ColumnMap::kMirrored:
        c[vm.col] -= cost[j];
        break;
      case ColumnMap::kSplit:
        c[vm.col] += cost[j];
        c[vm.neg] -= cost[j];
        break;
    }
  }
  for (const DenseRow& r : rows) {
    Row w{std::vector<double>(ncols, 0.0), r.relation, r.rhs};
    for (std::size_t j = 0; j < nv; ++j) {
      const double a = r.coef[j];
      if (a == 0.0) continue;
      const VarMap& vm = map[j];
      switch (vm.kind) {
        case ColumnMap::kShifted:
          w.a[vm.col] += a;
          w.b -= a * vm.offset;
          break;
        case ColumnMap::kMirrored:
          w.a[vm.col] -= a;
          w.b -= a * vm.offset;
          break;
        case ColumnMap::kSplit:
          w.a[vm.col] += a;
          w.a[vm.neg] -= a;
          break;
      }
    }
    work.push_back(std::move(w));
  }
  for (const Extra& e : caps) {
    Row w{std::vector<double>(ncols, 0.0), Relation::kLessEqual, e.bound};
    w.a[e.col] = 1.0;
    work.push_back(std::move(w));
  }

  // Slack and artificial columns.
  const std::size_t m = work.size();
  std::vector<int> slack_col(m, -1);
  std::vector<double> slack_sign(m, 0.0);
  std::size_t next = ncols;
  for (std::size_t i = 0; i < m; ++i) {
    if (work[i].rel == Relation::kEqual) continue;
    slack_col[i] = static_cast<int>(next++);
    slack_sign[i] = work[i].rel == Relation::kLessEqual ? 1.0 : -1.0;
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (work[i].b < 0.0) {
      for (double& a : work[i].a) a = -a;
      work[i].b = -work[i].b;
      slack_sign[i] = -slack_sign[i];
    }
  }
  std::vector<int> art_col(m, -1);
  for (std::size_t i = 0; i < m; ++i) {
    if (slack_col[i] >= 0 && slack_sign[i] > 0) continue;
    art_col[i] = static_cast<int>(next++);
  }
  const std::size_t ntotal = next;

  Tableau t(m, ntotal);
  double bmax = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < ncols; ++j) t.at(i, j) = work[i].a[j];
    if (slack_col[i] >= 0) t.at(i, static_cast<std::size_t>(slack_col[i])) = slack_sign[i];
    if (art_col[i] >= 0) {
      t.at(i, static_cast<std::size_t>(art_col[i])) = 1.0;
      t.basis()[i] = static_cast<std::size_t>(art_col[i]);
    } else {
      t.basis()[i] = static_cast<std::size_t>(slack_col[i]);
    }
    t.rhs(i) = work[i].b;
    bmax = std::max(bmax, work[i].b);
  }

  std::vector<bool> is_art(ntotal, false);
  for (int a : art_col) {
    if (a >= 0) is_art[static_cast<std::size_t>(a)] = true;
  }

  // Phase 1.
  bool any_art = false;
  for (std::size_t i = 0; i < m; ++i) {
    if (art_col[i] < 0) continue;
    any_art = true;
    for (std::size_t j = 0; j <= ntotal; ++j) {
      if (j < ntotal && is_art[j]) continue;
      t.at(m, j) -= t.at(i, j);
    }
  }
  if (any_art) {
    t.optimize(std::vector<bool>(ntotal, false));
    if (-t.rhs(t.rows()) > 1e-9 * bmax) {
      result.status = LpStatus::kInfeasible;
      return result;
    }
    // Drive remaining artificials out of the basis.
    for (std::size_t i = 0; i < t.rows();) {
      if (!is_art[t.basis()[i]]) {
        ++i;
        continue;
      }
      std::size_t enter = ntotal;
      double best = kPivotTol;
      for (std::size_t j = 0; j < ntotal; ++j) {
        if (is_art[j]) continue;
        if (std::abs(t.at(i, j)) > best) {
          best = std::abs(t.at(i, j));
          enter = j;
        }
      }
      if (enter == ntotal) {
        t.drop_row(i);
      } else {
        t.pivot(i, enter);
        ++i;
      }
    }
  }

  // Phase 2.
  const std::size_t mrow = t.rows();
  for (std::size_t j = 0; j <= ntotal; ++j) t.at(mrow, j) = j < ncols ? c[j] : 0.0;
  for (std::size_t i = 0; i < mrow; ++i) {
    const std::size_t bcol = t.basis()[i];
    const double cb = bcol < ncols ? c[bcol] : 0.0;
    if (cb == 0.0) continue;
    for (std::size_t j = 0; j <= ntotal; ++j) t.at(mrow, j) -= cb * t.at(i, j);
  }
  if (!t.optimize(is_art)) {
    result.status = LpStatus::kUnbounded;
    return result;
  }

  std::vector<double> col_value(ntotal, 0.0);
  for (std::size_t i = 0; i < mrow; ++i) col_value[t.basis()[i]] = std::max(0.0, t.rhs(i));
  result.x.assign(nv, 0.0);
  for (std::size_t j = 0; j < nv; ++j) {
    const VarMap& vm = map[j];
    switch (vm.kind) {
      case ColumnMap::kShifted: result.x[j] = vm.offset + col_value[vm.col]; break;
      case ColumnMap::kMirrored: result.x[j] = vm.offset - col_value[vm.col]; break;
      case ColumnMap::kSplit: result.x[j] = col_value[vm.col] - col_value[vm.neg]; break;
    }
    result.x[j] = std::clamp(result.x[j], lower[j], upper[j]);
  }
  result.objective = 0.0;
  for (std::size_t j = 0; j < nv; ++j) result.objective += cost[j] * result.x[j];
  result.status = LpStatus::kOptimal;
  return result;
}

LpResult solve_lp(const MipProblem& problem) {
  const std::size_t n = problem.variable_count();
  std::vector<double> cost(n, 0.0), lower(n), upper(n);
  for (const Term& t : problem.objective().terms()) cost[t.var] += t.coef;
  for (VarId j = 0; j < n; ++j) {
    lower[j] = problem.variable(j).lower;
    upper[j] = problem.variable(j).upper;
  }
  std::vector<DenseRow> rows;
  rows.reserve(problem.constraint_count());
  for (const Constraint& c : problem.constraints()) {
    DenseRow r{std::vector<double>(n, 0.0), c.relation, c.rhs - c.expr.constant()};
    for (const Term& t : c.expr.terms()) r.coef[t.var] += t.coef;
    rows.push_back(std::move(r));
  }
  LpResult out = solve_dense_lp(cost, rows, lower, upper);
  if (out.status == LpStatus::kOptimal) out.objective += problem.objective().constant();
  return out;
}

}  // namespace metromap
