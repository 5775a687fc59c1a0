#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "ccg/common.hpp"

namespace ccg {

enum class LpStatus { Optimal, Infeasible, Unbounded };

inline std::string to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    default: return "unbounded";
  }
}

// max c.x  s.t.  A x <= b,  E x = f,  lo <= x <= hi.
struct LinearProgram {
  int n = 0;
  std::vector<double> c;
  std::vector<std::vector<double>> a_le;
  std::vector<double> b_le;
  std::vector<std::vector<double>> a_eq;
  std::vector<double> b_eq;
  std::vector<double> lo, hi;

  explicit LinearProgram(int vars)
      : n(vars),
        c(vars, 0.0),
        lo(vars, 0.0),
        hi(vars, std::numeric_limits<double>::infinity()) {}

  void maximize(std::vector<double> obj) {
    if (static_cast<int>(obj.size()) != n) throw InputError("objective has wrong dimension");
    c = std::move(obj);
  }

  void add_le(std::vector<double> row, double rhs) {
    if (static_cast<int>(row.size()) != n) throw InputError("row has wrong dimension");
    a_le.push_back(std::move(row));
    b_le.push_back(rhs);
  }

  void add_eq(std::vector<double> row, double rhs) {
    if (static_cast<int>(row.size()) != n) throw InputError("row has wrong dimension");
    a_eq.push_back(std::move(row));
    b_eq.push_back(rhs);
  }

  void set_bounds(int j, double lower, double upper) {
    if (j < 0 || j >= n) throw InputError("variable index out of range");
    if (lower > upper) throw InputError("variable bounds cross");
    lo[j] = lower;
    hi[j] = upper;
  }

  void set_free(int j) {
    set_bounds(j, -std::numeric_limits<double>::infinity(),
               std::numeric_limits<double>::infinity());
  }
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> point;
  double objective = 0.0;
  double max_residual = 0.0;
};

namespace detail_lp {

constexpr double kReducedCostTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kPhaseOneTol = 1e-8;
constexpr int kRefactorEvery = 100;

// Dense revised simplex over standard form min cost.y, N y = rhs, y >= 0.
// Bland's rule on both the entering and the leaving variable keeps the
// iteration deterministic and cycle-free.
struct SimplexCore {
  int m = 0;
  int ncols = 0;
  std::vector<std::vector<double>> col;   // [ncols][m]
  std::vector<double> rhs;                // [m]
  std::vector<int> basis;                 // [m]
  std::vector<char> in_basis;             // [ncols]
  std::vector<std::vector<double>> binv;  // [m][m]
  std::vector<double> xb;                 // [m]
  int pivots_since_refactor = 0;

  void init_identity_basis(int first_identity_col) {
    basis.resize(m);
    in_basis.assign(ncols, 0);
    for (int i = 0; i < m; ++i) {
      basis[i] = first_identity_col + i;
      in_basis[basis[i]] = 1;
    }
    binv.assign(m, std::vector<double>(m, 0.0));
    for (int i = 0; i < m; ++i) binv[i][i] = 1.0;
    xb = rhs;
  }

  std::vector<double> ftran(int j) const {
    std::vector<double> d(m, 0.0);
    const std::vector<double>& aj = col[j];
    for (int i = 0; i < m; ++i) {
      double acc = 0.0;
      const std::vector<double>& bi = binv[i];
      for (int r = 0; r < m; ++r) acc += bi[r] * aj[r];
      d[i] = acc;
    }
    return d;
  }

  void refactor() {
    // Gauss-Jordan inverse of the basis matrix, with partial pivoting.
    std::vector<std::vector<double>> work(m, std::vector<double>(2 * m, 0.0));
    for (int i = 0; i < m; ++i) {
      for (int r = 0; r < m; ++r) work[r][i] = col[basis[i]][r];
      work[i][m + i] = 1.0;
    }
    for (int k = 0; k < m; ++k) {
      int piv = k;
      for (int r = k + 1; r < m; ++r)
        if (std::abs(work[r][k]) > std::abs(work[piv][k])) piv = r;
      if (std::abs(work[piv][k]) < 1e-13) throw SolveError("lp_solve: singular basis");
      std::swap(work[k], work[piv]);
      const double inv = 1.0 / work[k][k];
      for (int c2 = 0; c2 < 2 * m; ++c2) work[k][c2] *= inv;
      for (int r = 0; r < m; ++r) {
        if (r == k) continue;
        const double f = work[r][k];
        if (f == 0.0) continue;
        for (int c2 = 0; c2 < 2 * m; ++c2) work[r][c2] -= f * work[k][c2];
      }
    }
    for (int i = 0; i < m; ++i)
      for (int r = 0; r < m; ++r) binv[i][r] = work[i][m + r];
    xb.assign(m, 0.0);
    for (int i = 0; i < m; ++i) {
      double acc = 0.0;
      for (int r = 0; r < m; ++r) acc += binv[i][r] * rhs[r];
      xb[i] = acc;
    }
    pivots_since_refactor = 0;
  }

  void pivot(int leave_row, int enter_col, const std::vector<double>& d) {
    const double piv = d[leave_row];
    std::vector<double>& brow = binv[leave_row];
    for (int r = 0; r < m; ++r) brow[r] /= piv;
    xb[leave_row] /= piv;
    for (int i = 0; i < m; ++i) {
      if (i == leave_row) continue;
      const double f = d[i];
      if (f == 0.0) continue;
      for (int r = 0; r < m; ++r) binv[i][r] -= f * brow[r];
      xb[i] -= f * xb[leave_row];
      if (xb[i] < 0.0 && xb[i] > -1e-11) xb[i] = 0.0;
    }
    in_basis[basis[leave_row]] = 0;
    basis[leave_row] = enter_col;
    in_basis[enter_col] = 1;
    if (++pivots_since_refactor >= kRefactorEvery) refactor();
  }

  // Minimizes cost over allowed columns. Returns 0 when optimal, 1 when
  // unbounded below.
  int minimize(const std::vector<double>& cost, const std::vector<char>& allowed) {
    const long max_iters = 50000L + 100L * (m + ncols);
    std::vector<double> y(m);
    for (long iter = 0; iter < max_iters; ++iter) {
      for (int r = 0; r < m; ++r) {
        double acc = 0.0;
        for (int i = 0; i < m; ++i) acc += cost[basis[i]] * binv[i][r];
        y[r] = acc;
      }
      int enter = -1;
      for (int j = 0; j < ncols; ++j) {
        if (!allowed[j] || in_basis[j]) continue;
        double red = cost[j];
        const std::vector<double>& aj = col[j];
        for (int r = 0; r < m; ++r) red -= y[r] * aj[r];
        if (red < -kReducedCostTol) {
          enter = j;
          break;  // Bland: first eligible index enters
        }
      }
      if (enter < 0) return 0;
      std::vector<double> d = ftran(enter);
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        if (d[i] <= kPivotTol) continue;
        const double ratio = std::max(xb[i], 0.0) / d[i];
        if (ratio < best - 1e-12 ||
            (ratio <= best + 1e-12 && (leave < 0 || basis[i] < basis[leave]))) {
          best = ratio;
          leave = i;
        }
      }
      if (leave < 0) return 1;
      pivot(leave, enter, d);
    }
    throw SolveError("lp_solve: iteration limit reached");
  }

  double objective(const std::vector<double>& cost) const {
    double acc = 0.0;
    for (int i = 0; i < m; ++i) acc += cost[basis[i]] * xb[i];
    return acc;
  }
};

struct VarMap {
  int kind = 0;  // 0: x = shift + y0, 1: x = shift - y0, 2: x = y0 - y1
  int y0 = -1;
  int y1 = -1;
  double shift = 0.0;
};

}  // namespace detail_lp

inline LpSolution lp_solve(const LinearProgram& lp) {
  using namespace detail_lp;
  const double inf = std::numeric_limits<double>::infinity();
  LpSolution sol;

  // Substitute bounded variables so every standard-form variable is >= 0.
  int ny = 0;
  std::vector<VarMap> vmap(lp.n);
  std::vector<std::pair<int, double>> range_rows;  // (y index, width)
  for (int j = 0; j < lp.n; ++j) {
    const double l = lp.lo[j], h = lp.hi[j];
    if (l > h) {
      sol.status = LpStatus::Infeasible;
      return sol;
    }
    if (l > -inf) {
      vmap[j] = {0, ny, -1, l};
      if (h < inf) range_rows.emplace_back(ny, h - l);
      ++ny;
    } else if (h < inf) {
      vmap[j] = {1, ny, -1, h};
      ++ny;
    } else {
      vmap[j] = {2, ny, ny + 1, 0.0};
      ny += 2;
    }
  }

  struct Row {
    std::vector<double> a;
    double b = 0.0;
    bool eq = false;
  };
  std::vector<Row> rows;
  auto convert = [&](const std::vector<double>& a, double b, bool eq) {
    Row r;
    r.a.assign(ny, 0.0);
    r.b = b;
    r.eq = eq;
    for (int j = 0; j < lp.n; ++j) {
      const double aj = a[j];
      if (aj == 0.0) continue;
      const VarMap& v = vmap[j];
      switch (v.kind) {
        case 0:
          r.a[v.y0] += aj;
          r.b -= aj * v.shift;
          break;
        case 1:
          r.a[v.y0] -= aj;
          r.b -= aj * v.shift;
          break;
        default:
          r.a[v.y0] += aj;
          r.a[v.y1] -= aj;
      }
    }
    rows.push_back(std::move(r));
  };
  for (std::size_t k = 0; k < lp.a_eq.size(); ++k) convert(lp.a_eq[k], lp.b_eq[k], true);
  for (std::size_t k = 0; k < lp.a_le.size(); ++k) convert(lp.a_le[k], lp.b_le[k], false);
  for (const auto& [yj, width] : range_rows) {
    Row r;
    r.a.assign(ny, 0.0);
    r.a[yj] = 1.0;
    r.b = width;
    rows.push_back(std::move(r));
  }

  const int m = static_cast<int>(rows.size());
  int nslack = 0;
  for (const Row& r : rows)
    if (!r.eq) ++nslack;
  const int art0 = ny + nslack;
  const int ncols = art0 + m;

  SimplexCore core;
  core.m = m;
  core.ncols = ncols;
  core.col.assign(ncols, std::vector<double>(m, 0.0));
  core.rhs.assign(m, 0.0);
  {
    int slack = 0;
    for (int r = 0; r < m; ++r) {
      double sign = rows[r].b < 0.0 ? -1.0 : 1.0;
      for (int y = 0; y < ny; ++y) core.col[y][r] = sign * rows[r].a[y];
      core.rhs[r] = sign * rows[r].b;
      if (!rows[r].eq) core.col[ny + slack++][r] = sign;
      core.col[art0 + r][r] = 1.0;
    }
  }

  // Phase 1: minimize the artificial mass.
  std::vector<double> cost1(ncols, 0.0);
  for (int j = art0; j < ncols; ++j) cost1[j] = 1.0;
  std::vector<char> allowed(ncols, 1);
  core.init_identity_basis(art0);
  core.minimize(cost1, allowed);
  if (core.objective(cost1) > kPhaseOneTol) {
    sol.status = LpStatus::Infeasible;
    return sol;
  }

  // Drive remaining artificials out of the basis; rows that cannot release
  // one are redundant and get dropped.
  std::vector<char> drop_row(m, 0);
  for (int i = 0; i < m; ++i) {
    if (core.basis[i] < art0) continue;
    int enter = -1;
    std::vector<double> d;
    for (int j = 0; j < art0; ++j) {
      if (core.in_basis[j]) continue;
      d = core.ftran(j);
      if (std::abs(d[i]) > 1e-7) {
        enter = j;
        break;
      }
    }
    if (enter >= 0)
      core.pivot(i, enter, d);
    else
      drop_row[i] = 1;
  }
  bool any_drop = false;
  for (int i = 0; i < m; ++i) any_drop = any_drop || drop_row[i];
  if (any_drop) {
    SimplexCore trimmed;
    std::vector<int> keep;
    for (int i = 0; i < m; ++i)
      if (!drop_row[i]) keep.push_back(i);
    trimmed.m = static_cast<int>(keep.size());
    trimmed.ncols = ncols;
    trimmed.col.assign(ncols, std::vector<double>(trimmed.m, 0.0));
    trimmed.rhs.assign(trimmed.m, 0.0);
    for (int j = 0; j < ncols; ++j)
      for (int i = 0; i < trimmed.m; ++i) trimmed.col[j][i] = core.col[j][keep[i]];
    for (int i = 0; i < trimmed.m; ++i) trimmed.rhs[i] = core.rhs[keep[i]];
    trimmed.basis.resize(trimmed.m);
    trimmed.in_basis.assign(ncols, 0);
    for (int i = 0; i < trimmed.m; ++i) {
      trimmed.basis[i] = core.basis[keep[i]];
      trimmed.in_basis[trimmed.basis[i]] = 1;
    }
    trimmed.binv.assign(trimmed.m, std::vector<double>(trimmed.m, 0.0));
    core = std::move(trimmed);
    core.refactor();
  }

  // Phase 2 over the original objective (min of -c).
  std::vector<double> cost2(ncols, 0.0);
  for (int j = 0; j < lp.n; ++j) {
    const VarMap& v = vmap[j];
    switch (v.kind) {
      case 0: cost2[v.y0] -= lp.c[j]; break;
      case 1: cost2[v.y0] += lp.c[j]; break;
      default:
        cost2[v.y0] -= lp.c[j];
        cost2[v.y1] += lp.c[j];
    }
  }
  for (int j = art0; j < ncols; ++j) allowed[j] = 0;
  if (core.minimize(cost2, allowed) == 1) {
    sol.status = LpStatus::Unbounded;
    return sol;
  }

  std::vector<double> yv(ny + nslack + m, 0.0);
  for (int i = 0; i < core.m; ++i)
    if (core.basis[i] < static_cast<int>(yv.size())) yv[core.basis[i]] = std::max(core.xb[i], 0.0);
  sol.point.assign(lp.n, 0.0);
  for (int j = 0; j < lp.n; ++j) {
    const VarMap& v = vmap[j];
    switch (v.kind) {
      case 0: sol.point[j] = v.shift + yv[v.y0]; break;
      case 1: sol.point[j] = v.shift - yv[v.y0]; break;
      default: sol.point[j] = yv[v.y0] - yv[v.y1];
    }
  }
  sol.objective = dot(lp.c, sol.point);
  double res = 0.0;
  for (std::size_t k = 0; k < lp.a_eq.size(); ++k)
    res = std::max(res, std::abs(dot(lp.a_eq[k], sol.point) - lp.b_eq[k]));
  for (std::size_t k = 0; k < lp.a_le.size(); ++k)
    res = std::max(res, dot(lp.a_le[k], sol.point) - lp.b_le[k]);
  for (int j = 0; j < lp.n; ++j) {
    if (lp.lo[j] > -inf) res = std::max(res, lp.lo[j] - sol.point[j]);
    if (lp.hi[j] < inf) res = std::max(res, sol.point[j] - lp.hi[j]);
  }
  sol.max_residual = std::max(res, 0.0);
  sol.status = LpStatus::Optimal;
  return sol;
}

}  // namespace ccg
