#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "ccg/lp.hpp"
#include "ccg/polytope.hpp"

namespace ccg {

// Euclidean projection onto the probability simplex (sort-and-threshold).
inline std::vector<double> project_to_simplex(std::vector<double> v) {
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cum += u[i];
    const double t = (cum - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) theta = t;
  }
  for (double& x : v) x = std::max(0.0, x - theta);
  return v;
}

// Minimum-norm least-squares solution of A x ~ b via one-sided Jacobi SVD.
// Singular values below rel_tol * sigma_max are treated as zero.
inline std::vector<double> svd_min_norm_solve(Matrix a, const std::vector<double>& b,
                                              double rel_tol = 1e-12) {
  const int r = a.rows, c = a.cols;
  Matrix v = Matrix::identity(c);
  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < c - 1; ++p) {
      for (int q = p + 1; q < c; ++q) {
        double app = 0.0, aqq = 0.0, apq = 0.0;
        for (int i = 0; i < r; ++i) {
          app += a(i, p) * a(i, p);
          aqq += a(i, q) * a(i, q);
          apq += a(i, p) * a(i, q);
        }
        const double denom = std::sqrt(app * aqq) + 1e-300;
        off = std::max(off, std::abs(apq) / denom);
        if (std::abs(apq) <= 1e-15 * denom) continue;
        const double zeta = (aqq - app) / (2.0 * apq);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double cs = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = cs * t;
        for (int i = 0; i < r; ++i) {
          const double ap = a(i, p), aq = a(i, q);
          a(i, p) = cs * ap - sn * aq;
          a(i, q) = sn * ap + cs * aq;
        }
        for (int i = 0; i < c; ++i) {
          const double vp = v(i, p), vq = v(i, q);
          v(i, p) = cs * vp - sn * vq;
          v(i, q) = sn * vp + cs * vq;
        }
      }
    }
    if (off < 1e-14) break;
  }
  std::vector<double> sigma(c, 0.0);
  double sigma_max = 0.0;
  for (int j = 0; j < c; ++j) {
    double s = 0.0;
    for (int i = 0; i < r; ++i) s += a(i, j) * a(i, j);
    sigma[j] = std::sqrt(s);
    sigma_max = std::max(sigma_max, sigma[j]);
  }
  std::vector<double> x(c, 0.0);
  for (int j = 0; j < c; ++j) {
    if (sigma[j] <= rel_tol * sigma_max) continue;
    double ub = 0.0;  // (u_j . b), u_j = a_j / sigma_j
    for (int i = 0; i < r; ++i) ub += a(i, j) * b[i];
    ub /= sigma[j] * sigma[j];
    for (int i = 0; i < c; ++i) x[i] += v(i, j) * ub;
  }
  return x;
}

// Stationary distribution x of a row-stochastic matrix: x[a] = sum_b phi[b,a] x[b],
// sum x = 1, solved as a least-squares system. Among multiple stationary
// distributions (reducible chains) the minimum-norm nonnegative one is
// returned, so the identity matrix maps to the uniform distribution.
inline std::vector<double> stationary(const Matrix& phi, double row_tol = defaults::kFeasibilityTol) {
  if (phi.rows != phi.cols) throw InputError("stationary: matrix must be square");
  const int s = phi.rows;
  for (int b = 0; b < s; ++b) {
    double sum = 0.0;
    for (int a = 0; a < s; ++a) {
      if (phi(b, a) < -row_tol) throw InputError("stationary: negative entry");
      sum += phi(b, a);
    }
    if (std::abs(sum - 1.0) > row_tol) throw InputError("stationary: row " + std::to_string(b) +
                                                        " sums to " + fmt(sum));
  }
  Matrix a(s + 1, s, 0.0);
  std::vector<double> b(s + 1, 0.0);
  for (int row = 0; row < s; ++row)
    for (int col = 0; col < s; ++col) a(row, col) = phi(col, row) - (row == col ? 1.0 : 0.0);
  for (int col = 0; col < s; ++col) a(s, col) = 1.0;
  b[s] = 1.0;
  std::vector<double> x = svd_min_norm_solve(std::move(a), b);
  double sum = 0.0;
  for (double& xi : x) {
    if (xi < 0.0) xi = 0.0;
    sum += xi;
  }
  if (sum <= 0.0) throw SolveError("stationary: degenerate solve");
  for (double& xi : x) xi /= sum;
  return x;
}

inline std::vector<double> stationary(const Deviation& dev) { return stationary(dev.phi); }

struct ProjectionOptions {
  double membership_tol = 1e-6;
  int max_iterations = 0;  // 0 -> scaled with the constraint count
};

namespace detail {

// Exact Euclidean projection of `target` onto { x : E x = e, A x <= b } by a
// primal active-set method (the Hessian is the identity, so every subproblem
// is a small linear solve). `x` must be feasible; constraint indices break
// ties, which keeps the iteration deterministic.
inline std::vector<double> active_set_projection(
    const std::vector<double>& target,
    const std::vector<std::pair<std::vector<double>, double>>& eqs,
    const std::vector<std::pair<std::vector<double>, double>>& ineqs, std::vector<double> x,
    int max_iterations = 0) {
  const int dim = static_cast<int>(target.size());
  const int ne = static_cast<int>(eqs.size());
  std::vector<int> active;
  std::vector<char> is_active(ineqs.size(), 0);
  if (max_iterations <= 0) max_iterations = 100 * (dim + static_cast<int>(ineqs.size()) + 1);

  for (int iter = 0; iter < max_iterations; ++iter) {
    // x_hat = target - G^T lambda with G G^T lambda = G target - g, where G
    // stacks the equalities and the active inequalities.
    const int rows = ne + static_cast<int>(active.size());
    auto grad = [&](int r) -> const std::vector<double>& {
      return r < ne ? eqs[r].first : ineqs[active[r - ne]].first;
    };
    auto bound = [&](int r) { return r < ne ? eqs[r].second : ineqs[active[r - ne]].second; };
    std::vector<double> lambda(rows, 0.0);
    bool singular = false;
    if (rows > 0) {
      std::vector<std::vector<double>> m(rows, std::vector<double>(rows + 1, 0.0));
      for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < rows; ++j) m[i][j] = dot(grad(i), grad(j));
        m[i][rows] = dot(grad(i), target) - bound(i);
      }
      for (int k = 0; k < rows && !singular; ++k) {
        int piv = k;
        for (int r = k + 1; r < rows; ++r)
          if (std::abs(m[r][k]) > std::abs(m[piv][k])) piv = r;
        if (std::abs(m[piv][k]) < 1e-12) {
          singular = true;
          break;
        }
        std::swap(m[k], m[piv]);
        for (int r = 0; r < rows; ++r) {
          if (r == k) continue;
          const double f = m[r][k] / m[k][k];
          if (f == 0.0) continue;
          for (int c = k; c <= rows; ++c) m[r][c] -= f * m[k][c];
        }
      }
      if (!singular)
        for (int k = 0; k < rows; ++k) lambda[k] = m[k][rows] / m[k][k];
    }
    if (singular) {
      // the most recent addition made the active set dependent; retire it
      is_active[active.back()] = 0;
      active.pop_back();
      continue;
    }
    std::vector<double> x_hat = target;
    for (int r = 0; r < rows; ++r) {
      const std::vector<double>& gr = grad(r);
      for (int k = 0; k < dim; ++k) x_hat[k] -= lambda[r] * gr[k];
    }

    if (max_abs_diff(x_hat, x) <= 1e-12) {
      // stationary on the current face: optimal unless some active
      // inequality holds a negative multiplier
      int drop = -1;
      double most = -1e-10;
      for (std::size_t k = 0; k < active.size(); ++k) {
        if (lambda[ne + k] < most) {
          most = lambda[ne + k];
          drop = static_cast<int>(k);
        }
      }
      if (drop < 0) return x_hat;
      is_active[active[drop]] = 0;
      active.erase(active.begin() + drop);
      continue;
    }

    // step toward x_hat until an inactive inequality blocks
    double alpha = 1.0;
    int block = -1;
    for (std::size_t j = 0; j < ineqs.size(); ++j) {
      if (is_active[j]) continue;
      const double along = dot(ineqs[j].first, x_hat) - dot(ineqs[j].first, x);
      if (along <= 1e-13) continue;
      const double room = ineqs[j].second - dot(ineqs[j].first, x);
      const double a = std::max(room, 0.0) / along;
      if (a < alpha - 1e-15 ||
          (a <= alpha + 1e-15 && block >= 0 && static_cast<int>(j) < block)) {
        alpha = std::min(a, 1.0);
        block = static_cast<int>(j);
      }
    }
    for (int k = 0; k < dim; ++k) x[k] += alpha * (x_hat[k] - x[k]);
    if (block >= 0 && alpha < 1.0 - 1e-15) {
      active.push_back(block);
      is_active[block] = 1;
    }
  }
  return x;  // iteration cap: feasible, caller re-checks membership
}

// A feasible point of { x : E x = e, A x <= b, lo <= x } found by phase one
// of the LP machinery.
inline std::vector<double> feasible_point(
    int dim, const std::vector<std::pair<std::vector<double>, double>>& eqs,
    const std::vector<std::pair<std::vector<double>, double>>& ineqs) {
  LinearProgram lp(dim);
  for (const auto& [a, b] : eqs) lp.add_eq(a, b);
  for (const auto& [a, b] : ineqs) lp.add_le(a, b);
  for (int j = 0; j < dim; ++j) lp.set_free(j);  // nonnegativity arrives via ineqs
  LpSolution sol = lp_solve(lp);
  if (sol.status != LpStatus::Optimal)
    throw SolveError("projection: the polytope is empty");
  return sol.point;
}

}  // namespace detail

// Euclidean projection of an arbitrary matrix onto a deviation polytope.
// Polytopes without rows decompose into per-row simplex projections, and
// CCE-style polytopes reduce to the common-row space (projecting onto the
// replicated subspace first is exact because the set lives inside it); the
// leftover constrained cases run the active-set solver.
inline Deviation project_onto(const DeviationPolytope& poly, const Matrix& point,
                              ProjectionOptions opt = {}) {
  if (point.rows != poly.side || point.cols != poly.side)
    throw InputError("projection point must be " + std::to_string(poly.side) + "x" +
                     std::to_string(poly.side));
  const int s = poly.side;
  Matrix out(s, s, 0.0);

  if (poly.has_h_representation()) {
    std::vector<double> h(s, 0.0);
    for (int a = 0; a < s; ++a) {
      for (int b = 0; b < s; ++b) h[a] += point(b, a);
      h[a] /= static_cast<double>(s);
    }
    const auto rows = poly.h_rows();
    std::vector<double> proj = project_to_simplex(h);
    bool inside = true;
    for (const auto& [q, d] : rows) inside = inside && dot(q, proj) <= d;
    if (!rows.empty() && !inside) {
      std::vector<std::pair<std::vector<double>, double>> eqs{
          {std::vector<double>(s, 1.0), 1.0}};
      std::vector<std::pair<std::vector<double>, double>> ineqs;
      for (int a = 0; a < s; ++a) {
        std::vector<double> row(s, 0.0);
        row[a] = -1.0;
        ineqs.emplace_back(std::move(row), 0.0);
      }
      for (const auto& r : rows) ineqs.push_back(r);
      std::vector<double> start = detail::feasible_point(s, eqs, ineqs);
      proj = detail::active_set_projection(h, eqs, ineqs, std::move(start),
                                           opt.max_iterations);
    }
    for (int b = 0; b < s; ++b)
      for (int a = 0; a < s; ++a) out(b, a) = proj[a];
  } else if (poly.rows.empty()) {
    for (int b = 0; b < s; ++b) {
      std::vector<double> row(s);
      for (int a = 0; a < s; ++a) row[a] = point(b, a);
      row = project_to_simplex(std::move(row));
      for (int a = 0; a < s; ++a) out(b, a) = row[a];
    }
  } else {
    const int dim = s * s;
    std::vector<std::pair<std::vector<double>, double>> eqs, ineqs;
    for (int b = 0; b < s; ++b) {
      std::vector<double> row(dim, 0.0);
      for (int a = 0; a < s; ++a) row[b * s + a] = 1.0;
      eqs.emplace_back(std::move(row), 1.0);
    }
    for (int k = 0; k < dim; ++k) {
      std::vector<double> row(dim, 0.0);
      row[k] = -1.0;
      ineqs.emplace_back(std::move(row), 0.0);
    }
    for (const auto& r : poly.rows) ineqs.emplace_back(r.coeff.data, r.bound);
    std::vector<double> start = detail::feasible_point(dim, eqs, ineqs);
    std::vector<double> proj =
        detail::active_set_projection(point.data, eqs, ineqs, std::move(start),
                                      opt.max_iterations);
    for (int k = 0; k < dim; ++k) out.data[k] = proj[k];
  }

  Deviation dev{poly.owner, std::move(out)};
  if (!poly.contains(dev, opt.membership_tol))
    throw SolveError("project_onto: no feasible point found (empty polytope?)");
  return dev;
}

// Vertices of { h : sum h = 1, h >= 0, q_r . h <= d_r }, by enumerating
// active-constraint subsets; intended for small dimensions.
inline std::vector<std::vector<double>> enumerate_simplex_polytope_vertices(
    int dim, const std::vector<std::pair<std::vector<double>, double>>& rows,
    double tol = defaults::kFeasibilityTol) {
  if (dim == 0) return {};
  if (dim == 1) {
    std::vector<double> h{1.0};
    for (const auto& [q, d] : rows)
      if (q[0] > d + tol) return {};
    return {h};
  }
  const int ncand = dim + static_cast<int>(rows.size());
  const int need = dim - 1;
  // candidate c < dim: h_c = 0; candidate c >= dim: rows[c - dim] tight.
  std::vector<int> pick(need);
  for (int i = 0; i < need; ++i) pick[i] = i;
  std::vector<std::vector<double>> verts;
  double combos = 1.0;
  for (int i = 0; i < need; ++i) combos *= static_cast<double>(ncand - i) / (i + 1);
  if (combos > 2e5) throw SolveError("vertex enumeration too large for dimension " +
                                     std::to_string(dim));
  auto solve_active = [&](const std::vector<int>& active) {
    std::vector<std::vector<double>> m(dim, std::vector<double>(dim + 1, 0.0));
    for (int c = 0; c < dim; ++c) m[0][c] = 1.0;
    m[0][dim] = 1.0;
    for (int k = 0; k < need; ++k) {
      const int cand = active[k];
      if (cand < dim) {
        m[k + 1][cand] = 1.0;
      } else {
        const auto& [q, d] = rows[cand - dim];
        for (int c = 0; c < dim; ++c) m[k + 1][c] = q[c];
        m[k + 1][dim] = d;
      }
    }
    for (int k = 0; k < dim; ++k) {
      int piv = k;
      for (int r = k + 1; r < dim; ++r)
        if (std::abs(m[r][k]) > std::abs(m[piv][k])) piv = r;
      if (std::abs(m[piv][k]) < 1e-11) return std::vector<double>();
      std::swap(m[k], m[piv]);
      for (int r = 0; r < dim; ++r) {
        if (r == k) continue;
        const double f = m[r][k] / m[k][k];
        if (f == 0.0) continue;
        for (int c = k; c <= dim; ++c) m[r][c] -= f * m[k][c];
      }
    }
    std::vector<double> h(dim);
    for (int k = 0; k < dim; ++k) h[k] = m[k][dim] / m[k][k];
    return h;
  };
  while (true) {
    std::vector<double> h = solve_active(pick);
    if (!h.empty()) {
      bool feasible = true;
      for (int c = 0; c < dim && feasible; ++c) feasible = h[c] >= -tol;
      for (const auto& [q, d] : rows) {
        if (!feasible) break;
        feasible = dot(q, h) <= d + tol;
      }
      if (feasible) {
        bool dup = false;
        for (const auto& w : verts)
          if (max_abs_diff(w, h) <= 1e-8) {
            dup = true;
            break;
          }
        if (!dup) verts.push_back(std::move(h));
      }
    }
    // next combination
    int i = need - 1;
    while (i >= 0 && pick[i] == ncand - need + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int k = i + 1; k < need; ++k) pick[k] = pick[k - 1] + 1;
  }
  return verts;
}

}  // namespace ccg
