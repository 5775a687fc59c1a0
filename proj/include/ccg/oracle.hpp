#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ccg/lp.hpp"
#include "ccg/numeric.hpp"
#include "ccg/polytope.hpp"

namespace ccg {

struct OracleResult {
  int player = 0;
  double best_value = 0.0;             // max utility over safe deviations
  double gap = 0.0;                    // best_value - u_i(z)
  Deviation witness;
  std::vector<double> safety_residuals;  // expected costs of witness <> z
};

namespace detail {

inline LinearProgram deviation_lp_base(const DeviationPolytope& poly, int extra_vars = 0) {
  const int s = poly.side;
  LinearProgram lp(s * s + extra_vars);
  for (int b = 0; b < s; ++b) {
    std::vector<double> row(lp.n, 0.0);
    for (int a = 0; a < s; ++a) row[b * s + a] = 1.0;
    lp.add_eq(std::move(row), 1.0);
  }
  for (const auto& r : poly.rows) {
    std::vector<double> row(lp.n, 0.0);
    for (int k = 0; k < s * s; ++k) row[k] = r.coeff.data[k];
    lp.add_le(std::move(row), r.bound);
  }
  return lp;
}

inline Deviation deviation_from_point(int owner, int s, const std::vector<double>& x) {
  Matrix phi(s, s, 0.0);
  for (int b = 0; b < s; ++b) {
    double sum = 0.0;
    for (int a = 0; a < s; ++a) {
      double v = x[b * s + a];
      if (v < 0.0 && v > -1e-9) v = 0.0;
      phi(b, a) = v;
      sum += v;
    }
    if (sum > 0.0)
      for (int a = 0; a < s; ++a) phi(b, a) /= sum;
  }
  return Deviation{owner, std::move(phi)};
}

}  // namespace detail

// Best safe deviation of player i at z:
//   max_{phi in poly}  u_i(phi <> z)
//   s.t.               c_{i,j}(phi <> z) <= cost_ub  for every j.
// Both the objective and the safety constraints are linear in phi for fixed
// z, so this is a single LP.
inline OracleResult best_safe_deviation(const ConstrainedGame& g, const DeviationPolytope& poly,
                                        const CorrelatedStrategy& z, int i, double cost_ub = 0.0) {
  g.check_player(i);
  if (poly.owner != i) throw InputError("polytope owner does not match player");
  if (poly.side != g.actions[i]) throw InputError("polytope side does not match action count");
  const int s = g.actions[i];
  const int m = g.num_constraints();

  LinearProgram lp = detail::deviation_lp_base(poly);
  Matrix util_grad = utility_gradient(g, z, i);
  std::vector<Matrix> cost_grads;
  cost_grads.reserve(m);
  for (int j = 0; j < m; ++j) {
    cost_grads.push_back(cost_gradient(g, z, i, j));
    std::vector<double> row(lp.n, 0.0);
    for (int k = 0; k < s * s; ++k) row[k] = cost_grads.back().data[k];
    lp.add_le(std::move(row), cost_ub);
  }
  std::vector<double> obj(lp.n, 0.0);
  for (int k = 0; k < s * s; ++k) obj[k] = util_grad.data[k];
  lp.maximize(std::move(obj));

  LpSolution sol = lp_solve(lp);
  if (sol.status == LpStatus::Infeasible)
    throw SolveError("best_safe_deviation: no safe deviation for player " + std::to_string(i) +
                     "; Assumption 2 violated at z");
  if (sol.status != LpStatus::Optimal)
    throw SolveError("best_safe_deviation: unexpected LP status " + to_string(sol.status));

  OracleResult res;
  res.player = i;
  res.best_value = sol.objective;
  res.witness = detail::deviation_from_point(i, s, sol.point);
  res.gap = res.best_value - expected_utility(g, z, i);
  res.safety_residuals.resize(m);
  for (int j = 0; j < m; ++j)
    res.safety_residuals[j] = frobenius_dot(cost_grads[j], res.witness.phi);
  return res;
}

struct FeasibilityCertificate {
  int player = 0;
  double rho_hat = 0.0;  // strict-feasibility margin; > 0 certifies slack
  Deviation witness;
};

// rho_hat = -min_{phi in poly} max_j c_{i,j}(phi <> z), via an auxiliary
// margin variable. A positive value certifies a strictly safe deviation at z.
inline FeasibilityCertificate strict_feasibility(const ConstrainedGame& g,
                                                 const DeviationPolytope& poly,
                                                 const CorrelatedStrategy& z, int i) {
  g.check_player(i);
  if (poly.owner != i) throw InputError("polytope owner does not match player");
  const int s = g.actions[i];
  const int m = g.num_constraints();
  if (m == 0) return {i, 0.0, Deviation::identity(i, s)};
  LinearProgram lp = detail::deviation_lp_base(poly, 1);
  const int t_var = s * s;
  lp.set_free(t_var);
  for (int j = 0; j < m; ++j) {
    Matrix k = cost_gradient(g, z, i, j);
    std::vector<double> row(lp.n, 0.0);
    for (int q = 0; q < s * s; ++q) row[q] = k.data[q];
    row[t_var] = -1.0;
    lp.add_le(std::move(row), 0.0);
  }
  std::vector<double> obj(lp.n, 0.0);
  obj[t_var] = -1.0;  // maximize -t == minimize the worst cost
  lp.maximize(std::move(obj));
  LpSolution sol = lp_solve(lp);
  if (sol.status != LpStatus::Optimal)
    throw SolveError("strict_feasibility: LP status " + to_string(sol.status));
  FeasibilityCertificate cert;
  cert.player = i;
  cert.rho_hat = m == 0 ? 0.0 : sol.objective;
  cert.witness = detail::deviation_from_point(i, s, sol.point);
  return cert;
}

}  // namespace ccg
