#pragma once

#include <cstdint>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ccg/verifier.hpp"

namespace ccg {

struct LinearObjective {
  std::vector<double> coefficients;  // one per joint profile

  void check(const ConstrainedGame& g) const {
    if (static_cast<std::int64_t>(coefficients.size()) != g.num_profiles())
      throw InputError("objective has " + std::to_string(coefficients.size()) +
                       " coefficients, expected " + std::to_string(g.num_profiles()));
    for (double v : coefficients)
      if (!std::isfinite(v)) throw InputError("objective has a non-finite coefficient");
  }
};

struct FixedSafeSetCheck {
  bool ok = true;
  std::string reason;
};

// The safe-deviation set of player i is independent of z exactly when the
// deviating player's expected costs do not move with z: recommendation-
// independent deviations plus own-action-only costs give
//   c_i(phi <> z) = sum_a c_i(a, .) h[a],
// a function of phi alone.
inline FixedSafeSetCheck check_fixed_safe_set(const ConstrainedGame& g,
                                              const std::vector<DeviationPolytope>& polys) {
  if (static_cast<int>(polys.size()) != g.num_players())
    return {false, "expected one deviation polytope per player"};
  for (int i = 0; i < g.num_players(); ++i) {
    if (!polys[i].has_h_representation())
      return {false, "player " + std::to_string(i) + " uses a " + to_string(polys[i].tag) +
                         " deviation set; recommendation-independent (CCE) deviations required"};
    for (int j = 0; j < g.num_constraints(); ++j) {
      MarginalityWitness w;
      if (!own_action_costs(g, i, j, nullptr, &w)) return {false, w.describe()};
    }
  }
  return {true, ""};
}

struct SolveReport {
  CorrelatedStrategy z;
  double objective = 0.0;
  int iterations = 0;
  std::vector<int> cuts_per_player;
  double max_gap = 0.0;
  double max_cost_residual = 0.0;
  std::vector<double> objective_trace;  // master optimum per iteration
};

struct SolveOptions {
  double cut_tol = 1e-9;
  int max_iterations = 100000;
  VerifyOptions verify;
};

// Maximizes a linear function over the constrained Phi-equilibria in the
// fixed-safe-set case. The master LP keeps z safe and accumulates one
// incentive cut u_i(z) >= u_i(phi* <> z) per violating deviation; each phi*
// comes from the best-safe-deviation oracle, and because the safe set does
// not depend on z every cut is valid for all equilibria. Terminates when no
// player can improve by more than cut_tol.
inline SolveReport solve_special(const ConstrainedGame& g,
                                 const std::vector<DeviationPolytope>& polys,
                                 const LinearObjective& objective, SolveOptions opt = {}) {
  objective.check(g);
  FixedSafeSetCheck pre = check_fixed_safe_set(g, polys);
  if (!pre.ok)
    throw SolveError("solve_special requires a fixed safe-deviation set (" + pre.reason +
                     "); use the learning dynamics or the per-strategy oracle instead");

  const std::int64_t P = g.num_profiles();
  const int n = g.num_players();
  LinearProgram master(static_cast<int>(P));
  master.maximize(objective.coefficients);
  master.add_eq(std::vector<double>(P, 1.0), 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < g.num_constraints(); ++j) master.add_le(g.costs[i][j], 0.0);

  SolveReport rep;
  rep.cuts_per_player.assign(n, 0);
  std::unordered_set<std::string> seen_cuts;
  auto cut_key = [](int player, const Matrix& phi) {
    std::string key = std::to_string(player) + ":";
    key.reserve(key.size() + phi.data.size() * sizeof(std::int64_t));
    for (double v : phi.data) {
      const auto q = static_cast<std::int64_t>(std::llround(v * 1e12));
      key.append(reinterpret_cast<const char*>(&q), sizeof q);
    }
    return key;
  };

  while (rep.iterations < opt.max_iterations) {
    ++rep.iterations;
    LpSolution sol = lp_solve(master);
    if (sol.status == LpStatus::Infeasible)
      throw SolveError("solve_special: master LP infeasible; Assumption 2 violated");
    if (sol.status != LpStatus::Optimal)
      throw SolveError("solve_special: master LP status " + to_string(sol.status));
    CorrelatedStrategy z = CorrelatedStrategy::ingest(sol.point, 1e-7, 1e-6);
    rep.objective = sol.objective;
    rep.objective_trace.push_back(sol.objective);

    double max_gap = 0.0;
    int cuts_added = 0;
    for (int i = 0; i < n; ++i) {
      OracleResult r = best_safe_deviation(g, polys[i], z, i);
      max_gap = std::max(max_gap, r.gap);
      if (r.gap > opt.cut_tol) {
        std::string key = cut_key(i, r.witness.phi);
        if (seen_cuts.insert(std::move(key)).second) {
          std::vector<double> pushed = pushed_payoff(g, r.witness, g.utilities[i]);
          for (std::int64_t p = 0; p < P; ++p) pushed[p] -= g.utilities[i][p];
          master.add_le(std::move(pushed), 0.0);
          ++rep.cuts_per_player[i];
          ++cuts_added;
        }
      }
    }
    rep.z = std::move(z);
    rep.max_gap = max_gap;
    if (max_gap <= opt.cut_tol || cuts_added == 0) break;
  }
  if (rep.max_gap > opt.cut_tol && rep.iterations >= opt.max_iterations)
    throw SolveError("solve_special: iteration cap " + std::to_string(opt.max_iterations) +
                     " reached with residual gap " + fmt(rep.max_gap));
  rep.max_cost_residual = is_safe(g, rep.z, opt.verify.feas_tol).max_residual;
  return rep;
}

}  // namespace ccg
