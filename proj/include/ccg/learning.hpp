#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ccg/solver.hpp"

namespace ccg {

struct CheckpointRow {
  std::int64_t t = 0;
  int player = 0;
  double regret = 0.0;             // best fixed safe deviation in hindsight - realized
  double gap_bound = 0.0;          // regret / t
  double max_cost_residual = 0.0;  // worst expected cost of the running average
  double utility_avg = 0.0;        // utility of the running average
};

struct LearningTrace {
  std::int64_t rounds = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::vector<double>>> x;     // [t][player][action]
  std::vector<std::vector<double>> z;                  // [t][profile]
  std::vector<std::vector<double>> utility;            // [t][player]
  std::vector<std::vector<std::vector<double>>> cost;  // [t][player][constraint]
  std::vector<std::vector<Matrix>> phi;                // [t][player]
  std::vector<double> zbar;                            // running average after T rounds
  std::vector<Matrix> grad_sum;                        // [player] cumulative utility gradient
  std::vector<double> realized_utility_sum;            // [player]
  std::vector<CheckpointRow> checkpoints;
  std::vector<double> final_regret;                    // [player]
};

namespace detail {

inline double hindsight_best(const DeviationPolytope& poly, const Matrix& grad_sum) {
  LinearProgram lp = deviation_lp_base(poly);
  std::vector<double> obj(lp.n, 0.0);
  for (std::size_t k = 0; k < grad_sum.data.size(); ++k) obj[k] = grad_sum.data[k];
  lp.maximize(std::move(obj));
  LpSolution sol = lp_solve(lp);
  if (sol.status != LpStatus::Optimal)
    throw SolveError("hindsight LP status " + to_string(sol.status));
  return sol.objective;
}

}  // namespace detail

// Regret of player i against the best fixed deviation from `poly` in
// hindsight, evaluated on a completed trace.
inline double phi_regret(const LearningTrace& trace, const ConstrainedGame& g,
                         const DeviationPolytope& poly, int i) {
  g.check_player(i);
  return detail::hindsight_best(poly, trace.grad_sum[i]) - trace.realized_utility_sum[i];
}

// Decentralized no-regret dynamics for the fixed-safe-set case. Per round:
// each player's projected-gradient minimizer holds a safe recommendation-
// independent deviation phi_{i,t}; the player plays its stationary
// distribution x_{i,t} (so phi_{i,t} <> z_t = z_t), the joint play is the
// product z_t, and the minimizer ascends the linear reward
// phi -> u_i(phi <> z_t). Every per-round cost equals the deviation's own
// marginal cost, hence stays nonpositive, and so does every running average.
inline LearningTrace run_dynamics(const ConstrainedGame& g,
                                  const std::vector<DeviationPolytope>& polys, std::int64_t rounds,
                                  std::uint64_t seed) {
  if (rounds < 1) throw InputError("run_dynamics needs at least one round");
  FixedSafeSetCheck pre = check_fixed_safe_set(g, polys);
  if (!pre.ok) throw SolveError("run_dynamics requires a fixed safe-deviation set (" + pre.reason + ")");
  const int n = g.num_players();
  const int m = g.num_constraints();
  const std::int64_t P = g.num_profiles();

  // Safe-deviation polytopes: the given deviation sets plus each player's
  // own marginal cost rows.
  std::vector<DeviationPolytope> safe(polys);
  std::vector<std::vector<std::vector<double>>> marginal(n);
  for (int i = 0; i < n; ++i) {
    marginal[i].resize(m);
    for (int j = 0; j < m; ++j) {
      MarginalityWitness w;
      if (!own_action_costs(g, i, j, &marginal[i][j], &w)) throw SolveError(w.describe());
      safe[i].add_marginal_row(marginal[i][j], 0.0);
    }
  }

  // Strictly feasible interior rows h° (used to repair projection round-off
  // so per-round costs are nonpositive exactly, not just within tolerance).
  std::vector<std::vector<double>> interior(n);
  std::vector<double> interior_margin(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const int s = g.actions[i];
    if (safe[i].h_rows().empty()) {
      interior[i].assign(s, 1.0 / static_cast<double>(s));
      interior_margin[i] = 1.0;  // nothing to repair, any row works
      continue;
    }
    LinearProgram lp(s + 1);
    lp.set_free(s);
    std::vector<double> ones(s + 1, 1.0);
    ones[s] = 0.0;
    lp.add_eq(std::move(ones), 1.0);
    auto h_extra = safe[i].h_rows();
    for (const auto& [q, d] : h_extra) {
      std::vector<double> row(s + 1, 0.0);
      for (int a = 0; a < s; ++a) row[a] = q[a];
      row[s] = -1.0;
      lp.add_le(std::move(row), d);
    }
    std::vector<double> obj(s + 1, 0.0);
    obj[s] = -1.0;
    lp.maximize(std::move(obj));
    LpSolution sol = lp_solve(lp);
    if (sol.status != LpStatus::Optimal || sol.objective < -1e-9)
      throw SolveError("run_dynamics: empty safe deviation set for player " + std::to_string(i));
    interior[i].assign(sol.point.begin(), sol.point.begin() + s);
    interior[i] = project_to_simplex(std::move(interior[i]));
    interior_margin[i] = sol.objective;
  }

  auto snap = [&](int i, Deviation dev) {
    const int s = g.actions[i];
    std::vector<double> h(s, 0.0);
    for (int a = 0; a < s; ++a) {
      for (int b = 0; b < s; ++b) h[a] += dev.phi(b, a);
      h[a] /= static_cast<double>(s);
    }
    h = project_to_simplex(std::move(h));
    double worst = 0.0;
    for (int j = 0; j < m; ++j) worst = std::max(worst, dot(marginal[i][j], h));
    if (worst > 0.0 && interior_margin[i] > 1e-12) {
      const double theta = std::min(1.0, worst / (worst + interior_margin[i]));
      for (int a = 0; a < s; ++a) h[a] = (1.0 - theta) * h[a] + theta * interior[i][a];
    }
    for (int b = 0; b < s; ++b)
      for (int a = 0; a < s; ++a) dev.phi(b, a) = h[a];
    return dev;
  };

  LearningTrace trace;
  trace.rounds = rounds;
  trace.seed = seed;
  trace.x.resize(rounds);
  trace.z.resize(rounds);
  trace.utility.resize(rounds);
  trace.cost.resize(rounds);
  trace.phi.resize(rounds);
  trace.zbar.assign(P, 0.0);
  trace.realized_utility_sum.assign(n, 0.0);
  trace.grad_sum.reserve(n);
  for (int i = 0; i < n; ++i) trace.grad_sum.emplace_back(g.actions[i], g.actions[i], 0.0);

  std::vector<Deviation> current(n);
  for (int i = 0; i < n; ++i)
    current[i] = snap(i, project_onto(safe[i], Matrix::identity(g.actions[i])));

  for (std::int64_t t = 1; t <= rounds; ++t) {
    const std::int64_t ti = t - 1;
    trace.x[ti].resize(n);
    trace.phi[ti].resize(n);
    for (int i = 0; i < n; ++i) {
      trace.phi[ti][i] = current[i].phi;
      trace.x[ti][i] = stationary(current[i]);
    }
    std::vector<double> zt(P, 0.0);
    for (std::int64_t p = 0; p < P; ++p) {
      double prob = 1.0;
      for (int i = 0; i < n; ++i) prob *= trace.x[ti][i][g.idx.action_of(p, i)];
      zt[p] = prob;
    }
    CorrelatedStrategy zs;
    zs.z = zt;
    trace.utility[ti].resize(n);
    trace.cost[ti].resize(n);
    for (int i = 0; i < n; ++i) {
      trace.utility[ti][i] = expected_utility(g, zs, i);
      trace.cost[ti][i] = expected_costs(g, zs, i);
      trace.realized_utility_sum[i] += trace.utility[ti][i];
    }
    for (std::int64_t p = 0; p < P; ++p)
      trace.zbar[p] += (zt[p] - trace.zbar[p]) / static_cast<double>(t);
    trace.z[ti] = std::move(zt);

    for (int i = 0; i < n; ++i) {
      Matrix grad = utility_gradient(g, zs, i);
      for (std::size_t k = 0; k < grad.data.size(); ++k) trace.grad_sum[i].data[k] += grad.data[k];
      const double s = static_cast<double>(g.actions[i]);
      const double diameter = std::sqrt(2.0 * s);
      const double grad_bound = std::sqrt(s);
      const double eta = diameter / (grad_bound * std::sqrt(static_cast<double>(t)));
      Matrix step = current[i].phi;
      for (std::size_t k = 0; k < step.data.size(); ++k) step.data[k] += eta * grad.data[k];
      current[i] = snap(i, project_onto(safe[i], step));
    }

    const bool checkpoint = (t & (t - 1)) == 0 || t == rounds;
    if (checkpoint) {
      CorrelatedStrategy zbar;
      zbar.z = trace.zbar;
      for (int i = 0; i < n; ++i) {
        const double regret =
            detail::hindsight_best(safe[i], trace.grad_sum[i]) - trace.realized_utility_sum[i];
        std::vector<double> cbar = expected_costs(g, zbar, i);
        double worst = cbar.empty() ? 0.0 : cbar[0];
        for (double v : cbar) worst = std::max(worst, v);
        trace.checkpoints.push_back({t, i, regret, regret / static_cast<double>(t), worst,
                                     expected_utility(g, zbar, i)});
      }
    }
  }

  trace.final_regret.resize(n);
  for (int i = 0; i < n; ++i)
    trace.final_regret[i] =
        detail::hindsight_best(safe[i], trace.grad_sum[i]) - trace.realized_utility_sum[i];
  return trace;
}

}  // namespace ccg
