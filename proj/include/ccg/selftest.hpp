#pragma once

// Cross-module property checks and the acceptance suite, runnable from the
// CLI (`ccg selftest`) or from the dedicated acceptance binary. Property
// cases draw their randomness from the given seed; acceptance cases pin
// their own instance seeds so the verdicts do not move with --seed.

#include <chrono>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ccg/io.hpp"

namespace ccg::selftest {

struct CheckFailure {
  std::string message;
};

struct Context {
  Rng rng;
  std::chrono::steady_clock::time_point deadline;
  bool budget_limited = false;
  long trials = 0;

  Context(std::uint64_t seed, double budget_seconds)
      : rng(seed),
        deadline(std::chrono::steady_clock::now() +
                 std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                     std::chrono::duration<double>(budget_seconds))) {}

  bool keep_going() {
    if (std::chrono::steady_clock::now() >= deadline) {
      budget_limited = true;
      return false;
    }
    ++trials;
    return true;
  }

  void require(bool cond, const std::string& msg) {
    if (!cond) throw CheckFailure{msg};
  }

  void require_close(double got, double want, double tol, const std::string& what) {
    if (!(std::abs(got - want) <= tol))
      throw CheckFailure{what + ": got " + fmt(got) + ", want " + fmt(want) + " +- " + fmt(tol)};
  }

  void require_le(double got, double bound, const std::string& what) {
    if (!(got <= bound))
      throw CheckFailure{what + ": got " + fmt(got) + ", bound " + fmt(bound)};
  }
};

struct Case {
  std::string name;
  int criterion = 0;  // 1..9 for acceptance criteria, 0 for property cases
  double time_limit = 0.0;  // seconds; 0 -> share of the run budget
  std::function<void(Context&)> fn;
};

struct Outcome {
  std::string name;
  int criterion = 0;
  bool pass = false;
  bool budget_limited = false;
  double seconds = 0.0;
  std::string message;
};

namespace detail {

// ---- independent oracles used only by this suite ----

// Expected payoff of (phi <> z) computed in tuple space, without the
// library's deviation machinery: deviate the payoff tensor profile by
// profile and take the expectation under z.
inline double push_route_payoff(const ConstrainedGame& g, const CorrelatedStrategy& z,
                                const Deviation& dev, const std::vector<double>& payoff) {
  double acc = 0.0;
  for (std::int64_t p = 0; p < g.num_profiles(); ++p) {
    if (z.z[p] == 0.0) continue;
    std::vector<int> tuple = g.idx.actions_of(p);
    const int b = tuple[dev.owner];
    double inner = 0.0;
    for (int a = 0; a < g.actions[dev.owner]; ++a) {
      tuple[dev.owner] = a;
      inner += dev.phi(b, a) * payoff[g.idx.flat(tuple)];
    }
    tuple[dev.owner] = b;
    acc += z.z[p] * inner;
  }
  return acc;
}

// All deterministic deviations (one action per recommendation): s^s matrices.
inline std::vector<Deviation> deterministic_deviations(int owner, int s) {
  std::vector<Deviation> out;
  std::vector<int> pick(s, 0);
  while (true) {
    Matrix phi(s, s, 0.0);
    for (int b = 0; b < s; ++b) phi(b, pick[b]) = 1.0;
    out.push_back({owner, std::move(phi)});
    int k = s - 1;
    while (k >= 0 && pick[k] == s - 1) pick[k--] = 0;
    if (k < 0) break;
    ++pick[k];
  }
  return out;
}

// Vertices of { x in R^d : A_eq x = b_eq, A_in x <= b_in } by active-set
// enumeration; meant for tiny systems.
inline std::vector<std::vector<double>> affine_vertices(
    int dim, const std::vector<std::pair<std::vector<double>, double>>& eqs,
    const std::vector<std::pair<std::vector<double>, double>>& ineqs, double tol = 1e-9) {
  const int need = dim - static_cast<int>(eqs.size());
  std::vector<std::vector<double>> verts;
  if (need < 0) return verts;
  std::vector<int> pick(need);
  for (int i = 0; i < need; ++i) pick[i] = i;
  const int ncand = static_cast<int>(ineqs.size());
  if (need > ncand) return verts;
  auto gauss = [&](std::vector<std::vector<double>> m) {
    for (int k = 0; k < dim; ++k) {
      int piv = k;
      for (int r = k + 1; r < dim; ++r)
        if (std::abs(m[r][k]) > std::abs(m[piv][k])) piv = r;
      if (std::abs(m[piv][k]) < 1e-11) return std::vector<double>();
      std::swap(m[k], m[piv]);
      for (int r = 0; r < dim; ++r) {
        if (r == k) continue;
        const double f = m[r][k] / m[k][k];
        for (int c = k; c <= dim; ++c) m[r][c] -= f * m[k][c];
      }
    }
    std::vector<double> x(dim);
    for (int k = 0; k < dim; ++k) x[k] = m[k][dim] / m[k][k];
    return x;
  };
  while (true) {
    std::vector<std::vector<double>> sys;
    for (const auto& [a, b] : eqs) {
      std::vector<double> row = a;
      row.push_back(b);
      sys.push_back(std::move(row));
    }
    for (int k = 0; k < need; ++k) {
      std::vector<double> row = ineqs[pick[k]].first;
      row.push_back(ineqs[pick[k]].second);
      sys.push_back(std::move(row));
    }
    std::vector<double> x = gauss(std::move(sys));
    if (!x.empty()) {
      bool ok = true;
      for (const auto& [a, b] : ineqs)
        if (dot(a, x) > b + tol) {
          ok = false;
          break;
        }
      if (ok) {
        bool dup = false;
        for (const auto& w : verts)
          if (max_abs_diff(w, x) <= 1e-8) {
            dup = true;
            break;
          }
        if (!dup) verts.push_back(std::move(x));
      }
    }
    if (need == 0) break;
    int i = need - 1;
    while (i >= 0 && pick[i] == ncand - need + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int k = i + 1; k < need; ++k) pick[k] = pick[k - 1] + 1;
  }
  return verts;
}

inline CorrelatedStrategy random_strategy(Rng& rng, std::int64_t profiles) {
  std::vector<double> z(profiles);
  double sum = 0.0;
  for (auto& v : z) {
    v = rng.uniform();
    sum += v;
  }
  for (auto& v : z) v /= sum;
  CorrelatedStrategy s;
  s.z = std::move(z);
  return s;
}

inline Deviation random_stochastic(Rng& rng, int owner, int s) {
  Matrix phi(s, s, 0.0);
  for (int b = 0; b < s; ++b) {
    double sum = 0.0;
    for (int a = 0; a < s; ++a) {
      phi(b, a) = rng.uniform();
      sum += phi(b, a);
    }
    for (int a = 0; a < s; ++a) phi(b, a) /= sum;
  }
  return {owner, std::move(phi)};
}

inline ConstrainedGame random_game(Rng& rng, int n, int s, int m) {
  ProfileIndexer idx = ProfileIndexer::make(std::vector<int>(n, s));
  std::vector<std::vector<double>> utilities(n);
  std::vector<std::vector<std::vector<double>>> costs(n);
  for (int i = 0; i < n; ++i) {
    utilities[i].resize(idx.size);
    for (auto& v : utilities[i]) v = rng.uniform();
    costs[i].assign(m, std::vector<double>(idx.size));
    for (int j = 0; j < m; ++j)
      for (auto& v : costs[i][j]) v = rng.uniform(-1.0, 1.0);
  }
  return ConstrainedGame::make(std::vector<int>(n, s), std::move(utilities), std::move(costs));
}

inline double regression_slope(const std::vector<std::pair<double, double>>& pts) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(pts.size());
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline GraphInstance cycle_graph(int n) {
  GraphInstance g;
  g.num_vertices = n;
  for (int i = 0; i < n; ++i) g.edges.emplace_back(i, (i + 1) % n);
  return g;
}

inline ConstrainedGame gated_single_player() {
  // one player, two actions: a0 pays 1 but costs +1, a1 pays 0 at cost -1;
  // the best safe strategy and the best safe deviation both cap at 1/2.
  return ConstrainedGame::make({2}, {{1.0, 0.0}}, {{{1.0, -1.0}}});
}

}  // namespace detail

inline const std::vector<Case>& all_cases() {
  static const std::vector<Case> cases = [] {
    std::vector<Case> cs;
    auto add = [&cs](std::string name, int criterion, double limit,
                     std::function<void(Context&)> fn) {
      cs.push_back({std::move(name), criterion, limit, std::move(fn)});
    };

    // ---------------- acceptance criteria ----------------

    add("acceptance.example1_reproduction", 1, 1.0, [](Context& ctx) {
      const auto t0 = std::chrono::steady_clock::now();
      ExampleOne ex = example1();
      auto polys = preset_for_game(ex.game, PolytopeTag::All);
      auto r1 = verify(ex.game, polys, ex.z1, 0.0);
      ctx.require(r1.verdict, "z1 must verify");
      ctx.require_le(r1.max_gap, 1e-6, "z1 gap");
      auto r2 = verify(ex.game, polys, ex.z2, 0.0);
      ctx.require(r2.verdict, "z2 must verify");
      ctx.require_le(r2.max_gap, 1e-6, "z2 gap");
      auto r3 = verify(ex.game, polys, ex.z3, 0.0);
      ctx.require(!r3.verdict, "z3 must not verify");
      ctx.require_close(r3.gaps[1], 1.0 / 3.0, 1e-6, "z3 player-1 gap");
      CorrelatedStrategy moved = apply_deviation(ex.game, ex.z3, ex.phi2);
      ctx.require_close(expected_utility(ex.game, moved, 1), 0.5, 1e-9, "u2 after deviation");
      ctx.require_close(expected_costs(ex.game, moved, 1)[0], 0.0, 1e-9, "c2 after deviation");
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      ctx.require_le(secs, 1.0, "runtime (s)");
    });

    add("acceptance.expectation_ic_weakness", 2, 1.0, [](Context& ctx) {
      const auto t0 = std::chrono::steady_clock::now();
      ExampleOne ex = example1();
      auto polys = preset_for_game(ex.game, PolytopeTag::All);
      std::vector<std::pair<double, CorrelatedStrategy>> mu{{0.5, ex.z1}, {0.5, ex.z2}};
      std::vector<double> gaps = expectation_ic(ex.game, polys, mu);
      for (std::size_t i = 0; i < gaps.size(); ++i)
        ctx.require_le(gaps[i], 1e-6, "expected gap of player " + std::to_string(i));
      auto rep = verify(ex.game, polys, ex.z3, 0.0);
      ctx.require(rep.max_gap >= 1.0 / 3.0 - 1e-6, "averaged strategy must keep a 1/3 gap");
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      ctx.require_le(secs, 1.0, "runtime (s)");
    });

    add("acceptance.special_solver_vs_oracle", 3, 180.0, [](Context& ctx) {
      const auto t0 = std::chrono::steady_clock::now();
      for (int k = 0; k < 20; ++k) {
        Rng shape(1000 + k);
        const int s = 2 + shape.index(3);
        const int m = 1 + shape.index(2);
        ConstrainedGame g = random_marginal_instance(2, s, m, 5000 + k);
        auto polys = preset_for_game(g, PolytopeTag::Cce);
        LinearObjective obj;
        obj.coefficients.resize(g.num_profiles());
        for (auto& v : obj.coefficients) v = shape.uniform();
        SolveReport rep = solve_special(g, polys, obj);
        EquilibriumReport check = verify(g, polys, rep.z, 0.0);
        ctx.require_le(check.max_gap, 1e-6, "instance " + std::to_string(k) + " gap");
        ctx.require_le(check.safety.max_residual, 1e-9,
                       "instance " + std::to_string(k) + " safety residual");
        BruteOptions bo;
        bo.grid_k = 200;
        bo.eps = 1e-3;
        bo.node_budget = 50000000;
        bo.threads = 4;
        BruteResult br = brute_oracle(g, polys, obj.coefficients, bo);
        if (br.found)
          ctx.require(rep.objective >= br.best_value - 2e-2,
                      "instance " + std::to_string(k) + ": objective " + fmt(rep.objective) +
                          " vs grid bound " + fmt(br.best_value));
      }
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      ctx.require_le(secs, 180.0, "runtime (s)");
    });

    add("acceptance.learning_convergence", 4, 300.0, [](Context& ctx) {
      const auto t0 = std::chrono::steady_clock::now();
      for (int k = 0; k < 5; ++k) {
        Rng shape(2000 + k);
        const int s = 2 + shape.index(3);
        const int m = 1 + shape.index(2);
        ConstrainedGame g = random_marginal_instance(2, s, m, 6000 + k);
        auto polys = preset_for_game(g, PolytopeTag::Cce);
        LearningTrace tr = run_dynamics(g, polys, 1 << 14, 17);
        std::vector<std::vector<std::pair<double, double>>> loglog(g.num_players());
        for (const auto& row : tr.checkpoints) {
          ctx.require_le(row.max_cost_residual, 1e-9,
                         "instance " + std::to_string(k) + " cost residual at t=" +
                             std::to_string(row.t));
          if (row.t >= 256)
            loglog[row.player].emplace_back(std::log(static_cast<double>(row.t)),
                                            std::log(std::max(row.regret, 1e-9)));
        }
        // checkpoint times are shared across players
        std::vector<std::int64_t> ts;
        for (const auto& row : tr.checkpoints)
          if (row.player == 0) ts.push_back(row.t);
        for (std::int64_t t : ts) {
          std::vector<double> prefix(g.num_profiles(), 0.0);
          for (std::int64_t u = 0; u < t; ++u)
            for (std::int64_t p = 0; p < g.num_profiles(); ++p) prefix[p] += tr.z[u][p];
          for (auto& v : prefix) v /= static_cast<double>(t);
          CorrelatedStrategy zbar;
          zbar.z = std::move(prefix);
          double eps_t = 0.0;
          for (const auto& row : tr.checkpoints)
            if (row.t == t) eps_t = std::max(eps_t, row.gap_bound);
          EquilibriumReport rep = verify(g, polys, zbar, eps_t);
          ctx.require(rep.verdict, "instance " + std::to_string(k) + " equilibrium at t=" +
                                       std::to_string(t) + " (gap " + fmt(rep.max_gap) +
                                       " vs eps " + fmt(eps_t) + ")");
        }
        for (int i = 0; i < g.num_players(); ++i) {
          const double slope = detail::regression_slope(loglog[i]);
          ctx.require_le(slope, 0.6, "instance " + std::to_string(k) + " player " +
                                         std::to_string(i) + " regret slope");
        }
      }
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      ctx.require_le(secs, 300.0, "runtime (s)");
    });

    add("acceptance.fixed_point_fidelity", 5, 120.0, [](Context& ctx) {
      Rng sampler(77);
      int sampled = 0;
      for (int k = 0; k < 4; ++k) {
        Rng shape(3000 + k);
        const int s = 2 + shape.index(3);
        const int m = 1 + shape.index(2);
        ConstrainedGame g = random_marginal_instance(2, s, m, 6500 + k);
        auto polys = preset_for_game(g, PolytopeTag::Cce);
        LearningTrace tr = run_dynamics(g, polys, 1024, 3);
        for (int rep = 0; rep < 25; ++rep) {
          const std::int64_t t = sampler.index(1024);
          CorrelatedStrategy zt;
          zt.z = tr.z[t];
          for (int i = 0; i < g.num_players(); ++i) {
            Deviation dev{i, tr.phi[t][i]};
            CorrelatedStrategy moved = apply_deviation(g, zt, dev);
            ctx.require_le(max_abs_diff(moved.z, zt.z), 1e-9,
                           "fixed point residual at t=" + std::to_string(t));
            std::vector<double> x = stationary(dev);
            for (int a = 0; a < g.actions[i]; ++a) {
              double v = 0.0;
              for (int b = 0; b < g.actions[i]; ++b) v += dev.phi(b, a) * x[b];
              ctx.require_le(std::abs(v - x[a]), 1e-10, "stationarity residual");
            }
          }
          ++sampled;
        }
      }
      ctx.require(sampled == 100, "expected 100 sampled rounds");
    });

    add("acceptance.gadget_completeness", 6, 10.0, [](Context& ctx) {
      const auto t0 = std::chrono::steady_clock::now();
      GraphInstance graph = detail::cycle_graph(8);
      GadgetParams gp = GadgetParams::make(0.5, 1.0 / 3.0, 8);
      ConstrainedGame g = hardness_gadget(graph, gp);
      CorrelatedStrategy z = completeness_strategy(graph, gp, {0, 2, 4, 6});
      auto polys = preset_for_game(g, PolytopeTag::All);
      EquilibriumReport rep = verify(g, polys, z, 0.0);
      ctx.require(rep.verdict, "planted strategy must verify");
      ctx.require_le(rep.max_gap, 1e-6, "planted strategy gap");
      ctx.require_le(rep.safety.max_residual, 1e-9, "planted strategy safety residual");
      const double welfare = expected_utility(g, z, 0) + expected_utility(g, z, 1);
      ctx.require(welfare >= 1.0 - 1e-9, "social welfare " + fmt(welfare) + " must reach 1");
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      ctx.require_le(secs, 10.0, "runtime (s)");
    });

    add("acceptance.fixed_safe_set_convexity", 7, 120.0, [](Context& ctx) {
      Rng mix(404);
      for (int k = 0; k < 100; ++k) {
        Rng shape(4000 + k);
        const int s = 2 + shape.index(3);
        const int m = 1 + shape.index(2);
        ConstrainedGame g = random_marginal_instance(2, s, m, 7000 + k);
        auto polys = preset_for_game(g, PolytopeTag::Cce);
        LinearObjective up, down;
        up.coefficients.resize(g.num_profiles());
        down.coefficients.resize(g.num_profiles());
        for (std::int64_t p = 0; p < g.num_profiles(); ++p) {
          up.coefficients[p] = shape.uniform();
          down.coefficients[p] = -shape.uniform();
        }
        CorrelatedStrategy za = solve_special(g, polys, up).z;
        CorrelatedStrategy zb = solve_special(g, polys, down).z;
        ctx.require(verify(g, polys, za, 1e-3).verdict, "endpoint A verifies");
        ctx.require(verify(g, polys, zb, 1e-3).verdict, "endpoint B verifies");
        const double w = mix.uniform();
        CorrelatedStrategy zm;
        zm.z.resize(g.num_profiles());
        for (std::int64_t p = 0; p < g.num_profiles(); ++p)
          zm.z[p] = w * za.z[p] + (1.0 - w) * zb.z[p];
        EquilibriumReport rep = verify(g, polys, zm, 1e-3);
        ctx.require(rep.verdict, "midpoint " + std::to_string(k) + " must verify (gap " +
                                     fmt(rep.max_gap) + ")");
      }
    });

    add("acceptance.marginal_cost_invariance", 8, 60.0, [](Context& ctx) {
      Rng rng(505);
      for (int k = 0; k < 1000; ++k) {
        const int s = 2 + rng.index(3);
        const int m = 1 + rng.index(2);
        ConstrainedGame g = random_marginal_instance(2, s, m, 90000 + k);
        const int i = rng.index(2);
        std::vector<double> h(s);
        double sum = 0.0;
        for (auto& v : h) {
          v = rng.uniform();
          sum += v;
        }
        for (auto& v : h) v /= sum;
        Matrix phi(s, s, 0.0);
        for (int b = 0; b < s; ++b)
          for (int a = 0; a < s; ++a) phi(b, a) = h[a];
        Deviation dev{i, std::move(phi)};
        CorrelatedStrategy z1 = detail::random_strategy(rng, g.num_profiles());
        CorrelatedStrategy z2 = detail::random_strategy(rng, g.num_profiles());
        std::vector<double> c1 = expected_costs(g, apply_deviation(g, z1, dev), i);
        std::vector<double> c2 = expected_costs(g, apply_deviation(g, z2, dev), i);
        ctx.require_le(max_abs_diff(c1, c2), 1e-12, "cost invariance, trial " + std::to_string(k));
      }
    });

    add("acceptance.existence_smoke", 9, 120.0, [](Context& ctx) {
      for (int k = 0; k < 10; ++k) {
        ConstrainedGame g = random_strictly_safe_instance(2, 2, 1, 400 + k);
        auto polys = preset_for_game(g, PolytopeTag::All);
        for (std::int64_t p = 0; p < 5; ++p) {
          CorrelatedStrategy z =
              p < 4 ? CorrelatedStrategy::point_mass(4, p) : CorrelatedStrategy::uniform(4);
          for (int i = 0; i < 2; ++i)
            ctx.require(strict_feasibility(g, polys[i], z, i).rho_hat >= 0.1,
                        "instance " + std::to_string(k) + " must have margin 0.1");
        }
        bool found = false;
        for (int a = 0; a <= 100 && !found; ++a) {
          for (int b = 0; b <= 100 && !found; ++b) {
            const double xa = a / 100.0, xb = b / 100.0;
            CorrelatedStrategy z;
            z.z = {xa * xb, xa * (1.0 - xb), (1.0 - xa) * xb, (1.0 - xa) * (1.0 - xb)};
            if (!is_safe(g, z, 1e-9).safe) continue;
            if (verify(g, polys, z, 0.02).max_gap <= 0.02) found = true;
          }
        }
        ctx.require(found, "grid search found no near-equilibrium in instance " +
                               std::to_string(k));
      }
    });

    // ---------------- property cases ----------------

    add("game.simplex_preservation_and_linearity", 0, 0.0, [](Context& ctx) {
      for (int t = 0; t < 300 && ctx.keep_going(); ++t) {
        const int n = 2 + ctx.rng.index(2);
        const int s = 2 + ctx.rng.index(3);
        ConstrainedGame g = detail::random_game(ctx.rng, n, s, 1);
        CorrelatedStrategy z = detail::random_strategy(ctx.rng, g.num_profiles());
        const int i = ctx.rng.index(n);
        Deviation phi = detail::random_stochastic(ctx.rng, i, s);
        Deviation psi = detail::random_stochastic(ctx.rng, i, s);
        CorrelatedStrategy out = apply_deviation(g, z, phi);
        double sum = 0.0;
        for (double v : out.z) sum += v;
        ctx.require_close(sum, 1.0, 1e-9, "mass after deviation");
        const double w = ctx.rng.uniform();
        Matrix blended(s, s, 0.0);
        for (int b = 0; b < s; ++b)
          for (int a = 0; a < s; ++a) blended(b, a) = w * phi.phi(b, a) + (1.0 - w) * psi.phi(b, a);
        CorrelatedStrategy lhs = apply_deviation(g, z, Deviation{i, blended});
        CorrelatedStrategy r1 = apply_deviation(g, z, phi);
        CorrelatedStrategy r2 = apply_deviation(g, z, psi);
        for (std::int64_t p = 0; p < g.num_profiles(); ++p)
          ctx.require_le(std::abs(lhs.z[p] - (w * r1.z[p] + (1.0 - w) * r2.z[p])), 1e-12,
                         "linearity in phi");
      }
    });

    add("game.push_route_agreement", 0, 0.0, [](Context& ctx) {
      for (int t = 0; t < 200 && ctx.keep_going(); ++t) {
        const int n = 2 + ctx.rng.index(2);
        const int s = 2 + ctx.rng.index(3);
        ConstrainedGame g = detail::random_game(ctx.rng, n, s, 2);
        CorrelatedStrategy z = detail::random_strategy(ctx.rng, g.num_profiles());
        const int i = ctx.rng.index(n);
        Deviation phi = detail::random_stochastic(ctx.rng, i, s);
        CorrelatedStrategy moved = apply_deviation(g, z, phi);
        ctx.require_le(std::abs(expected_utility(g, moved, i) -
                                detail::push_route_payoff(g, z, phi, g.utilities[i])),
                       1e-12, "utility route agreement");
        for (int j = 0; j < 2; ++j)
          ctx.require_le(std::abs(expected_costs(g, moved, i)[j] -
                                  detail::push_route_payoff(g, z, phi, g.costs[i][j])),
                         1e-12, "cost route agreement");
      }
    });

    add("game.profile_index_roundtrip", 0, 0.0, [](Context& ctx) {
      for (int n = 1; n <= 3; ++n) {
        for (int s = 1; s <= 5; ++s) {
          ProfileIndexer idx = ProfileIndexer::make(std::vector<int>(n, s));
          for (std::int64_t p = 0; p < idx.size; ++p)
            ctx.require(idx.flat(idx.actions_of(p)) == p,
                        "round trip at profile " + std::to_string(p));
        }
      }
      ProfileIndexer mixed = ProfileIndexer::make({2, 3, 4});
      for (std::int64_t p = 0; p < mixed.size; ++p)
        ctx.require(mixed.flat(mixed.actions_of(p)) == p, "round trip, mixed counts");
    });

    add("polytope.convexity_and_nesting", 0, 0.0, [](Context& ctx) {
      for (int t = 0; t < 200 && ctx.keep_going(); ++t) {
        const int s = 2 + ctx.rng.index(3);
        const auto tag = ctx.rng.index(2) == 0 ? PolytopeTag::All : PolytopeTag::Cce;
        DeviationPolytope poly = DeviationPolytope::preset(0, s, tag);
        if (tag == PolytopeTag::Cce && ctx.rng.index(2) == 0) {
          std::vector<double> w(s);
          double wmin = 1.0;
          for (auto& v : w) {
            v = ctx.rng.uniform(-1.0, 1.0);
            wmin = std::min(wmin, v);
          }
          poly.add_marginal_row(w, wmin + 0.2);  // satisfiable with slack
        }
        Deviation a = project_onto(poly, detail::random_stochastic(ctx.rng, 0, s).phi);
        Deviation b = project_onto(poly, detail::random_stochastic(ctx.rng, 0, s).phi);
        const double w = ctx.rng.uniform();
        Matrix mix(s, s, 0.0);
        for (int r = 0; r < s; ++r)
          for (int c = 0; c < s; ++c) mix(r, c) = w * a.phi(r, c) + (1.0 - w) * b.phi(r, c);
        ctx.require(poly.contains({0, mix}, 1e-7), "convex combination stays inside");
        DeviationPolytope all = DeviationPolytope::preset(0, s, PolytopeTag::All);
        DeviationPolytope cce = DeviationPolytope::preset(0, s, PolytopeTag::Cce);
        Deviation member = project_onto(cce, detail::random_stochastic(ctx.rng, 0, s).phi);
        ctx.require(all.contains(member), "CCE member must pass ALL membership");
      }
    });

    add("polytope.tilde_cost_cross_check", 0, 0.0, [](Context& ctx) {
      for (int t = 0; t < 200 && ctx.keep_going(); ++t) {
        const int n = 2;
        const int s = 2 + ctx.rng.index(3);
        const int m = 1 + ctx.rng.index(2);
        ConstrainedGame g = random_marginal_instance(n, s, m, ctx.rng.raw());
        const int i = ctx.rng.index(n);
        std::vector<double> h(s);
        double sum = 0.0;
        for (auto& v : h) {
          v = ctx.rng.uniform();
          sum += v;
        }
        for (auto& v : h) v /= sum;
        Matrix phi(s, s, 0.0);
        for (int b = 0; b < s; ++b)
          for (int a = 0; a < s; ++a) phi(b, a) = h[a];
        Deviation dev{i, std::move(phi)};
        std::vector<double> quick = tilde_cost(g, i, dev);
        CorrelatedStrategy z = detail::random_strategy(ctx.rng, g.num_profiles());
        std::vector<double> slow = expected_costs(g, apply_deviation(g, z, dev), i);
        ctx.require_le(max_abs_diff(quick, slow), 1e-12, "tilde cost agreement");
      }
    });

    add("numeric.lp_against_vertex_enumeration", 0, 0.0, [](Context& ctx) {
      for (int t = 0; t < 150 && ctx.keep_going(); ++t) {
        const int d = 2 + ctx.rng.index(3);
        const int nrows = 1 + ctx.rng.index(3);
        LinearProgram lp(d);
        std::vector<std::pair<std::vector<double>, double>> ineqs;
        std::vector<double> obj(d);
        for (int j = 0; j < d; ++j) {
          obj[j] = ctx.rng.uniform(-1.0, 1.0);
          const double ub = ctx.rng.uniform(0.5, 2.0);
          lp.set_bounds(j, 0.0, ub);
          std::vector<double> lo_row(d, 0.0), hi_row(d, 0.0);
          lo_row[j] = -1.0;
          hi_row[j] = 1.0;
          ineqs.emplace_back(lo_row, 0.0);
          ineqs.emplace_back(hi_row, ub);
        }
        lp.maximize(obj);
        for (int r = 0; r < nrows; ++r) {
          std::vector<double> row(d);
          for (auto& v : row) v = ctx.rng.uniform(-1.0, 1.0);
          const double rhs = ctx.rng.uniform(0.1, 1.0);
          lp.add_le(row, rhs);
          ineqs.emplace_back(row, rhs);
        }
        LpSolution sol = lp_solve(lp);
        ctx.require(sol.status == LpStatus::Optimal, "box LP must be solvable");
        ctx.require_le(sol.max_residual, 1e-8, "LP residual");
        auto verts = detail::affine_vertices(d, {}, ineqs);
        ctx.require(!verts.empty(), "vertex oracle found no vertices");
        double best = -1e18;
        for (const auto& v : verts) best = std::max(best, dot(obj, v));
        ctx.require_close(sol.objective, best, 1e-7, "LP optimum vs vertex enumeration");
      }
    });

    add("numeric.projection_idempotent", 0, 0.0, [](Context& ctx) {
      for (int t = 0; t < 150 && ctx.keep_going(); ++t) {
        const int s = 2 + ctx.rng.index(3);
        const auto tag = ctx.rng.index(2) == 0 ? PolytopeTag::All : PolytopeTag::Cce;
        DeviationPolytope poly = DeviationPolytope::preset(0, s, tag);
        Matrix pt(s, s, 0.0);
        for (auto& v : pt.data) v = ctx.rng.uniform(-1.0, 2.0);
        Deviation once = project_onto(poly, pt);
        ctx.require(poly.contains(once, 1e-8), "projection lands inside");
        Deviation twice = project_onto(poly, once.phi);
        ctx.require_le(max_abs_diff(once.phi.data, twice.phi.data), 1e-8, "idempotence");
      }
    });

    add("numeric.stationary_residual", 0, 0.0, [](Context& ctx) {
      for (int t = 0; t < 1000 && ctx.keep_going(); ++t) {
        const int s = 2 + ctx.rng.index(9);
        Deviation dev = detail::random_stochastic(ctx.rng, 0, s);
        std::vector<double> x = stationary(dev);
        double sum = 0.0;
        for (double v : x) {
          ctx.require(v >= 0.0, "stationary entries nonnegative");
          sum += v;
        }
        ctx.require_close(sum, 1.0, 1e-12, "stationary mass");
        for (int a = 0; a < s; ++a) {
          double v = 0.0;
          for (int b = 0; b < s; ++b) v += dev.phi(b, a) * x[b];
          ctx.require_le(std::abs(v - x[a]), 1e-10, "stationary residual");
        }
      }
    });

    add("oracle.enumeration_agreement", 0, 0.0, [](Context& ctx) {
      for (int t = 0; t < 60 && ctx.keep_going(); ++t) {
        const int s = 2 + ctx.rng.index(2);
        ConstrainedGame g = random_strictly_safe_instance(2, s, 1, ctx.rng.raw());
        auto polys = preset_for_game(g, PolytopeTag::All);
        CorrelatedStrategy z = detail::random_strategy(ctx.rng, g.num_profiles());
        const int i = ctx.rng.index(2);
        OracleResult r = best_safe_deviation(g, polys[i], z, i);
        double best_det = -1e18;
        for (const Deviation& dev : detail::deterministic_deviations(i, s)) {
          CorrelatedStrategy moved = apply_deviation(g, z, dev);
          bool safe = true;
          for (double c : expected_costs(g, moved, i)) safe = safe && c <= 1e-12;
          if (safe) best_det = std::max(best_det, expected_utility(g, moved, i));
        }
        if (best_det > -1e18)
          ctx.require(r.best_value >= best_det - 1e-7,
                      "mixed optimum below best deterministic deviation");
        if (s == 2) {
          // exact cross-check against vertex enumeration of the safe polytope
          std::vector<std::pair<std::vector<double>, double>> eqs, ineqs;
          for (int b = 0; b < 2; ++b) {
            std::vector<double> row(4, 0.0);
            row[b * 2] = row[b * 2 + 1] = 1.0;
            eqs.emplace_back(row, 1.0);
          }
          for (int k4 = 0; k4 < 4; ++k4) {
            std::vector<double> row(4, 0.0);
            row[k4] = -1.0;
            ineqs.emplace_back(row, 0.0);
          }
          Matrix kmat = cost_gradient(g, z, i, 0);
          ineqs.emplace_back(kmat.data, 0.0);
          Matrix grad = utility_gradient(g, z, i);
          double best_vert = -1e18;
          for (const auto& v : detail::affine_vertices(4, eqs, ineqs))
            best_vert = std::max(best_vert, dot(grad.data, v));
          ctx.require_close(r.best_value, best_vert, 1e-7, "oracle vs safe-polytope vertices");
        }
        ctx.require(polys[i].contains(r.witness, 1e-9), "witness inside the deviation set");
        for (double c : r.safety_residuals) ctx.require_le(c, 1e-8, "witness safety residual");
      }
    });

    add("oracle.cost_bound_monotone", 0, 0.0, [](Context& ctx) {
      for (int t = 0; t < 60 && ctx.keep_going(); ++t) {
        const int s = 2 + ctx.rng.index(3);
        ConstrainedGame g = random_strictly_safe_instance(2, s, 2, ctx.rng.raw());
        auto polys = preset_for_game(g, PolytopeTag::All);
        CorrelatedStrategy z = detail::random_strategy(ctx.rng, g.num_profiles());
        const int i = ctx.rng.index(2);
        const double v0 = best_safe_deviation(g, polys[i], z, i, 0.0).best_value;
        const double v1 = best_safe_deviation(g, polys[i], z, i, 0.25).best_value;
        const double v2 = best_safe_deviation(g, polys[i], z, i, 1.0).best_value;
        ctx.require(v1 >= v0 - 1e-9 && v2 >= v1 - 1e-9, "relaxing the cost bound cannot hurt");
      }
    });

    add("verifier.mutated_example1", 0, 0.0, [](Context& ctx) {
      // Flipping the lone positive cost to -1 frees the profitable deviation
      // for both z1 and z3, so the two-equilibria-with-bad-midpoint pattern
      // disappears because z1 itself stops verifying.
      ExampleOne ex = example1();
      std::vector<double> cost = ex.game.costs[0][0];
      cost[1] = -1.0;
      ConstrainedGame mutated =
          ConstrainedGame::make(ex.game.actions, ex.game.utilities, {{cost}, {cost}});
      auto polys = preset_for_game(mutated, PolytopeTag::All);
      EquilibriumReport r1 = verify(mutated, polys, ex.z1, 0.0);
      ctx.require(!r1.verdict, "z1 must stop verifying once the deviation is safe");
      ctx.require_close(r1.gaps[1], 2.0 / 3.0, 1e-6, "z1 player-1 gap after mutation");
      EquilibriumReport r3 = verify(mutated, polys, ex.z3, 0.0);
      ctx.require(!r3.verdict, "z3 still fails after mutation");
      ctx.require_close(r3.gaps[1], 1.0 / 3.0, 1e-6, "z3 player-1 gap after mutation");
    });

    add("solver.cut_generation_soundness", 0, 0.0, [](Context& ctx) {
      for (int t = 0; t < 25 && ctx.keep_going(); ++t) {
        const int s = 2 + ctx.rng.index(3);
        const int m = 1 + ctx.rng.index(2);
        ConstrainedGame g = random_marginal_instance(2, s, m, ctx.rng.raw());
        auto polys = preset_for_game(g, PolytopeTag::Cce);
        LinearObjective obj;
        obj.coefficients.resize(g.num_profiles());
        for (auto& v : obj.coefficients) v = ctx.rng.uniform(-1.0, 1.0);
        SolveReport rep = solve_special(g, polys, obj);
        for (std::size_t k = 1; k < rep.objective_trace.size(); ++k)
          ctx.require_le(rep.objective_trace[k], rep.objective_trace[k - 1] + 1e-9,
                         "master objective must not increase");
        EquilibriumReport check = verify(g, polys, rep.z, 0.0);
        ctx.require(check.verdict, "returned point verifies");
      }
    });

    add("solver.brute_agreement", 0, 0.0, [](Context& ctx) {
      // Two-sided 2e-2 agreement holds on the pinned corpus (checked on its
      // s=2 members, where the fine grid is exhaustive). A grid point only
      // has to be a 1e-3-equilibrium, so off-corpus draws can exceed the
      // exact optimum by more than the slack; the tight-eps run below is the
      // sound validity check in that direction.
      for (int k = 0; k < 20 && ctx.keep_going(); ++k) {
        Rng shape(1000 + k);
        const int s = 2 + shape.index(3);
        const int m = 1 + shape.index(2);
        if (s != 2) continue;
        ConstrainedGame g = random_marginal_instance(2, s, m, 5000 + k);
        auto polys = preset_for_game(g, PolytopeTag::Cce);
        LinearObjective obj;
        obj.coefficients.resize(g.num_profiles());
        for (auto& v : obj.coefficients) v = shape.uniform();
        SolveReport rep = solve_special(g, polys, obj);
        BruteOptions bo;
        bo.grid_k = 200;
        bo.eps = 1e-3;
        bo.node_budget = 40000000;
        BruteResult br = brute_oracle(g, polys, obj.coefficients, bo);
        ctx.require(br.found && br.exhaustive, "fine grid must be exhaustive at s=2");
        ctx.require_close(rep.objective, br.best_value, 2e-2, "solver vs exhaustive grid");
        bo.eps = 1e-7;
        BruteResult tight = brute_oracle(g, polys, obj.coefficients, bo);
        if (tight.found)
          ctx.require_le(tight.best_value, rep.objective + 1e-4,
                         "near-exact grid equilibria cannot beat the solver");
      }
      for (int t = 0; t < 3 && ctx.keep_going(); ++t) {
        ConstrainedGame g = random_marginal_instance(2, 3, 1, ctx.rng.raw());
        auto polys = preset_for_game(g, PolytopeTag::Cce);
        LinearObjective obj;
        obj.coefficients.resize(g.num_profiles());
        for (auto& v : obj.coefficients) v = ctx.rng.uniform();
        SolveReport rep = solve_special(g, polys, obj);
        BruteOptions bo;
        bo.grid_k = 24;
        bo.eps = 1e-7;
        bo.node_budget = 60000000;
        bo.threads = 4;
        BruteResult br = brute_oracle(g, polys, obj.coefficients, bo);
        if (br.found)
          ctx.require_le(br.best_value, rep.objective + 1e-4,
                         "near-exact grid equilibria cannot beat the solver");
      }
    });

    add("learning.hindsight_and_averages", 0, 0.0, [](Context& ctx) {
      for (int t = 0; t < 8 && ctx.keep_going(); ++t) {
        const int s = 2 + ctx.rng.index(3);
        const int m = 1 + ctx.rng.index(2);
        ConstrainedGame g = random_marginal_instance(2, s, m, ctx.rng.raw());
        auto polys = preset_for_game(g, PolytopeTag::Cce);
        LearningTrace tr = run_dynamics(g, polys, 256, 5);
        // incremental average against the direct sum
        std::vector<double> direct(g.num_profiles(), 0.0);
        for (const auto& zt : tr.z)
          for (std::int64_t p = 0; p < g.num_profiles(); ++p) direct[p] += zt[p];
        for (auto& v : direct) v /= static_cast<double>(tr.rounds);
        ctx.require_le(max_abs_diff(direct, tr.zbar), 1e-12, "running average consistency");
        // hindsight regret against vertex enumeration over the safe set
        for (int i = 0; i < 2; ++i) {
          DeviationPolytope safe = polys[i];
          std::vector<std::pair<std::vector<double>, double>> rows;
          for (int j = 0; j < m; ++j) {
            std::vector<double> values;
            own_action_costs(g, i, j, &values, nullptr);
            safe.add_marginal_row(values, 0.0);
            rows.emplace_back(values, 0.0);
          }
          const double lp_regret = phi_regret(tr, g, safe, i);
          double best = -1e18;
          for (const auto& h : enumerate_simplex_polytope_vertices(s, rows)) {
            double acc = 0.0;
            for (int a = 0; a < s; ++a) {
              double col = 0.0;
              for (int b = 0; b < s; ++b) col += tr.grad_sum[i](b, a);
              acc += h[a] * col;
            }
            best = std::max(best, acc);
          }
          ctx.require_close(lp_regret, best - tr.realized_utility_sum[i], 1e-7,
                            "hindsight regret vs vertex route");
        }
      }
    });

    add("learning.degenerate_cases", 0, 0.0, [](Context& ctx) {
      // constant utilities: every deviation earns the same, regret must vanish
      {
        std::vector<double> u(4, 0.77);
        std::vector<double> own{-0.4, -0.6};
        std::vector<double> c(4);
        ProfileIndexer idx = ProfileIndexer::make({2, 2});
        for (std::int64_t p = 0; p < 4; ++p) c[p] = own[idx.action_of(p, 0)];
        std::vector<double> c2(4);
        for (std::int64_t p = 0; p < 4; ++p) c2[p] = own[idx.action_of(p, 1)];
        ConstrainedGame g = ConstrainedGame::make({2, 2}, {u, u}, {{c}, {c2}});
        auto polys = preset_for_game(g, PolytopeTag::Cce);
        LearningTrace tr = run_dynamics(g, polys, 128, 1);
        for (double r : tr.final_regret) ctx.require_le(std::abs(r), 1e-7, "constant-utility regret");
      }
      // single-vertex safe set: regret equals the explicit sum for that vertex
      {
        ProfileIndexer idx = ProfileIndexer::make({2, 2});
        std::vector<double> u1(4), u2(4), c1(4), c2(4);
        Rng rng(99);
        for (auto& v : u1) v = rng.uniform();
        for (auto& v : u2) v = rng.uniform();
        // player 0: action 0 strictly unsafe, action 1 strictly safe -> unique vertex (0,1)
        for (std::int64_t p = 0; p < 4; ++p) c1[p] = idx.action_of(p, 0) == 0 ? 0.5 : -0.5;
        for (std::int64_t p = 0; p < 4; ++p) c2[p] = idx.action_of(p, 1) == 0 ? -0.5 : -0.25;
        ConstrainedGame g = ConstrainedGame::make({2, 2}, {u1, u2}, {{c1}, {c2}});
        auto polys = preset_for_game(g, PolytopeTag::Cce);
        LearningTrace tr = run_dynamics(g, polys, 64, 1);
        double fixed_value = 0.0;
        for (int a = 0; a < 2; ++a) fixed_value += tr.grad_sum[0](a, 1);
        DeviationPolytope safe = polys[0];
        std::vector<double> values;
        own_action_costs(g, 0, 0, &values, nullptr);
        safe.add_marginal_row(values, 0.0);
        ctx.require_close(phi_regret(tr, g, safe, 0),
                          fixed_value - tr.realized_utility_sum[0], 1e-7,
                          "single-vertex hindsight regret");
      }
      // one-player gated instance drifts to the safe boundary
      {
        ConstrainedGame g = detail::gated_single_player();
        auto polys = preset_for_game(g, PolytopeTag::Cce);
        LearningTrace tr = run_dynamics(g, polys, 10000, 1);
        CorrelatedStrategy zbar;
        zbar.z = tr.zbar;
        ctx.require_close(expected_utility(g, zbar, 0), 0.5, 0.02, "average utility");
      }
    });

    add("instances.generators", 0, 0.0, [](Context& ctx) {
      // determinism and the advertised interior margin
      ConstrainedGame a = random_marginal_instance(2, 3, 2, 42);
      ConstrainedGame b = random_marginal_instance(2, 3, 2, 42);
      ctx.require(a.utilities == b.utilities && a.costs == b.costs, "same seed, same game");
      int margin_checked = 0;
      for (int k = 0; k < 60 && ctx.keep_going(); ++k) {
        ConstrainedGame g = random_marginal_instance(2, 2 + ctx.rng.index(3),
                                                     1 + ctx.rng.index(2), ctx.rng.raw());
        auto polys = preset_for_game(g, PolytopeTag::Cce);
        ctx.require(check_fixed_safe_set(g, polys).ok, "marginal instance misses the fixed case");
        CorrelatedStrategy z = detail::random_strategy(ctx.rng, g.num_profiles());
        for (int i = 0; i < 2; ++i)
          ctx.require(strict_feasibility(g, polys[i], z, i).rho_hat >= 0.1 - 1e-9,
                      "marginal instance misses the 0.1 margin");
        ++margin_checked;
      }
      ctx.require(margin_checked > 0, "no instances checked");
      // the ALL preset must be rejected by the fixed-case check
      ConstrainedGame g = random_marginal_instance(2, 2, 1, 7);
      ctx.require(!check_fixed_safe_set(g, preset_for_game(g, PolytopeTag::All)).ok,
                  "ALL deviations cannot give a fixed safe set");
    });

    add("instances.gadget_entries", 0, 0.0, [](Context& ctx) {
      GraphInstance graph = detail::cycle_graph(8);
      const double alpha = 0.5;
      GadgetParams gp = GadgetParams::make(alpha, 1.0 / 3.0, 8);
      ConstrainedGame g = hardness_gadget(graph, gp);
      ctx.require(g.actions[0] == 12 && g.actions[1] == 17, "action counts");
      ctx.require(g.num_constraints() == 8, "one cost per vertex");
      // u1(a0, pick v) = gamma + eta/2 = 3 alpha / 16
      for (int v = 0; v < 8; ++v)
        ctx.require_close(g.utilities[0][static_cast<std::size_t>(0) * 17 + v], 3.0 * alpha / 16.0,
                          1e-15, "top-row utility");
      // relief row: every cost is -1/(4 ell^2)
      for (int v = 0; v < 8; ++v)
        for (int c = 0; c < 17; ++c)
          ctx.require_close(g.costs[0][v][static_cast<std::size_t>(11) * 17 + c], -1.0 / 256.0,
                            1e-18, "relief row cost");
      const double cap = gp.gamma + 2.0 * gp.eta;
      for (double u : g.utilities[0]) ctx.require(u >= 0.0 && u <= cap + 1e-15, "utility range");
      CorrelatedStrategy z = completeness_strategy(graph, gp, {0, 2, 4, 6});
      for (int v : {0, 2, 4, 6})
        ctx.require_close(z.z[static_cast<std::size_t>(0) * 17 + v], 0.125, 1e-15, "pick mass");
      for (int v : {1, 3, 5, 7})
        ctx.require_close(z.z[static_cast<std::size_t>(0) * 17 + 8 + v], 0.125, 1e-15, "skip mass");
      bool threw = false;
      try {
        GadgetParams::make(0.5, 0.5, 8);  // 8^{1/2} is not integral
      } catch (const InputError&) {
        threw = true;
      }
      ctx.require(threw, "non-integral planted size must be rejected");
      threw = false;
      try {
        completeness_strategy(graph, gp, {0, 1, 2, 3});  // adjacent vertices
      } catch (const InputError&) {
        threw = true;
      }
      ctx.require(threw, "non-independent set must be rejected");
    });

    add("instances.brute_oracle_examples", 0, 0.0, [](Context& ctx) {
      ExampleOne ex = example1();
      auto polys = preset_for_game(ex.game, PolytopeTag::All);
      BruteOptions bo;
      bo.grid_k = 60;
      bo.eps = 1e-3;
      bo.node_budget = 10000000;
      BruteResult br = brute_oracle(ex.game, polys, ex.game.utilities[1], bo);
      ctx.require(br.found && br.exhaustive, "example grid must be exhaustive");
      ctx.require(br.best_value >= 1.0 / 3.0 - 1e-9, "grid optimum at least 1/3");
      // single-player gate: grid optimum within one step of 1/2
      ConstrainedGame g = detail::gated_single_player();
      auto polys1 = preset_for_game(g, PolytopeTag::Cce);
      BruteOptions bo1;
      bo1.grid_k = 200;
      bo1.eps = 1e-3;
      BruteResult br1 = brute_oracle(g, polys1, g.utilities[0], bo1);
      ctx.require(br1.found, "gated instance has grid equilibria");
      ctx.require_close(br1.best_value, 0.5, 1.0 / 200.0, "gated optimum");
      // all costs positive: no grid point is safe
      std::vector<double> hot(4, 0.5);
      ConstrainedGame bad =
          ConstrainedGame::make({2, 2}, {std::vector<double>(4, 0.0), std::vector<double>(4, 0.0)},
                                {{hot}, {hot}});
      BruteResult none =
          brute_oracle(bad, preset_for_game(bad, PolytopeTag::All), hot, BruteOptions{10, 1e-3});
      ctx.require(!none.found, "unsafe grid must report no candidate");
    });

    return cs;
  }();
  return cases;
}

inline Outcome run_case(const Case& c, std::uint64_t seed, double budget_seconds) {
  // per-case seed mixes the case name so reordering cases does not reseed
  std::uint64_t h = 1469598103934665603ull;
  for (char ch : c.name) h = (h ^ static_cast<unsigned char>(ch)) * 1099511628211ull;
  Outcome out;
  out.name = c.name;
  out.criterion = c.criterion;
  Context ctx(seed ^ h, budget_seconds);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    c.fn(ctx);
    out.pass = true;
  } catch (const CheckFailure& f) {
    out.pass = false;
    out.message = f.message;
  } catch (const std::exception& e) {
    out.pass = false;
    out.message = std::string("unexpected error: ") + e.what();
  }
  out.budget_limited = ctx.budget_limited;
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

struct Summary {
  int passed = 0, failed = 0, budget_limited = 0;
  std::vector<Outcome> outcomes;
};

inline Summary run_all(std::uint64_t seed, double budget_seconds) {
  const auto& cases = all_cases();
  int shared = 0;
  for (const auto& c : cases)
    if (c.time_limit == 0.0) ++shared;
  const double slice = shared > 0 ? budget_seconds / shared : budget_seconds;
  Summary s;
  for (const auto& c : cases) {
    Outcome o = run_case(c, seed, c.time_limit > 0.0 ? c.time_limit : slice);
    s.passed += o.pass ? 1 : 0;
    s.failed += o.pass ? 0 : 1;
    s.budget_limited += o.budget_limited ? 1 : 0;
    s.outcomes.push_back(std::move(o));
  }
  return s;
}

}  // namespace ccg::selftest
