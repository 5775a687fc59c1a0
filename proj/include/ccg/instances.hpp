#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "ccg/learning.hpp"

namespace ccg {

// Two players, two actions each, one shared cost constraint. The second
// player profits only from the profile (a0, a1), which carries the only
// positive cost; two equilibria average to a strategy from which moving all
// mass to a1 is both safe and profitable.
struct ExampleOne {
  ConstrainedGame game;
  CorrelatedStrategy z1, z2, z3;
  Deviation phi2;
};

inline ExampleOne example1() {
  ExampleOne ex;
  // profiles: 0 = (a0,a0), 1 = (a0,a1), 2 = (a1,a0), 3 = (a1,a1)
  std::vector<double> u1{0.0, 0.0, 0.0, 0.0};
  std::vector<double> u2{0.0, 1.0, 0.0, 0.0};
  std::vector<double> cost{-0.5, 1.0, -1.0, -1.0};
  ex.game = ConstrainedGame::make({2, 2}, {u1, u2}, {{cost}, {cost}});
  ex.z1 = CorrelatedStrategy::ingest({2.0 / 3.0, 1.0 / 3.0, 0.0, 0.0});
  ex.z2 = CorrelatedStrategy::ingest({0.0, 0.0, 1.0, 0.0});
  ex.z3 = CorrelatedStrategy::ingest({1.0 / 3.0, 1.0 / 6.0, 1.0 / 2.0, 0.0});
  Matrix phi(2, 2, 0.0);
  phi(0, 1) = 1.0;
  phi(1, 1) = 1.0;
  ex.phi2 = Deviation{1, std::move(phi)};
  return ex;
}

struct GraphInstance {
  int num_vertices = 0;
  std::vector<std::pair<int, int>> edges;
  std::optional<std::vector<int>> independent_set;

  void validate() const {
    if (num_vertices < 1) throw InputError("graph needs at least one vertex");
    std::set<std::pair<int, int>> seen;
    for (auto [u, v] : edges) {
      if (u < 0 || v < 0 || u >= num_vertices || v >= num_vertices)
        throw InputError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                         ") out of range");
      if (u == v) throw InputError("self-loop at vertex " + std::to_string(u));
      auto key = std::minmax(u, v);
      if (!seen.insert({key.first, key.second}).second)
        throw InputError("duplicate edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
    }
    if (independent_set) check_independent(*independent_set);
  }

  bool adjacent(int u, int v) const {
    for (auto [a, b] : edges)
      if ((a == u && b == v) || (a == v && b == u)) return true;
    return false;
  }

  void check_independent(const std::vector<int>& set) const {
    for (std::size_t a = 0; a < set.size(); ++a) {
      if (set[a] < 0 || set[a] >= num_vertices)
        throw InputError("independent-set vertex " + std::to_string(set[a]) + " out of range");
      for (std::size_t b = a + 1; b < set.size(); ++b)
        if (adjacent(set[a], set[b]))
          throw InputError("vertices " + std::to_string(set[a]) + " and " +
                           std::to_string(set[b]) + " are adjacent; set is not independent");
    }
  }
};

// Reduction parameters. With ell vertices and target factor alpha:
//   gamma = eta = alpha / 8,   eps = alpha^2 / (128 ell^2),
//   kappa = (ell - ell^(1-delta)) / (ell - ell^(1-delta) - 1).
// ell^(1-delta) must be integral and kappa <= 2 for the construction's
// inequalities to hold at finite sizes.
struct GadgetParams {
  double alpha = 0.5;
  double delta = 1.0 / 3.0;
  int ell = 0;
  int planted_size = 0;  // ell^(1-delta)
  double gamma = 0.0, eta = 0.0, eps = 0.0, kappa = 0.0;

  static GadgetParams make(double alpha, double delta, int ell) {
    if (!(alpha > 0.0)) throw InputError("alpha must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw InputError("delta must lie in (0,1)");
    if (ell < 2) throw InputError("need at least two vertices");
    GadgetParams p;
    p.alpha = alpha;
    p.delta = delta;
    p.ell = ell;
    const double raw = std::pow(static_cast<double>(ell), 1.0 - delta);
    p.planted_size = static_cast<int>(std::llround(raw));
    if (std::abs(raw - p.planted_size) > 1e-9)
      throw InputError("ell^(1-delta) = " + fmt(raw) + " is not integral for ell = " +
                       std::to_string(ell) + ", delta = " + fmt(delta));
    const int rest = ell - p.planted_size;
    if (rest < 2)
      throw InputError("ell - ell^(1-delta) = " + std::to_string(rest) +
                       " must be at least 2 (ell = " + std::to_string(ell) +
                       ", delta = " + fmt(delta) + ")");
    p.gamma = alpha / 8.0;
    p.eta = alpha / 8.0;
    p.eps = alpha * alpha / (128.0 * ell * ell);
    p.kappa = static_cast<double>(rest) / static_cast<double>(rest - 1);
    if (p.kappa > 2.0 + 1e-12)
      throw InputError("kappa = " + fmt(p.kappa) + " exceeds 2 (ell = " + std::to_string(ell) +
                       ", delta = " + fmt(delta) + ")");
    return p;
  }
};

// Builds the reduction game from a graph.
// Player 0 actions: a0, a1, a2, one action per vertex, then the relief
// action aF. Player 1 actions: one "pick v" and one "skip v" action per
// vertex, then aF. One shared cost function per vertex; deviating onto a
// vertex action clashes (+1) with the matching pick unless an edge pays it
// off (-1), and aF strictly relaxes every constraint by 1/(4 ell^2).
inline ConstrainedGame hardness_gadget(const GraphInstance& graph, const GadgetParams& gp) {
  graph.validate();
  if (graph.num_vertices != gp.ell) throw InputError("params built for a different vertex count");
  const int L = gp.ell;
  const int s1 = L + 4, s2 = 2 * L + 1;
  const int a0 = 0, a1 = 1, a2 = 2;
  auto p1_vertex = [&](int v) { return 3 + v; };
  const int p1_relief = L + 3;
  auto p2_pick = [&](int v) { return v; };
  auto p2_skip = [&](int v) { return L + v; };
  const int p2_relief = 2 * L;

  ProfileIndexer idx = ProfileIndexer::make({s1, s2});
  auto at = [&](int r, int c) { return static_cast<std::size_t>(r) * s2 + c; };

  std::vector<double> u1(idx.size, 0.0), u2(idx.size, 0.0);
  for (int c = 0; c < s2; ++c) {
    if (c == p2_relief) continue;
    u1[at(a0, c)] = gp.gamma + 0.5 * gp.eta;
    u2[at(a0, c)] = 1.0;
  }
  for (int v = 0; v < L; ++v) {
    u1[at(a1, p2_pick(v))] = gp.gamma + gp.eta;
    u1[at(a1, p2_skip(v))] = gp.gamma;
    u1[at(a2, p2_pick(v))] = gp.gamma;
    u1[at(a2, p2_skip(v))] = gp.gamma + gp.eta;
  }
  for (int w = 0; w < L; ++w) {
    for (int v = 0; v < L; ++v) {
      u1[at(p1_vertex(w), p2_pick(v))] = gp.gamma;
      u1[at(p1_vertex(w), p2_skip(v))] = (v == w) ? gp.gamma : gp.gamma + gp.kappa * gp.eta;
    }
  }

  const double relief = -1.0 / (4.0 * static_cast<double>(L) * L);
  std::vector<std::vector<double>> shared_costs(L);
  for (int v = 0; v < L; ++v) {
    std::vector<double> c(idx.size, 0.0);
    c[at(p1_vertex(v), p2_pick(v))] = 1.0;
    for (int w = 0; w < L; ++w)
      if (w != v && graph.adjacent(v, w)) c[at(p1_vertex(v), p2_pick(w))] = -1.0;
    for (int col = 0; col < s2; ++col) c[at(p1_relief, col)] = relief;
    for (int row = 0; row < s1; ++row) c[at(row, p2_relief)] = relief;
    shared_costs[v] = std::move(c);
  }
  return ConstrainedGame::make({s1, s2}, {std::move(u1), std::move(u2)},
                               {shared_costs, shared_costs});
}

// The planted-equilibrium strategy: player 0 always plays a0; player 1
// picks planted vertices and skips the rest, each side carrying half the
// mass. Safe by construction and welfare-optimal for player 1.
inline CorrelatedStrategy completeness_strategy(const GraphInstance& graph, const GadgetParams& gp,
                                                const std::vector<int>& planted) {
  graph.validate();
  if (static_cast<int>(planted.size()) != gp.planted_size)
    throw InputError("independent set has size " + std::to_string(planted.size()) +
                     ", expected ell^(1-delta) = " + std::to_string(gp.planted_size));
  graph.check_independent(planted);
  const int L = gp.ell;
  const int s2 = 2 * L + 1;
  std::vector<char> in_set(L, 0);
  for (int v : planted) in_set[v] = 1;
  std::vector<double> z(static_cast<std::size_t>(L + 4) * s2, 0.0);
  const double pick_mass = 1.0 / (2.0 * gp.planted_size);
  const double skip_mass = 1.0 / (2.0 * (L - gp.planted_size));
  for (int v = 0; v < L; ++v) {
    if (in_set[v])
      z[static_cast<std::size_t>(0) * s2 + v] = pick_mass;
    else
      z[static_cast<std::size_t>(0) * s2 + L + v] = skip_mass;
  }
  return CorrelatedStrategy::ingest(std::move(z));
}

// Random game whose costs depend only on the acting player's own action,
// with a strictly safe action per player (margin at least `margin`), so the
// fixed-safe-set machinery applies and strict feasibility holds everywhere.
inline ConstrainedGame random_marginal_instance(int n, int s, int m, std::uint64_t seed,
                                                double margin = 0.1) {
  if (n < 1 || s < 1 || m < 0) throw InputError("bad instance shape");
  Rng rng(seed);
  ProfileIndexer idx = ProfileIndexer::make(std::vector<int>(n, s));
  std::vector<std::vector<double>> utilities(n);
  for (int i = 0; i < n; ++i) {
    utilities[i].resize(idx.size);
    for (auto& v : utilities[i]) v = rng.uniform();
  }
  std::vector<std::vector<std::vector<double>>> costs(n);
  for (int i = 0; i < n; ++i) {
    std::vector<std::vector<double>> per_action(m, std::vector<double>(s));
    bool ok = false;
    for (int attempt = 0; attempt < 10000 && !ok; ++attempt) {
      for (int j = 0; j < m; ++j)
        for (int a = 0; a < s; ++a) per_action[j][a] = rng.uniform(-1.0, 1.0);
      for (int a = 0; a < s && !ok; ++a) {
        bool safe = true;
        for (int j = 0; j < m; ++j) safe = safe && per_action[j][a] <= -margin;
        ok = safe;
      }
    }
    if (!ok) throw SolveError("random_marginal_instance: sampling cap exceeded");
    costs[i].assign(m, std::vector<double>(idx.size));
    for (int j = 0; j < m; ++j)
      for (std::int64_t p = 0; p < idx.size; ++p)
        costs[i][j][p] = per_action[j][idx.action_of(p, i)];
  }
  return ConstrainedGame::make(std::vector<int>(n, s), std::move(utilities), std::move(costs));
}

// Random game with unrestricted cost tensors except that one action per
// player is drawn with every cost entry <= -margin; deviating onto that
// action certifies strict feasibility at every strategy.
inline ConstrainedGame random_strictly_safe_instance(int n, int s, int m, std::uint64_t seed,
                                                     double margin = 0.1) {
  if (n < 1 || s < 1 || m < 0) throw InputError("bad instance shape");
  if (margin < 0.0 || margin >= 1.0) throw InputError("margin must lie in [0,1)");
  Rng rng(seed);
  ProfileIndexer idx = ProfileIndexer::make(std::vector<int>(n, s));
  std::vector<std::vector<double>> utilities(n);
  for (int i = 0; i < n; ++i) {
    utilities[i].resize(idx.size);
    for (auto& v : utilities[i]) v = rng.uniform();
  }
  std::vector<std::vector<std::vector<double>>> costs(n);
  for (int i = 0; i < n; ++i) {
    costs[i].assign(m, std::vector<double>(idx.size));
    const int haven = rng.index(s);
    for (int j = 0; j < m; ++j)
      for (std::int64_t p = 0; p < idx.size; ++p)
        costs[i][j][p] = idx.action_of(p, i) == haven ? rng.uniform(-1.0, -margin)
                                                      : rng.uniform(-1.0, 1.0);
  }
  return ConstrainedGame::make(std::vector<int>(n, s), std::move(utilities), std::move(costs));
}

struct BruteOptions {
  int grid_k = 60;
  double eps = 1e-3;
  std::int64_t node_budget = 50000000;
  int threads = 1;
  double feas_tol = defaults::kFeasibilityTol;
  double gap_slack = 1e-12;
};

struct BruteResult {
  bool found = false;
  double best_value = 0.0;
  CorrelatedStrategy best_z;
  bool exhaustive = true;
  std::int64_t nodes = 0;
  std::int64_t candidates = 0;  // grid points that verified as eps-equilibria
};

namespace detail {

struct BruteShared {
  const ConstrainedGame* game = nullptr;
  const std::vector<DeviationPolytope>* polys = nullptr;
  const std::vector<double>* objective = nullptr;
  BruteOptions opt;
  int P = 0;
  std::vector<const std::vector<double>*> cost_tensors;  // n*m tensors
  std::vector<std::vector<double>> cost_suffix_min;      // per tensor, over profiles
  std::vector<double> obj_suffix_max;
  bool fast = false;
  std::vector<std::vector<std::vector<double>>> vertices;  // [player][vertex][action]
};

struct BruteWorker {
  const BruteShared* sh = nullptr;
  std::vector<std::int64_t> counts;
  std::vector<double> cost_partial;
  double obj_partial = 0.0;
  std::int64_t nodes = 0;
  std::int64_t budget = 0;
  bool out_of_budget = false;
  bool found = false;
  double best = 0.0;
  std::vector<std::int64_t> best_counts;
  std::int64_t candidates = 0;

  void leaf() {
    const auto& g = *sh->game;
    for (double c : cost_partial)
      if (c > sh->opt.feas_tol) return;
    CorrelatedStrategy z;
    z.z.resize(sh->P);
    const double invk = 1.0 / static_cast<double>(sh->opt.grid_k);
    for (int p = 0; p < sh->P; ++p) z.z[p] = static_cast<double>(counts[p]) * invk;
    double max_gap = 0.0;
    if (sh->fast) {
      for (int i = 0; i < g.num_players() && max_gap <= sh->opt.eps + sh->opt.gap_slack; ++i) {
        const int s = g.actions[i];
        // value of switching to own action a while everyone else follows z
        std::vector<double> switch_value(s, 0.0);
        const std::int64_t stride = g.idx.strides[i];
        for (std::int64_t p = 0; p < sh->P; ++p) {
          const double zp = z.z[p];
          if (zp == 0.0) continue;
          const std::int64_t base = p - static_cast<std::int64_t>(g.idx.action_of(p, i)) * stride;
          for (int a = 0; a < s; ++a) switch_value[a] += g.utilities[i][base + a * stride] * zp;
        }
        double best_dev = -1.0;
        for (const auto& h : sh->vertices[i]) best_dev = std::max(best_dev, dot(h, switch_value));
        max_gap = std::max(max_gap, best_dev - expected_utility(g, z, i));
      }
    } else {
      for (int i = 0; i < g.num_players() && max_gap <= sh->opt.eps + sh->opt.gap_slack; ++i) {
        try {
          max_gap = std::max(max_gap, best_safe_deviation(g, (*sh->polys)[i], z, i).gap);
        } catch (const SolveError&) {
          return;  // no safe deviation at z: skip the point
        }
      }
    }
    if (max_gap > sh->opt.eps + sh->opt.gap_slack) return;
    ++candidates;
    if (!found || obj_partial > best) {
      found = true;
      best = obj_partial;
      best_counts = counts;
    }
  }

  void descend(int p, std::int64_t rem) {
    if (++nodes > budget) {
      out_of_budget = true;
      return;
    }
    const double mass = static_cast<double>(rem) / sh->opt.grid_k;
    for (std::size_t t = 0; t < cost_partial.size(); ++t)
      if (cost_partial[t] + mass * sh->cost_suffix_min[t][p] > sh->opt.feas_tol) return;
    if (found && obj_partial + mass * sh->obj_suffix_max[p] <= best) return;
    if (p == sh->P - 1) {
      counts[p] = rem;
      const double w = mass;
      for (std::size_t t = 0; t < cost_partial.size(); ++t)
        cost_partial[t] += w * (*sh->cost_tensors[t])[p];
      obj_partial += w * (*sh->objective)[p];
      leaf();
      for (std::size_t t = 0; t < cost_partial.size(); ++t)
        cost_partial[t] -= w * (*sh->cost_tensors[t])[p];
      obj_partial -= w * (*sh->objective)[p];
      counts[p] = 0;
      return;
    }
    for (std::int64_t k = rem; k >= 0 && !out_of_budget; --k) {
      counts[p] = k;
      const double w = static_cast<double>(k) / sh->opt.grid_k;
      for (std::size_t t = 0; t < cost_partial.size(); ++t)
        cost_partial[t] += w * (*sh->cost_tensors[t])[p];
      obj_partial += w * (*sh->objective)[p];
      descend(p + 1, rem - k);
      for (std::size_t t = 0; t < cost_partial.size(); ++t)
        cost_partial[t] -= w * (*sh->cost_tensors[t])[p];
      obj_partial -= w * (*sh->objective)[p];
      counts[p] = 0;
    }
  }
};

}  // namespace detail

// Exhaustive search over the grid { z : z[p] = k_p / grid_k } for the best
// objective among grid points that are safe and verify as eps-equilibria.
// Subtrees that cannot be safe or cannot beat the incumbent are pruned. The
// node budget bounds work deterministically; when it trips, the result is a
// lower bound flagged non-exhaustive.
inline BruteResult brute_oracle(const ConstrainedGame& g,
                                const std::vector<DeviationPolytope>& polys,
                                const std::vector<double>& objective, BruteOptions opt = {}) {
  if (static_cast<std::int64_t>(objective.size()) != g.num_profiles())
    throw InputError("objective has wrong length");
  if (opt.grid_k < 1) throw InputError("grid_k must be positive");

  detail::BruteShared sh;
  sh.game = &g;
  sh.polys = &polys;
  sh.objective = &objective;
  sh.opt = opt;
  sh.P = static_cast<int>(g.num_profiles());
  for (int i = 0; i < g.num_players(); ++i)
    for (int j = 0; j < g.num_constraints(); ++j) sh.cost_tensors.push_back(&g.costs[i][j]);
  sh.cost_suffix_min.resize(sh.cost_tensors.size());
  for (std::size_t t = 0; t < sh.cost_tensors.size(); ++t) {
    auto& suf = sh.cost_suffix_min[t];
    suf.assign(sh.P, 0.0);
    double run = std::numeric_limits<double>::infinity();
    for (int p = sh.P - 1; p >= 0; --p) {
      run = std::min(run, (*sh.cost_tensors[t])[p]);
      suf[p] = run;
    }
  }
  sh.obj_suffix_max.assign(sh.P, 0.0);
  {
    double run = -std::numeric_limits<double>::infinity();
    for (int p = sh.P - 1; p >= 0; --p) {
      run = std::max(run, objective[p]);
      sh.obj_suffix_max[p] = run;
    }
  }
  sh.fast = check_fixed_safe_set(g, polys).ok;
  if (sh.fast) {
    sh.vertices.resize(g.num_players());
    for (int i = 0; i < g.num_players(); ++i) {
      std::vector<std::pair<std::vector<double>, double>> rows = polys[i].h_rows();
      for (int j = 0; j < g.num_constraints(); ++j) {
        std::vector<double> values;
        own_action_costs(g, i, j, &values, nullptr);
        rows.emplace_back(std::move(values), 0.0);
      }
      sh.vertices[i] = enumerate_simplex_polytope_vertices(g.actions[i], rows);
      if (sh.vertices[i].empty())
        throw SolveError("brute_oracle: empty safe deviation set for player " + std::to_string(i));
    }
  }

  // Chunk by the mass assigned to profile 0 so budgets and results do not
  // depend on the thread count.
  const int chunks = opt.grid_k + 1;
  std::vector<detail::BruteWorker> workers(chunks);
  const std::int64_t per_chunk = std::max<std::int64_t>(1, opt.node_budget / chunks);
  auto run_chunk = [&](int c) {
    detail::BruteWorker& w = workers[c];
    w.sh = &sh;
    w.counts.assign(sh.P, 0);
    w.cost_partial.assign(sh.cost_tensors.size(), 0.0);
    w.budget = per_chunk;
    const std::int64_t k0 = opt.grid_k - c;  // descending first coordinate
    w.counts[0] = k0;
    const double mass = static_cast<double>(k0) / opt.grid_k;
    for (std::size_t t = 0; t < w.cost_partial.size(); ++t)
      w.cost_partial[t] += mass * (*sh.cost_tensors[t])[0];
    w.obj_partial += mass * objective[0];
    if (sh.P == 1) {
      if (k0 == opt.grid_k) w.leaf();
    } else {
      w.descend(1, opt.grid_k - k0);
    }
  };
  const int nthreads = std::max(1, std::min(opt.threads, chunks));
  if (nthreads == 1) {
    for (int c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t)
      pool.emplace_back([&, t] {
        for (int c = t; c < chunks; c += nthreads) run_chunk(c);
      });
    for (auto& th : pool) th.join();
  }

  BruteResult out;
  for (int c = 0; c < chunks; ++c) {
    const detail::BruteWorker& w = workers[c];
    out.nodes += w.nodes;
    out.candidates += w.candidates;
    out.exhaustive = out.exhaustive && !w.out_of_budget;
    if (w.found && (!out.found || w.best > out.best_value)) {
      out.found = true;
      out.best_value = w.best;
      std::vector<double> z(sh.P);
      for (int p = 0; p < sh.P; ++p)
        z[p] = static_cast<double>(w.best_counts[p]) / opt.grid_k;
      out.best_z = CorrelatedStrategy::ingest(std::move(z));
    }
  }
  return out;
}

}  // namespace ccg
