#include <catch2/catch_amalgamated.hpp>

#include "ccg/instances.hpp"

using namespace ccg;
using Catch::Approx;

namespace {
GraphInstance cycle8() {
  GraphInstance g;
  g.num_vertices = 8;
  for (int i = 0; i < 8; ++i) g.edges.emplace_back(i, (i + 1) % 8);
  return g;
}
}  // namespace

TEST_CASE("the two-player instance carries its published numbers") {
  ExampleOne ex = example1();
  CHECK(ex.z1.z[0] == Approx(2.0 / 3.0).margin(1e-15));
  CHECK(ex.z1.z[1] == Approx(1.0 / 3.0).margin(1e-15));
  CHECK(ex.z2.z[2] == 1.0);
  CHECK(ex.phi2.phi(0, 1) == 1.0);
  CHECK(ex.phi2.phi(1, 1) == 1.0);

  auto polys = preset_for_game(ex.game, PolytopeTag::All);
  CHECK(expected_utility(ex.game, ex.z3, 1) == Approx(1.0 / 6.0).margin(1e-12));
  CorrelatedStrategy moved = apply_deviation(ex.game, ex.z3, ex.phi2);
  CHECK(expected_utility(ex.game, moved, 1) == Approx(0.5).margin(1e-12));
  CHECK(expected_costs(ex.game, moved, 1)[0] == Approx(0.0).margin(1e-12));
  CHECK(verify(ex.game, polys, ex.z1, 0.0).verdict);
  CHECK(verify(ex.game, polys, ex.z2, 0.0).verdict);
  CHECK_FALSE(verify(ex.game, polys, ex.z3, 0.0).verdict);
}

TEST_CASE("gadget parameters enforce the construction's preconditions") {
  GadgetParams gp = GadgetParams::make(0.5, 1.0 / 3.0, 8);
  CHECK(gp.planted_size == 4);
  CHECK(gp.gamma == Approx(1.0 / 16.0));
  CHECK(gp.eta == Approx(1.0 / 16.0));
  CHECK(gp.kappa == Approx(4.0 / 3.0));
  CHECK(gp.eps == Approx(0.25 / (128.0 * 64.0)));

  CHECK_THROWS_AS(GadgetParams::make(0.5, 0.5, 8), InputError);    // 8^{1/2} not integral
  CHECK_THROWS_AS(GadgetParams::make(0.5, 1.0 / 3.0, 3), InputError);
  CHECK_THROWS_AS(GadgetParams::make(-0.1, 1.0 / 3.0, 8), InputError);
  // ell - ell^{1-delta} < 2 (kappa would blow up): 4 vertices, delta with 4^{...}=3?
  CHECK_THROWS_AS(GadgetParams::make(0.5, 1.0 - std::log(3.0) / std::log(4.0), 4), InputError);
}

TEST_CASE("gadget tensors follow the construction table") {
  GraphInstance graph = cycle8();
  GadgetParams gp = GadgetParams::make(0.5, 1.0 / 3.0, 8);
  ConstrainedGame g = hardness_gadget(graph, gp);
  REQUIRE(g.actions[0] == 12);
  REQUIRE(g.actions[1] == 17);
  REQUIRE(g.num_constraints() == 8);
  auto at = [&](int r, int c) { return static_cast<std::size_t>(r) * 17 + c; };

  // first row pays gamma + eta/2 = 3 alpha / 16 until the relief column
  for (int c = 0; c < 16; ++c) {
    CHECK(g.utilities[0][at(0, c)] == Approx(3.0 * 0.5 / 16.0).margin(1e-15));
    CHECK(g.utilities[1][at(0, c)] == 1.0);
  }
  CHECK(g.utilities[0][at(0, 16)] == 0.0);
  CHECK(g.utilities[1][at(0, 16)] == 0.0);
  // steering rows: picks pay a1, skips pay a2
  for (int v = 0; v < 8; ++v) {
    CHECK(g.utilities[0][at(1, v)] == Approx(gp.gamma + gp.eta));
    CHECK(g.utilities[0][at(1, 8 + v)] == Approx(gp.gamma));
    CHECK(g.utilities[0][at(2, v)] == Approx(gp.gamma));
    CHECK(g.utilities[0][at(2, 8 + v)] == Approx(gp.gamma + gp.eta));
  }
  // vertex rows: gamma on picks and own skip, gamma + kappa eta on foreign skips
  for (int v = 0; v < 8; ++v) {
    for (int w = 0; w < 8; ++w) {
      CHECK(g.utilities[0][at(3 + v, w)] == Approx(gp.gamma));
      const double expect = v == w ? gp.gamma : gp.gamma + gp.kappa * gp.eta;
      CHECK(g.utilities[0][at(3 + v, 8 + w)] == Approx(expect));
    }
    CHECK(g.utilities[0][at(3 + v, 16)] == 0.0);
  }
  // cost v: +1 on the matching pick, -1 across edges, relief everywhere else
  for (int v = 0; v < 8; ++v) {
    CHECK(g.costs[0][v][at(3 + v, v)] == 1.0);
    CHECK(g.costs[0][v][at(3 + v, (v + 1) % 8)] == -1.0);
    CHECK(g.costs[0][v][at(3 + v, (v + 7) % 8)] == -1.0);
    CHECK(g.costs[0][v][at(3 + v, (v + 2) % 8)] == 0.0);
    for (int c = 0; c < 17; ++c) CHECK(g.costs[0][v][at(11, c)] == Approx(-1.0 / 256.0));
    for (int r = 0; r < 12; ++r) CHECK(g.costs[0][v][at(r, 16)] == Approx(-1.0 / 256.0));
    CHECK(g.costs[0][v] == g.costs[1][v]);  // shared cost functions
  }
  // utility cap gamma + 2 eta stays inside [0,1]
  const double cap = gp.gamma + 2.0 * gp.eta;
  for (double u : g.utilities[0]) CHECK((u >= 0.0 && u <= cap + 1e-15));
}

TEST_CASE("planted strategies are safe, welfare-one equilibria") {
  GraphInstance graph = cycle8();
  GadgetParams gp = GadgetParams::make(0.5, 1.0 / 3.0, 8);
  ConstrainedGame g = hardness_gadget(graph, gp);
  CorrelatedStrategy z = completeness_strategy(graph, gp, {0, 2, 4, 6});
  for (int v : {0, 2, 4, 6}) CHECK(z.z[v] == Approx(0.125).margin(1e-15));
  for (int v : {1, 3, 5, 7}) CHECK(z.z[8 + v] == Approx(0.125).margin(1e-15));
  CHECK(is_safe(g, z).safe);
  const double welfare = expected_utility(g, z, 0) + expected_utility(g, z, 1);
  CHECK(welfare >= 1.0 - 1e-12);
  auto polys = preset_for_game(g, PolytopeTag::All);
  EquilibriumReport rep = verify(g, polys, z, 0.0);
  CHECK(rep.verdict);
  CHECK(rep.max_gap <= 1e-6);

  CHECK_THROWS_AS(completeness_strategy(graph, gp, {0, 1, 2, 3}), InputError);  // adjacent
  CHECK_THROWS_AS(completeness_strategy(graph, gp, {0, 2, 4}), InputError);     // wrong size
}

TEST_CASE("planted equilibria survive asymmetric pick and skip masses") {
  // twelve vertices with a planted set of four: picks carry 1/8 each and
  // skips 1/16 each, so mass-swapping bugs cannot hide behind symmetry
  GraphInstance graph;
  graph.num_vertices = 12;
  for (int i = 0; i < 12; ++i) graph.edges.emplace_back(i, (i + 1) % 12);
  const double delta = 1.0 - std::log(4.0) / std::log(12.0);
  GadgetParams gp = GadgetParams::make(0.5, delta, 12);
  REQUIRE(gp.planted_size == 4);
  CHECK(gp.kappa == Approx(8.0 / 7.0));
  ConstrainedGame g = hardness_gadget(graph, gp);
  CHECK(g.actions[0] == 16);
  CHECK(g.actions[1] == 25);
  CorrelatedStrategy z = completeness_strategy(graph, gp, {0, 3, 6, 9});
  for (int v : {0, 3, 6, 9}) CHECK(z.z[v] == Approx(0.125).margin(1e-15));
  for (int v : {1, 2, 4, 5, 7, 8, 10, 11})
    CHECK(z.z[12 + v] == Approx(1.0 / 16.0).margin(1e-15));
  auto polys = preset_for_game(g, PolytopeTag::All);
  EquilibriumReport rep = verify(g, polys, z, 0.0);
  CHECK(rep.verdict);
  CHECK(rep.max_gap <= 1e-6);
  CHECK(rep.safety.max_residual <= 1e-9);
  CHECK(expected_utility(g, z, 0) + expected_utility(g, z, 1) >= 1.0 - 1e-12);
}

TEST_CASE("graph validation") {
  GraphInstance g;
  g.num_vertices = 3;
  g.edges = {{0, 1}, {1, 2}};
  CHECK_NOTHROW(g.validate());
  CHECK(g.adjacent(1, 0));
  CHECK_FALSE(g.adjacent(0, 2));
  g.edges.push_back({2, 2});
  CHECK_THROWS_AS(g.validate(), InputError);
  g.edges.back() = {1, 0};
  CHECK_THROWS_AS(g.validate(), InputError);  // duplicate
  g.edges.back() = {0, 5};
  CHECK_THROWS_AS(g.validate(), InputError);
}

TEST_CASE("random generators are deterministic and certified") {
  ConstrainedGame a = random_marginal_instance(3, 2, 2, 11);
  ConstrainedGame b = random_marginal_instance(3, 2, 2, 11);
  CHECK(a.utilities == b.utilities);
  CHECK(a.costs == b.costs);
  CHECK(a.num_players() == 3);

  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    ConstrainedGame g = random_marginal_instance(2, 2 + rng.index(3), 1 + rng.index(2), rng.raw());
    auto polys = preset_for_game(g, PolytopeTag::Cce);
    CHECK(check_fixed_safe_set(g, polys).ok);
    std::vector<double> z(g.num_profiles());
    double sum = 0.0;
    for (auto& v : z) {
      v = rng.uniform();
      sum += v;
    }
    for (auto& v : z) v /= sum;
    CorrelatedStrategy zs;
    zs.z = z;
    for (int i = 0; i < 2; ++i)
      CHECK(strict_feasibility(g, polys[i], zs, i).rho_hat >= 0.1 - 1e-9);
  }
}

TEST_CASE("grid oracle reproduces the instance optima") {
  ExampleOne ex = example1();
  auto polys = preset_for_game(ex.game, PolytopeTag::All);
  BruteOptions bo;
  bo.grid_k = 60;
  bo.eps = 1e-3;
  bo.node_budget = 20000000;
  BruteResult br = brute_oracle(ex.game, polys, ex.game.utilities[1], bo);
  REQUIRE(br.found);
  CHECK(br.exhaustive);
  CHECK(br.best_value >= 1.0 / 3.0 - 1e-9);
  CHECK(is_safe(ex.game, br.best_z).safe);
  CHECK(verify(ex.game, polys, br.best_z, 1e-3).verdict);
}

TEST_CASE("grid oracle flags exhausted budgets and keeps a valid partial bound") {
  ConstrainedGame g = random_marginal_instance(2, 3, 1, 404);
  auto polys = preset_for_game(g, PolytopeTag::Cce);
  BruteOptions big;
  big.grid_k = 14;
  big.eps = 1e-2;
  big.node_budget = 100000000;
  BruteResult full = brute_oracle(g, polys, g.utilities[0], big);
  REQUIRE(full.exhaustive);
  BruteOptions tiny = big;
  tiny.node_budget = 4000;
  BruteResult part = brute_oracle(g, polys, g.utilities[0], tiny);
  CHECK_FALSE(part.exhaustive);
  if (part.found) {
    REQUIRE(full.found);
    CHECK(part.best_value <= full.best_value + 1e-12);
  }
}

TEST_CASE("grid oracle is thread-count invariant") {
  ConstrainedGame g = random_marginal_instance(2, 3, 1, 909);
  auto polys = preset_for_game(g, PolytopeTag::Cce);
  BruteOptions one;
  one.grid_k = 12;
  one.eps = 1e-2;
  one.node_budget = 2000000;
  BruteOptions four = one;
  four.threads = 4;
  BruteResult a = brute_oracle(g, polys, g.utilities[0], one);
  BruteResult b = brute_oracle(g, polys, g.utilities[0], four);
  CHECK(a.found == b.found);
  CHECK(a.nodes == b.nodes);
  if (a.found) {
    CHECK(a.best_value == b.best_value);
    CHECK(a.best_z.z == b.best_z.z);
  }
}

TEST_CASE("no safe grid point means no candidate") {
  std::vector<double> u(4, 0.0), hot(4, 0.5);
  ConstrainedGame bad = ConstrainedGame::make({2, 2}, {u, u}, {{hot}, {hot}});
  BruteOptions bo;
  bo.grid_k = 10;
  BruteResult none = brute_oracle(bad, preset_for_game(bad, PolytopeTag::All), u, bo);
  CHECK_FALSE(none.found);
  CHECK(none.candidates == 0);
}
