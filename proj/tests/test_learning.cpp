#include <catch2/catch_amalgamated.hpp>

#include "ccg/io.hpp"

using namespace ccg;
using Catch::Approx;

TEST_CASE("the gated single-player instance learns its boundary") {
  ConstrainedGame g = ConstrainedGame::make({2}, {{1.0, 0.0}}, {{{1.0, -1.0}}});
  auto polys = preset_for_game(g, PolytopeTag::Cce);
  LearningTrace tr = run_dynamics(g, polys, 10000, 1);
  CorrelatedStrategy zbar;
  zbar.z = tr.zbar;
  CHECK(expected_utility(g, zbar, 0) == Approx(0.5).margin(0.02));
  CHECK(is_safe(g, zbar).safe);
}

TEST_CASE("constant utilities produce zero regret") {
  ProfileIndexer idx = ProfileIndexer::make({2, 2});
  std::vector<double> u(4, 0.6);
  std::vector<double> c0(4), c1(4);
  for (std::int64_t p = 0; p < 4; ++p) {
    c0[p] = idx.action_of(p, 0) == 0 ? -0.3 : -0.8;
    c1[p] = idx.action_of(p, 1) == 0 ? -0.5 : -0.2;
  }
  ConstrainedGame g = ConstrainedGame::make({2, 2}, {u, u}, {{c0}, {c1}});
  auto polys = preset_for_game(g, PolytopeTag::Cce);
  LearningTrace tr = run_dynamics(g, polys, 256, 4);
  for (double r : tr.final_regret) CHECK(std::abs(r) <= 1e-7);
}

TEST_CASE("every played deviation fixes the round's joint strategy") {
  ConstrainedGame g = random_marginal_instance(2, 3, 2, 31);
  auto polys = preset_for_game(g, PolytopeTag::Cce);
  LearningTrace tr = run_dynamics(g, polys, 128, 2);
  for (std::int64_t t = 0; t < tr.rounds; t += 7) {
    CorrelatedStrategy zt;
    zt.z = tr.z[t];
    for (int i = 0; i < g.num_players(); ++i) {
      Deviation dev{i, tr.phi[t][i]};
      CHECK(max_abs_diff(apply_deviation(g, zt, dev).z, zt.z) <= 1e-9);
      CHECK(polys[i].contains(dev, 1e-8));
    }
  }
}

TEST_CASE("running averages stay safe at every checkpoint") {
  for (int inst = 0; inst < 3; ++inst) {
    ConstrainedGame g = random_marginal_instance(2, 2 + inst, 1 + inst % 2, 600 + inst);
    auto polys = preset_for_game(g, PolytopeTag::Cce);
    LearningTrace tr = run_dynamics(g, polys, 2048, 5);
    for (const auto& row : tr.checkpoints) CHECK(row.max_cost_residual <= 1e-9);
    // equilibrium quality at the final checkpoint
    CorrelatedStrategy zbar;
    zbar.z = tr.zbar;
    double eps_t = 0.0;
    for (const auto& row : tr.checkpoints)
      if (row.t == tr.rounds) eps_t = std::max(eps_t, row.gap_bound);
    CHECK(verify(g, polys, zbar, eps_t).verdict);
  }
}

TEST_CASE("gap bounds in the trace equal regret over t") {
  ConstrainedGame g = random_marginal_instance(2, 3, 1, 888);
  auto polys = preset_for_game(g, PolytopeTag::Cce);
  LearningTrace tr = run_dynamics(g, polys, 512, 6);
  for (const auto& row : tr.checkpoints)
    CHECK(row.gap_bound == Approx(row.regret / static_cast<double>(row.t)).margin(1e-12));
}

TEST_CASE("identical runs produce identical traces") {
  ConstrainedGame g = random_marginal_instance(2, 3, 2, 99);
  auto polys = preset_for_game(g, PolytopeTag::Cce);
  LearningTrace a = run_dynamics(g, polys, 300, 11);
  LearningTrace b = run_dynamics(g, polys, 300, 11);
  CHECK(a.zbar == b.zbar);
  CHECK(a.z == b.z);
  CHECK(trace_csv(a) == trace_csv(b));
}

TEST_CASE("hindsight regret matches the vertex route") {
  ConstrainedGame g = random_marginal_instance(2, 3, 1, 1234);
  auto polys = preset_for_game(g, PolytopeTag::Cce);
  LearningTrace tr = run_dynamics(g, polys, 200, 8);
  for (int i = 0; i < 2; ++i) {
    DeviationPolytope safe = polys[i];
    std::vector<std::pair<std::vector<double>, double>> rows;
    std::vector<double> values;
    own_action_costs(g, i, 0, &values, nullptr);
    safe.add_marginal_row(values, 0.0);
    rows.emplace_back(values, 0.0);
    double best = -1e18;
    for (const auto& h : enumerate_simplex_polytope_vertices(3, rows)) {
      double acc = 0.0;
      for (int a = 0; a < 3; ++a) {
        double col = 0.0;
        for (int b = 0; b < 3; ++b) col += tr.grad_sum[i](b, a);
        acc += h[a] * col;
      }
      best = std::max(best, acc);
    }
    CHECK(phi_regret(tr, g, safe, i) ==
          Approx(best - tr.realized_utility_sum[i]).margin(1e-7));
  }
}

TEST_CASE("preconditions and degenerate shapes") {
  ExampleOne ex = example1();
  CHECK_THROWS_AS(run_dynamics(ex.game, preset_for_game(ex.game, PolytopeTag::Cce), 16, 1),
                  SolveError);  // costs not own-action-only
  ConstrainedGame g = random_marginal_instance(2, 2, 1, 5);
  CHECK_THROWS_AS(run_dynamics(g, preset_for_game(g, PolytopeTag::All), 16, 1), SolveError);
  CHECK_THROWS_AS(run_dynamics(g, preset_for_game(g, PolytopeTag::Cce), 0, 1), InputError);

  // a player whose safe set is a single vertex is pinned to it
  ProfileIndexer idx = ProfileIndexer::make({2, 2});
  std::vector<double> u(4);
  Rng rng(3);
  for (auto& v : u) v = rng.uniform();
  std::vector<double> c0(4), c1(4);
  for (std::int64_t p = 0; p < 4; ++p) {
    c0[p] = idx.action_of(p, 0) == 0 ? 0.5 : 0.0;  // only the pure action 1 is safe
    c1[p] = idx.action_of(p, 1) == 0 ? -0.4 : -0.6;
  }
  ConstrainedGame pinned = ConstrainedGame::make({2, 2}, {u, u}, {{c0}, {c1}});
  auto polys = preset_for_game(pinned, PolytopeTag::Cce);
  LearningTrace tr = run_dynamics(pinned, polys, 64, 1);
  for (std::int64_t t = 0; t < tr.rounds; ++t)
    CHECK(tr.x[t][0][1] == Approx(1.0).margin(1e-8));
  DeviationPolytope safe = polys[0];
  std::vector<double> values;
  own_action_costs(pinned, 0, 0, &values, nullptr);
  safe.add_marginal_row(values, 0.0);
  double fixed_value = 0.0;
  for (int b = 0; b < 2; ++b) fixed_value += tr.grad_sum[0](b, 1);
  CHECK(phi_regret(tr, pinned, safe, 0) ==
        Approx(fixed_value - tr.realized_utility_sum[0]).margin(1e-7));
}

TEST_CASE("unconstrained games run the plain dynamics") {
  // m = 0: every deviation is safe and the dynamics reduce to ordinary
  // coarse-correlated learning
  Rng rng(12);
  std::vector<double> u0(4), u1(4);
  for (auto& v : u0) v = rng.uniform();
  for (auto& v : u1) v = rng.uniform();
  ConstrainedGame g = ConstrainedGame::make({2, 2}, {u0, u1}, {{}, {}});
  auto polys = preset_for_game(g, PolytopeTag::Cce);
  REQUIRE(check_fixed_safe_set(g, polys).ok);
  LearningTrace tr = run_dynamics(g, polys, 512, 2);
  CorrelatedStrategy zbar;
  zbar.z = tr.zbar;
  double eps_t = 0.0;
  for (const auto& row : tr.checkpoints)
    if (row.t == tr.rounds) eps_t = std::max(eps_t, row.gap_bound);
  EquilibriumReport rep = verify(g, polys, zbar, eps_t);
  CHECK(rep.verdict);
  CHECK(rep.safety.safe);  // trivially: no constraints
}

TEST_CASE("empty safe deviation sets are reported") {
  ProfileIndexer idx = ProfileIndexer::make({2, 2});
  std::vector<double> u(4, 0.5);
  std::vector<double> c0(4), c1(4);
  for (std::int64_t p = 0; p < 4; ++p) {
    c0[p] = idx.action_of(p, 0) == 0 ? 0.5 : 0.25;  // nothing is safe
    c1[p] = -0.5;
  }
  ConstrainedGame g = ConstrainedGame::make({2, 2}, {u, u}, {{c0}, {c1}});
  try {
    run_dynamics(g, preset_for_game(g, PolytopeTag::Cce), 16, 1);
    FAIL("expected an error");
  } catch (const SolveError& e) {
    CHECK(std::string(e.what()).find("empty safe deviation set") != std::string::npos);
  }
}

TEST_CASE("regret growth stays sublinear on a seeded instance") {
  ConstrainedGame g = random_marginal_instance(2, 3, 1, 2025);
  auto polys = preset_for_game(g, PolytopeTag::Cce);
  LearningTrace tr = run_dynamics(g, polys, 1 << 12, 1);
  for (int i = 0; i < 2; ++i) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& row : tr.checkpoints) {
      if (row.player != i || row.t < 64) continue;
      const double x = std::log(static_cast<double>(row.t));
      const double y = std::log(std::max(row.regret, 1e-9));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++n;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope <= 0.6);
  }
}
