#include <catch2/catch_amalgamated.hpp>

#include "ccg/instances.hpp"
#include "ccg/selftest.hpp"

using namespace ccg;
using Catch::Approx;

namespace {

// best utility over deterministic deviations that keep the deviator's own
// expected costs nonpositive; -1 when none is safe
double best_safe_deterministic(const ConstrainedGame& g, const CorrelatedStrategy& z, int i) {
  double best = -1.0;
  for (const Deviation& dev : selftest::detail::deterministic_deviations(i, g.actions[i])) {
    CorrelatedStrategy moved = apply_deviation(g, z, dev);
    bool safe = true;
    for (double c : expected_costs(g, moved, i)) safe = safe && c <= 1e-12;
    if (safe) best = std::max(best, expected_utility(g, moved, i));
  }
  return best;
}

}  // namespace

TEST_CASE("best safe deviation at the averaged strategy") {
  ExampleOne ex = example1();
  auto polys = preset_for_game(ex.game, PolytopeTag::All);
  OracleResult r = best_safe_deviation(ex.game, polys[1], ex.z3, 1);
  CHECK(r.best_value == Approx(0.5).margin(1e-9));
  CHECK(r.gap == Approx(1.0 / 3.0).margin(1e-9));
  CHECK(polys[1].contains(r.witness, 1e-9));
  for (double c : r.safety_residuals) CHECK(c <= 1e-8);
  CHECK(best_safe_deterministic(ex.game, ex.z3, 1) == Approx(0.5).margin(1e-12));
}

TEST_CASE("best safe deviation at the equilibrium has no gap") {
  ExampleOne ex = example1();
  auto polys = preset_for_game(ex.game, PolytopeTag::All);
  OracleResult r = best_safe_deviation(ex.game, polys[1], ex.z1, 1);
  CHECK(r.best_value == Approx(1.0 / 3.0).margin(1e-9));
  CHECK(r.gap == Approx(0.0).margin(1e-9));
  CHECK(best_safe_deterministic(ex.game, ex.z1, 1) == Approx(1.0 / 3.0).margin(1e-12));

  // player 0 earns nothing everywhere: zero gap at any strategy
  OracleResult flat = best_safe_deviation(ex.game, polys[0], ex.z3, 0);
  CHECK(flat.gap == Approx(0.0).margin(1e-9));
}

TEST_CASE("the LP dominates the deterministic grid") {
  // under cost constraints the optimum may need a mixed deviation, so the
  // deterministic maximum is only a lower bound
  Rng rng(42);
  for (int t = 0; t < 40; ++t) {
    const int s = 2 + rng.index(2);
    ConstrainedGame g = random_strictly_safe_instance(2, s, 1, rng.raw());
    std::vector<double> z(g.num_profiles());
    double sum = 0.0;
    for (auto& v : z) {
      v = rng.uniform();
      sum += v;
    }
    for (auto& v : z) v /= sum;
    CorrelatedStrategy zs;
    zs.z = z;
    const int i = rng.index(2);
    OracleResult r = best_safe_deviation(g, preset_for_game(g, PolytopeTag::All)[i], zs, i);
    const double det = best_safe_deterministic(g, zs, i);
    if (det >= 0.0) CHECK(r.best_value >= det - 1e-7);
  }
}

TEST_CASE("infeasible safety systems point at the assumption") {
  std::vector<double> u(4, 0.5), hot(4, 0.5);
  ConstrainedGame g = ConstrainedGame::make({2, 2}, {u, u}, {{hot}, {hot}});
  auto polys = preset_for_game(g, PolytopeTag::All);
  try {
    best_safe_deviation(g, polys[0], CorrelatedStrategy::uniform(4), 0);
    FAIL("expected a solver error");
  } catch (const SolveError& e) {
    CHECK(std::string(e.what()).find("Assumption 2") != std::string::npos);
  }
}

TEST_CASE("strict feasibility margins") {
  ExampleOne ex = example1();
  auto polys = preset_for_game(ex.game, PolytopeTag::All);
  for (const CorrelatedStrategy* z : {&ex.z1, &ex.z2, &ex.z3}) {
    CHECK(strict_feasibility(ex.game, polys[0], *z, 0).rho_hat >= 0.5 - 1e-9);
    CHECK(strict_feasibility(ex.game, polys[1], *z, 1).rho_hat >= 0.5 - 1e-9);
  }
  // player 0 can always park on the second action at cost -1
  FeasibilityCertificate c0 = strict_feasibility(ex.game, polys[0], ex.z3, 0);
  CHECK(c0.rho_hat == Approx(1.0).margin(1e-9));

  std::vector<double> u(4, 0.0), zero(4, 0.0);
  ConstrainedGame calm = ConstrainedGame::make({2, 2}, {u, u}, {{zero}, {zero}});
  CHECK(strict_feasibility(calm, preset_for_game(calm, PolytopeTag::All)[0],
                           CorrelatedStrategy::uniform(4), 0)
            .rho_hat == Approx(0.0).margin(1e-9));
}

TEST_CASE("the gadget's relief action certifies strict feasibility") {
  GraphInstance graph;
  graph.num_vertices = 8;
  for (int i = 0; i < 8; ++i) graph.edges.emplace_back(i, (i + 1) % 8);
  GadgetParams gp = GadgetParams::make(0.5, 1.0 / 3.0, 8);
  ConstrainedGame g = hardness_gadget(graph, gp);
  CorrelatedStrategy z = completeness_strategy(graph, gp, {0, 2, 4, 6});
  auto polys = preset_for_game(g, PolytopeTag::All);
  for (int i = 0; i < 2; ++i) {
    FeasibilityCertificate cert = strict_feasibility(g, polys[i], z, i);
    CHECK(cert.rho_hat >= 1.0 / 256.0 - 1e-12);
  }
}

TEST_CASE("relaxing the safety bound never hurts") {
  Rng rng(7);
  for (int t = 0; t < 30; ++t) {
    ConstrainedGame g = random_strictly_safe_instance(2, 2 + rng.index(2), 2, rng.raw());
    auto polys = preset_for_game(g, PolytopeTag::All);
    std::vector<double> z(g.num_profiles());
    double sum = 0.0;
    for (auto& v : z) {
      v = rng.uniform();
      sum += v;
    }
    for (auto& v : z) v /= sum;
    CorrelatedStrategy zs;
    zs.z = z;
    const int i = rng.index(2);
    const double v0 = best_safe_deviation(g, polys[i], zs, i, 0.0).best_value;
    const double vh = best_safe_deviation(g, polys[i], zs, i, 0.5).best_value;
    const double v1 = best_safe_deviation(g, polys[i], zs, i, 1.0).best_value;
    CHECK(vh >= v0 - 1e-9);
    CHECK(v1 >= vh - 1e-9);
  }
}
