#include <catch2/catch_amalgamated.hpp>

#include "ccg/instances.hpp"

using namespace ccg;
using Catch::Approx;

TEST_CASE("the two pure-ish strategies verify, their average does not") {
  ExampleOne ex = example1();
  auto polys = preset_for_game(ex.game, PolytopeTag::All);

  EquilibriumReport r1 = verify(ex.game, polys, ex.z1, 0.0);
  CHECK(r1.verdict);
  CHECK(r1.max_gap <= 1e-6);
  CHECK(r1.safety.safe);

  EquilibriumReport r2 = verify(ex.game, polys, ex.z2, 0.0);
  CHECK(r2.verdict);
  CHECK(r2.max_gap <= 1e-6);

  EquilibriumReport r3 = verify(ex.game, polys, ex.z3, 0.0);
  CHECK_FALSE(r3.verdict);
  CHECK(r3.safety.safe);  // safe, but not incentive-compatible
  CHECK(r3.gaps[1] == Approx(1.0 / 3.0).margin(1e-6));
  CHECK(r3.gaps[0] == Approx(0.0).margin(1e-9));
}

TEST_CASE("a slack of one forgives any bounded gap") {
  ExampleOne ex = example1();
  auto polys = preset_for_game(ex.game, PolytopeTag::All);
  EquilibriumReport r = verify(ex.game, polys, ex.z3, 1.0);
  CHECK(r.verdict);
}

TEST_CASE("unsafe strategies fail the verdict but still report gaps") {
  ExampleOne ex = example1();
  auto polys = preset_for_game(ex.game, PolytopeTag::All);
  EquilibriumReport r = verify(ex.game, polys, CorrelatedStrategy::point_mass(4, 1), 1.0);
  CHECK_FALSE(r.verdict);
  CHECK_FALSE(r.safety.safe);
  CHECK(r.safety.max_residual == Approx(1.0).margin(1e-12));
  CHECK(r.gaps.size() == 2);  // gaps computed as diagnostics
}

TEST_CASE("gap is never meaningfully negative at safe strategies") {
  // the identity deviation is always safe once z is safe, so the best safe
  // deviation earns at least u_i(z)
  Rng rng(64);
  for (int t = 0; t < 30; ++t) {
    ConstrainedGame g = random_strictly_safe_instance(2, 2 + rng.index(2), 1, rng.raw());
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
    if (!is_safe(g, zs).safe) continue;
    EquilibriumReport r = verify(g, polys, zs, 1.0);
    for (double gap : r.gaps) CHECK(gap >= -1e-7);
  }
}

TEST_CASE("distribution-level incentives can hold where the average breaks") {
  ExampleOne ex = example1();
  auto polys = preset_for_game(ex.game, PolytopeTag::All);

  std::vector<std::pair<double, CorrelatedStrategy>> mu{{0.5, ex.z1}, {0.5, ex.z2}};
  std::vector<double> gaps = expectation_ic(ex.game, polys, mu);
  CHECK(gaps[0] <= 1e-6);
  CHECK(gaps[1] <= 1e-6);

  std::vector<std::pair<double, CorrelatedStrategy>> point{{1.0, ex.z3}};
  std::vector<double> bad = expectation_ic(ex.game, polys, point);
  CHECK(bad[1] == Approx(1.0 / 3.0).margin(1e-6));

  std::vector<std::pair<double, CorrelatedStrategy>> eq{{1.0, ex.z1}};
  std::vector<double> fine = expectation_ic(ex.game, polys, eq);
  CHECK(std::abs(fine[1]) <= 1e-6);
}

TEST_CASE("expectation over strategies validates its inputs") {
  ExampleOne ex = example1();
  auto polys = preset_for_game(ex.game, PolytopeTag::All);
  std::vector<std::pair<double, CorrelatedStrategy>> heavy{{0.9, ex.z1}, {0.9, ex.z2}};
  CHECK_THROWS_AS(expectation_ic(ex.game, polys, heavy), InputError);
  std::vector<std::pair<double, CorrelatedStrategy>> unsafe{
      {1.0, CorrelatedStrategy::point_mass(4, 1)}};
  CHECK_THROWS_AS(expectation_ic(ex.game, polys, unsafe), InputError);
  CHECK_THROWS_AS(expectation_ic(ex.game, polys, {}), InputError);
}

TEST_CASE("verification needs one polytope per player") {
  ExampleOne ex = example1();
  std::vector<DeviationPolytope> one{DeviationPolytope::preset(0, 2, PolytopeTag::All)};
  CHECK_THROWS_AS(verify(ex.game, one, ex.z1, 0.0), InputError);
}
