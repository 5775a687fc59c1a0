#pragma once

#include <utility>
#include <vector>

#include "ccg/oracle.hpp"

namespace ccg {

// Verdict for "z is a constrained eps-Phi-equilibrium": z is safe and no
// player gains more than eps through any deviation that keeps their own
// costs nonpositive.
struct EquilibriumReport {
  SafetyReport safety;
  std::vector<double> gaps;          // per player: best safe deviation value - u_i(z)
  std::vector<Deviation> witnesses;  // per player: a best safe deviation
  double max_gap = 0.0;
  double eps = 0.0;
  double gap_tol = defaults::kGapTol;
  bool verdict = false;
};

struct VerifyOptions {
  double gap_tol = defaults::kGapTol;
  double feas_tol = defaults::kFeasibilityTol;
};

inline EquilibriumReport verify(const ConstrainedGame& g,
                                const std::vector<DeviationPolytope>& polys,
                                const CorrelatedStrategy& z, double eps,
                                VerifyOptions opt = {}) {
  if (static_cast<int>(polys.size()) != g.num_players())
    throw InputError("expected one deviation polytope per player");
  EquilibriumReport rep;
  rep.eps = eps;
  rep.gap_tol = opt.gap_tol;
  rep.safety = is_safe(g, z, opt.feas_tol);
  rep.gaps.resize(g.num_players());
  rep.witnesses.resize(g.num_players());
  rep.max_gap = 0.0;
  for (int i = 0; i < g.num_players(); ++i) {
    OracleResult r = best_safe_deviation(g, polys[i], z, i);
    rep.gaps[i] = r.gap;
    rep.witnesses[i] = std::move(r.witness);
    rep.max_gap = std::max(rep.max_gap, rep.gaps[i]);
  }
  rep.verdict = rep.safety.safe && rep.max_gap <= eps + opt.gap_tol;
  return rep;
}

// Expected incentive gap over a finite distribution mu of safe strategies:
//   E_{z ~ mu} [ max_{phi safe at z} u_i(phi <> z) - u_i(z) ]  per player.
// This is the quantity a distribution-level guarantee controls; it can be
// nonpositive while the averaged strategy itself has a large gap.
inline std::vector<double> expectation_ic(
    const ConstrainedGame& g, const std::vector<DeviationPolytope>& polys,
    const std::vector<std::pair<double, CorrelatedStrategy>>& mu, double feas_tol = defaults::kFeasibilityTol) {
  if (mu.empty()) throw InputError("expectation_ic: empty distribution");
  double wsum = 0.0;
  for (const auto& [w, z] : mu) {
    if (w < -1e-12) throw InputError("expectation_ic: negative weight");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-9)
    throw InputError("expectation_ic: weights sum to " + fmt(wsum) + ", expected 1");
  std::vector<double> acc(g.num_players(), 0.0);
  for (const auto& [w, z] : mu) {
    if (w <= 0.0) continue;
    SafetyReport s = is_safe(g, z, feas_tol);
    if (!s.safe)
      throw InputError("expectation_ic: support point with cost residual " + fmt(s.max_residual));
    for (int i = 0; i < g.num_players(); ++i)
      acc[i] += w * best_safe_deviation(g, polys[i], z, i).gap;
  }
  return acc;
}

}  // namespace ccg
