#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ccg/game.hpp"

namespace ccg {

inline constexpr int kMaxCustomRows = 10000;

enum class PolytopeTag { All, Cce, Custom };

inline std::string to_string(PolytopeTag t) {
  switch (t) {
    case PolytopeTag::All: return "ALL";
    case PolytopeTag::Cce: return "CCE";
    default: return "CUSTOM";
  }
}

// One linear inequality over deviation matrices:
//   sum_{b,a} coeff[b,a] * phi[b,a] <= bound.
struct PolytopeRow {
  Matrix coeff;
  double bound = 0.0;
};

// A deviation set for one player: the row-stochastic box (rows on the
// simplex, entries >= 0) intersected with a finite list of inequality rows.
// Presets:
//   ALL  - no extra rows; every deviation is allowed.
//   CCE  - all rows of phi are forced equal (recommendation-independent
//          play), stored as paired inequalities phi[b,a] = phi[0,a].
struct DeviationPolytope {
  int owner = 0;
  int side = 0;  // number of actions of the owner
  PolytopeTag tag = PolytopeTag::All;
  std::vector<PolytopeRow> rows;
  int preset_row_count = 0;

  static DeviationPolytope preset(int owner, int side, PolytopeTag tag) {
    if (side < 1) throw InputError("deviation polytope needs side >= 1");
    DeviationPolytope p;
    p.owner = owner;
    p.side = side;
    p.tag = tag;
    if (tag == PolytopeTag::Cce) {
      for (int b = 1; b < side; ++b) {
        for (int a = 0; a < side; ++a) {
          Matrix m(side, side, 0.0);
          m(b, a) = 1.0;
          m(0, a) = -1.0;
          p.rows.push_back({m, 0.0});
          Matrix neg(side, side, 0.0);
          neg(b, a) = -1.0;
          neg(0, a) = 1.0;
          p.rows.push_back({neg, 0.0});
        }
      }
    }
    p.preset_row_count = static_cast<int>(p.rows.size());
    return p;
  }

  static DeviationPolytope custom(int owner, int side, std::vector<PolytopeRow> rows) {
    if (static_cast<int>(rows.size()) > kMaxCustomRows)
      throw InputError("custom polytope exceeds row cap of " + std::to_string(kMaxCustomRows));
    DeviationPolytope p;
    p.owner = owner;
    p.side = side;
    p.tag = PolytopeTag::Custom;
    for (auto& r : rows) {
      if (r.coeff.rows != side || r.coeff.cols != side)
        throw InputError("polytope row must be " + std::to_string(side) + "x" +
                         std::to_string(side));
    }
    p.rows = std::move(rows);
    return p;
  }

  // Adds sum_a weight[a] * h[a] <= bound, where h is the common row of a CCE
  // deviation; encoded so it is also a valid inequality on raw matrices.
  void add_marginal_row(const std::vector<double>& weight, double bound) {
    if (static_cast<int>(weight.size()) != side)
      throw InputError("marginal row needs one weight per action");
    Matrix m(side, side, 0.0);
    for (int b = 0; b < side; ++b)
      for (int a = 0; a < side; ++a) m(b, a) = weight[a] / static_cast<double>(side);
    rows.push_back({m, bound});
  }

  bool contains(const Deviation& dev, double tol = defaults::kFeasibilityTol) const {
    if (dev.owner != owner) return false;
    if (dev.phi.rows != side || dev.phi.cols != side) return false;
    for (int b = 0; b < side; ++b) {
      double sum = 0.0;
      for (int a = 0; a < side; ++a) {
        const double v = dev.phi(b, a);
        if (v < -tol || v > 1.0 + tol) return false;
        sum += v;
      }
      if (std::abs(sum - 1.0) > tol) return false;
    }
    for (const auto& r : rows)
      if (frobenius_dot(r.coeff, dev.phi) > r.bound + tol) return false;
    return true;
  }

  // True when membership factors through the common row h of a CCE matrix:
  // the preset is CCE and every extra row has identical coefficient rows.
  bool has_h_representation() const {
    if (tag != PolytopeTag::Cce) return false;
    for (std::size_t k = preset_row_count; k < rows.size(); ++k) {
      const Matrix& m = rows[k].coeff;
      for (int b = 1; b < side; ++b)
        for (int a = 0; a < side; ++a)
          if (m(b, a) != m(0, a)) return false;
    }
    return true;
  }

  // Extra rows reduced to h-space: pairs (q, d) with sum_a q[a] h[a] <= d.
  std::vector<std::pair<std::vector<double>, double>> h_rows() const {
    std::vector<std::pair<std::vector<double>, double>> out;
    for (std::size_t k = preset_row_count; k < rows.size(); ++k) {
      std::vector<double> q(side, 0.0);
      for (int a = 0; a < side; ++a)
        for (int b = 0; b < side; ++b) q[a] += rows[k].coeff(b, a);
      out.emplace_back(std::move(q), rows[k].bound);
    }
    return out;
  }
};

inline std::vector<DeviationPolytope> preset_for_game(const ConstrainedGame& g, PolytopeTag tag) {
  std::vector<DeviationPolytope> polys;
  polys.reserve(g.num_players());
  for (int i = 0; i < g.num_players(); ++i)
    polys.push_back(DeviationPolytope::preset(i, g.actions[i], tag));
  return polys;
}

// Witness of a cost tensor that is not own-action-only: two profiles that
// share the owner's action but carry different costs.
struct MarginalityWitness {
  int player = 0;
  int constraint = 0;
  int action = 0;
  std::int64_t profile_a = 0;
  std::int64_t profile_b = 0;
  double delta = 0.0;

  std::string describe() const {
    return "cost " + std::to_string(constraint) + " of player " + std::to_string(player) +
           " differs by " + fmt(delta) + " across profiles " + std::to_string(profile_a) +
           " and " + std::to_string(profile_b) + " sharing own action " + std::to_string(action);
  }
};

// If player i's j-th cost depends only on their own action, fills `values`
// (one cost per own action) and returns true; otherwise returns false and
// fills the witness.
inline bool own_action_costs(const ConstrainedGame& g, int i, int j, std::vector<double>* values,
                             MarginalityWitness* witness, double tol = 1e-12) {
  g.check_player(i);
  const int s = g.actions[i];
  std::vector<double> first(s, 0.0);
  std::vector<std::int64_t> first_profile(s, -1);
  for (std::int64_t p = 0; p < g.num_profiles(); ++p) {
    const int a = g.idx.action_of(p, i);
    const double v = g.costs[i][j][p];
    if (first_profile[a] < 0) {
      first_profile[a] = p;
      first[a] = v;
    } else if (std::abs(v - first[a]) > tol) {
      if (witness) *witness = {i, j, a, first_profile[a], p, v - first[a]};
      return false;
    }
  }
  if (values) *values = std::move(first);
  return true;
}

// For own-action-only costs and a recommendation-independent deviation with
// common row h, the deviating player's expected cost is
//   sum_a c_i(a, .) h[a]
// regardless of the underlying correlated strategy.
inline std::vector<double> tilde_cost(const ConstrainedGame& g, int i, const Deviation& dev,
                                      double tol = defaults::kFeasibilityTol) {
  detail::check_deviation(g, dev);
  if (dev.owner != i) throw InputError("deviation owner does not match player");
  const int s = g.actions[i];
  std::vector<double> h(s, 0.0);
  for (int b = 0; b < s; ++b)
    for (int a = 0; a < s; ++a) {
      if (std::abs(dev.phi(b, a) - dev.phi(0, a)) > tol)
        throw InputError("deviation rows differ at (" + std::to_string(b) + "," +
                         std::to_string(a) + "); not recommendation-independent");
      h[a] += dev.phi(b, a) / static_cast<double>(s);
    }
  std::vector<double> out(g.num_constraints(), 0.0);
  for (int j = 0; j < g.num_constraints(); ++j) {
    std::vector<double> values;
    MarginalityWitness w;
    if (!own_action_costs(g, i, j, &values, &w))
      throw InputError("marginal cost shortcut unavailable: " + w.describe());
    out[j] = dot(values, h);
  }
  return out;
}

}  // namespace ccg
