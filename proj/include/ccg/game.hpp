#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "ccg/common.hpp"

namespace ccg {

// Joint action profiles are stored flat, row-major with player 0 slowest:
// for action counts (s_0, ..., s_{n-1}),
//   flat(a) = a_0 * s_1 * s_2 * ... + a_1 * s_2 * ... + ... + a_{n-1}.
struct ProfileIndexer {
  std::vector<int> counts;
  std::vector<std::int64_t> strides;
  std::int64_t size = 1;

  static ProfileIndexer make(const std::vector<int>& counts) {
    if (counts.empty()) throw InputError("at least one player required");
    ProfileIndexer ix;
    ix.counts = counts;
    ix.strides.assign(counts.size(), 1);
    const int n = static_cast<int>(counts.size());
    for (int i = n - 1; i >= 0; --i) {
      if (counts[i] < 1)
        throw InputError("player " + std::to_string(i) + " needs a positive action count");
      if (i < n - 1) ix.strides[i] = ix.strides[i + 1] * counts[i + 1];
    }
    ix.size = ix.strides[0] * counts[0];
    return ix;
  }

  int players() const { return static_cast<int>(counts.size()); }

  std::int64_t flat(const std::vector<int>& actions) const {
    if (static_cast<int>(actions.size()) != players())
      throw InputError("profile has wrong number of entries");
    std::int64_t p = 0;
    for (int i = 0; i < players(); ++i) {
      if (actions[i] < 0 || actions[i] >= counts[i])
        throw InputError("action " + std::to_string(actions[i]) + " out of range for player " +
                         std::to_string(i));
      p += static_cast<std::int64_t>(actions[i]) * strides[i];
    }
    return p;
  }

  std::vector<int> actions_of(std::int64_t p) const {
    std::vector<int> a(players());
    for (int i = 0; i < players(); ++i) a[i] = action_of(p, i);
    return a;
  }

  int action_of(std::int64_t p, int player) const {
    return static_cast<int>((p / strides[player]) % counts[player]);
  }

  std::int64_t with_action(std::int64_t p, int player, int a) const {
    return p + (static_cast<std::int64_t>(a) - action_of(p, player)) * strides[player];
  }
};

// A normal-form game where every player i additionally carries m cost
// tensors c_{i,j}; a strategy is admissible for player i only when all m
// expected costs are <= 0. Utilities live in [0,1], costs in [-1,1].
struct ConstrainedGame {
  std::vector<int> actions;                              // per-player action counts
  std::vector<std::vector<double>> utilities;            // [player][flat profile]
  std::vector<std::vector<std::vector<double>>> costs;   // [player][constraint][flat profile]
  ProfileIndexer idx;

  int num_players() const { return static_cast<int>(actions.size()); }
  int num_constraints() const { return costs.empty() ? 0 : static_cast<int>(costs[0].size()); }
  std::int64_t num_profiles() const { return idx.size; }

  void check_player(int i) const {
    if (i < 0 || i >= num_players())
      throw InputError("player index " + std::to_string(i) + " out of range");
  }

  static ConstrainedGame make(std::vector<int> actions,
                              std::vector<std::vector<double>> utilities,
                              std::vector<std::vector<std::vector<double>>> costs,
                              double range_tol = 1e-9) {
    ConstrainedGame g;
    g.idx = ProfileIndexer::make(actions);
    g.actions = std::move(actions);
    const int n = g.num_players();
    const std::int64_t P = g.idx.size;
    if (static_cast<int>(utilities.size()) != n)
      throw InputError("expected one utility tensor per player");
    if (static_cast<int>(costs.size()) != n)
      throw InputError("expected one cost tensor list per player");
    const int m = costs.empty() ? 0 : static_cast<int>(costs[0].size());
    for (int i = 0; i < n; ++i) {
      if (static_cast<std::int64_t>(utilities[i].size()) != P)
        throw InputError("utility tensor of player " + std::to_string(i) + " has length " +
                         std::to_string(utilities[i].size()) + ", expected " + std::to_string(P));
      for (double v : utilities[i])
        if (!(v >= -range_tol && v <= 1.0 + range_tol))
          throw InputError("utility entry " + fmt(v) + " of player " + std::to_string(i) +
                           " outside [0,1]");
      if (static_cast<int>(costs[i].size()) != m)
        throw InputError("player " + std::to_string(i) + " has " +
                         std::to_string(costs[i].size()) + " cost tensors, expected " +
                         std::to_string(m));
      for (int j = 0; j < m; ++j) {
        if (static_cast<std::int64_t>(costs[i][j].size()) != P)
          throw InputError("cost tensor " + std::to_string(j) + " of player " + std::to_string(i) +
                           " has length " + std::to_string(costs[i][j].size()) + ", expected " +
                           std::to_string(P));
        for (double v : costs[i][j])
          if (!(v >= -1.0 - range_tol && v <= 1.0 + range_tol))
            throw InputError("cost entry " + fmt(v) + " of player " + std::to_string(i) +
                             " outside [-1,1]");
      }
    }
    g.utilities = std::move(utilities);
    g.costs = std::move(costs);
    return g;
  }
};

// Probability distribution over joint action profiles.
struct CorrelatedStrategy {
  std::vector<double> z;

  // Entries in [-clamp_tol, 0) are clamped to zero and the vector is
  // renormalized; anything more negative, or a sum off by more than
  // sum_tol, is rejected.
  static CorrelatedStrategy ingest(std::vector<double> values, double clamp_tol = 1e-12,
                                   double sum_tol = 1e-9) {
    double sum = 0.0;
    for (double& v : values) {
      if (v < -clamp_tol)
        throw InputError("strategy entry " + fmt(v) + " is negative beyond tolerance");
      if (v < 0.0) v = 0.0;
      sum += v;
    }
    if (std::abs(sum - 1.0) > sum_tol)
      throw InputError("strategy entries sum to " + fmt(sum) + ", expected 1");
    for (double& v : values) v /= sum;
    CorrelatedStrategy s;
    s.z = std::move(values);
    return s;
  }

  static CorrelatedStrategy point_mass(std::int64_t profiles, std::int64_t at) {
    CorrelatedStrategy s;
    s.z.assign(profiles, 0.0);
    s.z[at] = 1.0;
    return s;
  }

  static CorrelatedStrategy uniform(std::int64_t profiles) {
    CorrelatedStrategy s;
    s.z.assign(profiles, 1.0 / static_cast<double>(profiles));
    return s;
  }
};

// Row-stochastic transformation of one player's recommendations:
// phi(b, a) is the probability of playing a when b is recommended.
struct Deviation {
  int owner = 0;
  Matrix phi;

  static Deviation ingest(int owner, Matrix phi, double tol = 1e-9) {
    if (phi.rows != phi.cols) throw InputError("deviation matrix must be square");
    for (int b = 0; b < phi.rows; ++b) {
      double sum = 0.0;
      for (int a = 0; a < phi.cols; ++a) {
        double v = phi(b, a);
        if (!(v >= -tol && v <= 1.0 + tol))
          throw InputError("deviation entry " + fmt(v) + " outside [0,1]");
        sum += v;
      }
      if (std::abs(sum - 1.0) > tol)
        throw InputError("deviation row " + std::to_string(b) + " sums to " + fmt(sum));
    }
    Deviation d;
    d.owner = owner;
    d.phi = std::move(phi);
    return d;
  }

  static Deviation identity(int owner, int side) { return {owner, Matrix::identity(side)}; }
};

namespace detail {
inline void check_strategy(const ConstrainedGame& g, const CorrelatedStrategy& z) {
  if (static_cast<std::int64_t>(z.z.size()) != g.num_profiles())
    throw InputError("strategy has " + std::to_string(z.z.size()) + " entries, expected " +
                     std::to_string(g.num_profiles()));
}

inline void check_deviation(const ConstrainedGame& g, const Deviation& dev) {
  g.check_player(dev.owner);
  const int s = g.actions[dev.owner];
  if (dev.phi.rows != s || dev.phi.cols != s)
    throw InputError("deviation of player " + std::to_string(dev.owner) + " must be " +
                     std::to_string(s) + "x" + std::to_string(s) + ", got " +
                     std::to_string(dev.phi.rows) + "x" + std::to_string(dev.phi.cols));
}
}  // namespace detail

// (phi <> z)[a_i, a_-i] = sum_b phi[b, a_i] z[b, a_-i]: the strategy obtained
// when the owner filters recommendations through phi and everyone else obeys.
inline CorrelatedStrategy apply_deviation(const ConstrainedGame& g, const CorrelatedStrategy& z,
                                          const Deviation& dev) {
  detail::check_strategy(g, z);
  detail::check_deviation(g, dev);
  const int i = dev.owner;
  const int s = g.actions[i];
  const std::int64_t stride = g.idx.strides[i];
  std::vector<double> out(g.num_profiles(), 0.0);
  for (std::int64_t p = 0; p < g.num_profiles(); ++p) {
    const double zp = z.z[p];
    if (zp == 0.0) continue;
    const int b = g.idx.action_of(p, i);
    const std::int64_t base = p - static_cast<std::int64_t>(b) * stride;
    for (int a = 0; a < s; ++a) out[base + a * stride] += dev.phi(b, a) * zp;
  }
  CorrelatedStrategy r;
  r.z = std::move(out);
  return r;
}

inline double expected_utility(const ConstrainedGame& g, const CorrelatedStrategy& z, int i) {
  g.check_player(i);
  detail::check_strategy(g, z);
  return dot(g.utilities[i], z.z);
}

inline std::vector<double> expected_costs(const ConstrainedGame& g, const CorrelatedStrategy& z,
                                          int i) {
  g.check_player(i);
  detail::check_strategy(g, z);
  std::vector<double> c(g.num_constraints());
  for (int j = 0; j < g.num_constraints(); ++j) c[j] = dot(g.costs[i][j], z.z);
  return c;
}

struct SafetyReport {
  bool safe = true;
  double max_residual = 0.0;                    // largest expected cost over all (i, j)
  std::vector<std::vector<double>> residuals;   // [player][constraint]
};

inline SafetyReport is_safe(const ConstrainedGame& g, const CorrelatedStrategy& z,
                            double tol = defaults::kFeasibilityTol) {
  detail::check_strategy(g, z);
  SafetyReport r;
  r.max_residual = -std::numeric_limits<double>::infinity();
  r.residuals.resize(g.num_players());
  for (int i = 0; i < g.num_players(); ++i) {
    r.residuals[i] = expected_costs(g, z, i);
    for (double v : r.residuals[i]) r.max_residual = std::max(r.max_residual, v);
  }
  if (g.num_players() == 0 || g.num_constraints() == 0) r.max_residual = 0.0;
  r.safe = r.max_residual <= tol;
  return r;
}

// G[b][a] = sum_{a_-i} u_i(a, a_-i) z[b, a_-i], so that
// u_i(phi <> z) = <phi, G> for every deviation phi of player i.
inline Matrix payoff_gradient(const ConstrainedGame& g, const CorrelatedStrategy& z, int i,
                              const std::vector<double>& payoff) {
  g.check_player(i);
  detail::check_strategy(g, z);
  const int s = g.actions[i];
  const std::int64_t stride = g.idx.strides[i];
  Matrix grad(s, s, 0.0);
  for (std::int64_t p = 0; p < g.num_profiles(); ++p) {
    const double zp = z.z[p];
    if (zp == 0.0) continue;
    const int b = g.idx.action_of(p, i);
    const std::int64_t base = p - static_cast<std::int64_t>(b) * stride;
    for (int a = 0; a < s; ++a) grad(b, a) += payoff[base + a * stride] * zp;
  }
  return grad;
}

inline Matrix utility_gradient(const ConstrainedGame& g, const CorrelatedStrategy& z, int i) {
  return payoff_gradient(g, z, i, g.utilities[i]);
}

inline Matrix cost_gradient(const ConstrainedGame& g, const CorrelatedStrategy& z, int i, int j) {
  return payoff_gradient(g, z, i, g.costs[i][j]);
}

// payoff tensor pushed through phi: out[p] = sum_a phi[b_p, a] payoff[p | a_i := a].
// <z, out> equals <phi <> z, payoff> for every z.
inline std::vector<double> pushed_payoff(const ConstrainedGame& g, const Deviation& dev,
                                         const std::vector<double>& payoff) {
  detail::check_deviation(g, dev);
  const int i = dev.owner;
  const int s = g.actions[i];
  const std::int64_t stride = g.idx.strides[i];
  std::vector<double> out(g.num_profiles(), 0.0);
  for (std::int64_t p = 0; p < g.num_profiles(); ++p) {
    const int b = g.idx.action_of(p, i);
    const std::int64_t base = p - static_cast<std::int64_t>(b) * stride;
    double acc = 0.0;
    for (int a = 0; a < s; ++a) acc += dev.phi(b, a) * payoff[base + a * stride];
    out[p] = acc;
  }
  return out;
}

}  // namespace ccg
