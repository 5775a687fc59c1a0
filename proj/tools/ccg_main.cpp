// ccg - command-line front end for cost-constrained normal-form games:
// generators, equilibrium verification, best-safe-deviation oracles, the
// fixed-safe-set optimizer, no-regret dynamics, and the grid search oracle.
//
// Exit codes: 0 success, 1 verify verdict false, 2 input error, 3 solver error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ccg/ccg.hpp"
#include "ccg/selftest.hpp"

namespace fs = std::filesystem;

namespace {

void emit(const ccg::json& j, const std::string& out_path) {
  const std::string text = ccg::dump17(j) + "\n";
  if (out_path.empty())
    std::fputs(text.c_str(), stdout);
  else
    ccg::detail_io::write_file(out_path, text);
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw ccg::InputError("cannot parse integer list entry '" + item + "'");
    }
  }
  return out;
}

struct CommonArgs {
  std::string game_path;
  std::string phi = "ALL";
  std::string out_path;
  int threads = 0;
};

int cmd_gen_example1(const std::string& out_dir) {
  fs::create_directories(out_dir);
  ccg::ExampleOne ex = ccg::example1();
  ccg::save_game(out_dir + "/game.json", ex.game);
  ccg::save_strategy(out_dir + "/z1.json", ex.z1);
  ccg::save_strategy(out_dir + "/z2.json", ex.z2);
  ccg::save_strategy(out_dir + "/z3.json", ex.z3);
  ccg::save_deviation(out_dir + "/phi2.json", ex.phi2);
  ccg::json j;
  j["out_dir"] = out_dir;
  j["files"] = {"game.json", "z1.json", "z2.json", "z3.json", "phi2.json"};
  emit(j, "");
  return 0;
}

int cmd_gen_hardness(const std::string& graph_path, int vertices, double alpha, double delta,
                     const std::string& independent_set, const std::string& out_dir) {
  ccg::GraphInstance graph = ccg::load_graph(graph_path, vertices);
  ccg::GadgetParams params = ccg::GadgetParams::make(alpha, delta, vertices);
  ccg::ConstrainedGame game = ccg::hardness_gadget(graph, params);
  fs::create_directories(out_dir);
  ccg::save_game(out_dir + "/game.json", game);
  ccg::json j;
  j["out_dir"] = out_dir;
  j["actions"] = game.actions;
  j["m"] = game.num_constraints();
  j["gamma"] = params.gamma;
  j["eta"] = params.eta;
  j["eps"] = params.eps;
  j["kappa"] = params.kappa;
  j["planted_size"] = params.planted_size;
  if (!independent_set.empty()) {
    std::vector<int> planted = parse_int_list(independent_set);
    ccg::CorrelatedStrategy z = ccg::completeness_strategy(graph, params, planted);
    ccg::save_strategy(out_dir + "/zstar.json", z);
    j["zstar"] = "zstar.json";
  }
  emit(j, "");
  return 0;
}

int cmd_gen_random(int n, int s, int m, std::uint64_t seed, const std::string& out_dir) {
  ccg::ConstrainedGame game = ccg::random_marginal_instance(n, s, m, seed);
  fs::create_directories(out_dir);
  ccg::save_game(out_dir + "/game.json", game);
  ccg::json j;
  j["out_dir"] = out_dir;
  j["seed"] = seed;
  j["actions"] = game.actions;
  emit(j, "");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cost-constrained normal-form game toolkit"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate games and companion files");
  gen->require_subcommand(1);
  std::string gen_out_dir = ".";
  auto* gen_ex1 = gen->add_subcommand("example1", "two-player non-convexity instance");
  gen_ex1->add_option("--out-dir", gen_out_dir, "output directory");
  std::string graph_path, independent_set;
  int vertices = 0;
  double alpha = 0.5, delta = 1.0 / 3.0;
  auto* gen_hard = gen->add_subcommand("hardness", "independent-set reduction gadget");
  gen_hard->add_option("--graph", graph_path, "edge-list file, one 'u v' per line, 0-indexed")
      ->required();
  gen_hard->add_option("--vertices", vertices, "number of graph vertices")->required();
  gen_hard->add_option("--alpha", alpha, "target approximation factor");
  gen_hard->add_option("--delta", delta, "gap exponent in (0,1)");
  gen_hard->add_option("--independent-set", independent_set,
                       "comma-separated vertex list; also writes zstar.json");
  gen_hard->add_option("--out-dir", gen_out_dir, "output directory");
  int rn = 2, rs = 2, rm = 1;
  std::uint64_t rseed = 1;
  auto* gen_rand = gen->add_subcommand("random", "random own-action-cost instance");
  gen_rand->add_option("--n", rn, "players");
  gen_rand->add_option("--s", rs, "actions per player");
  gen_rand->add_option("--m", rm, "constraints per player");
  gen_rand->add_option("--seed", rseed, "RNG seed");
  gen_rand->add_option("--out-dir", gen_out_dir, "output directory");

  // verify
  CommonArgs va;
  std::string strategy_path;
  double eps = 0.0, gap_tol = ccg::defaults::kGapTol, feas_tol = ccg::defaults::kFeasibilityTol;
  auto* vcmd = app.add_subcommand("verify", "check a constrained eps-Phi-equilibrium");
  vcmd->add_option("--game", va.game_path, "game JSON file")->required();
  vcmd->add_option("--strategy", strategy_path, "strategy JSON file")->required();
  vcmd->add_option("--phi", va.phi, "ALL | CCE | file:PATH");
  vcmd->add_option("--eps", eps, "incentive slack");
  vcmd->add_option("--gap-tol", gap_tol, "verdict tolerance on gaps");
  vcmd->add_option("--feas-tol", feas_tol, "safety tolerance");
  vcmd->add_option("--out", va.out_path, "write the report here instead of stdout");

  // best-dev
  CommonArgs ba;
  std::string bstrategy_path;
  int bplayer = 0;
  auto* bcmd = app.add_subcommand("best-dev", "best safe deviation of one player");
  bcmd->add_option("--game", ba.game_path, "game JSON file")->required();
  bcmd->add_option("--strategy", bstrategy_path, "strategy JSON file")->required();
  bcmd->add_option("--player", bplayer, "player index (0-based)")->required();
  bcmd->add_option("--phi", ba.phi, "ALL | CCE | file:PATH");
  bcmd->add_option("--out", ba.out_path, "write the result here instead of stdout");

  // strict-feas
  CommonArgs fa;
  std::string fstrategy_path;
  int fplayer = 0;
  auto* fcmd = app.add_subcommand("strict-feas", "strict-feasibility margin at a strategy");
  fcmd->add_option("--game", fa.game_path, "game JSON file")->required();
  fcmd->add_option("--strategy", fstrategy_path, "strategy JSON file")->required();
  fcmd->add_option("--player", fplayer, "player index (0-based)")->required();
  fcmd->add_option("--phi", fa.phi, "ALL | CCE | file:PATH");
  fcmd->add_option("--out", fa.out_path, "write the result here instead of stdout");

  // solve-special
  CommonArgs sa;
  sa.phi = "CCE";
  std::string objective_path, out_strategy;
  double cut_tol = 1e-9;
  auto* scmd = app.add_subcommand("solve-special",
                                  "maximize a linear objective over equilibria (fixed safe set)");
  scmd->add_option("--game", sa.game_path, "game JSON file")->required();
  scmd->add_option("--objective", objective_path, "objective JSON file")->required();
  scmd->add_option("--phi", sa.phi, "CCE | file:PATH (must keep the safe set fixed)");
  scmd->add_option("--tol", cut_tol, "cut violation threshold");
  scmd->add_option("--out", sa.out_path, "write the report here instead of stdout");
  scmd->add_option("--out-strategy", out_strategy, "also write the optimizer z* to this file");

  // learn
  CommonArgs la;
  la.phi = "CCE";
  std::int64_t rounds = 1024;
  std::uint64_t lseed = 1;
  std::string trace_path;
  bool checkpoints = false;
  auto* lcmd = app.add_subcommand("learn", "decentralized no-regret dynamics");
  lcmd->add_option("--game", la.game_path, "game JSON file")->required();
  lcmd->add_option("--phi", la.phi, "CCE | file:PATH (must keep the safe set fixed)");
  lcmd->add_option("--rounds", rounds, "number of rounds T");
  lcmd->add_option("--seed", lseed, "RNG seed (recorded in the trace)");
  lcmd->add_option("--trace", trace_path, "write a CSV trace here");
  lcmd->add_flag("--checkpoints", checkpoints, "emit one trace row per power-of-two round");
  lcmd->add_option("--out", la.out_path, "write the summary here instead of stdout");
  std::string zbar_path;
  lcmd->add_option("--zbar", zbar_path, "write the averaged strategy here");

  // oracle
  CommonArgs oa;
  std::string o_objective_path;
  int grid_k = 60;
  double oracle_eps = 1e-3;
  std::int64_t budget = 50000000;
  auto* ocmd = app.add_subcommand("oracle", "grid brute-force over eps-equilibria");
  ocmd->add_option("--game", oa.game_path, "game JSON file")->required();
  ocmd->add_option("--objective", o_objective_path, "objective JSON file")->required();
  ocmd->add_option("--phi", oa.phi, "ALL | CCE | file:PATH");
  ocmd->add_option("--grid", grid_k, "grid denominator");
  ocmd->add_option("--eps", oracle_eps, "equilibrium slack for grid candidates");
  ocmd->add_option("--budget", budget, "node budget; partial results are flagged");
  ocmd->add_option("--threads", oa.threads, "worker threads (0 = single)");
  ocmd->add_option("--out", oa.out_path, "write the result here instead of stdout");

  // selftest
  std::uint64_t st_seed = 1;
  double st_budget = 300.0;
  bool st_acceptance_only = false;
  auto* tcmd = app.add_subcommand("selftest", "run the property and acceptance suite");
  tcmd->add_option("--seed", st_seed, "seed for the property generators");
  tcmd->add_option("--budget", st_budget, "time budget in seconds for property cases");
  tcmd->add_flag("--acceptance-only", st_acceptance_only, "run only the acceptance criteria");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    if (gen_ex1->parsed()) return cmd_gen_example1(gen_out_dir);
    if (gen_hard->parsed())
      return cmd_gen_hardness(graph_path, vertices, alpha, delta, independent_set, gen_out_dir);
    if (gen_rand->parsed()) return cmd_gen_random(rn, rs, rm, rseed, gen_out_dir);

    if (vcmd->parsed()) {
      ccg::ConstrainedGame g = ccg::load_game(va.game_path);
      ccg::CorrelatedStrategy z = ccg::load_strategy(strategy_path);
      auto polys = ccg::resolve_polytopes(g, va.phi);
      ccg::EquilibriumReport rep = ccg::verify(g, polys, z, eps, {gap_tol, feas_tol});
      emit(ccg::report_to_json(rep), va.out_path);
      return rep.verdict ? 0 : 1;
    }
    if (bcmd->parsed()) {
      ccg::ConstrainedGame g = ccg::load_game(ba.game_path);
      ccg::CorrelatedStrategy z = ccg::load_strategy(bstrategy_path);
      auto polys = ccg::resolve_polytopes(g, ba.phi);
      g.check_player(bplayer);
      emit(ccg::oracle_to_json(ccg::best_safe_deviation(g, polys[bplayer], z, bplayer)),
           ba.out_path);
      return 0;
    }
    if (fcmd->parsed()) {
      ccg::ConstrainedGame g = ccg::load_game(fa.game_path);
      ccg::CorrelatedStrategy z = ccg::load_strategy(fstrategy_path);
      auto polys = ccg::resolve_polytopes(g, fa.phi);
      g.check_player(fplayer);
      emit(ccg::certificate_to_json(ccg::strict_feasibility(g, polys[fplayer], z, fplayer)),
           fa.out_path);
      return 0;
    }
    if (scmd->parsed()) {
      ccg::ConstrainedGame g = ccg::load_game(sa.game_path);
      auto polys = ccg::resolve_polytopes(g, sa.phi);
      ccg::LinearObjective obj = ccg::load_objective(objective_path);
      ccg::SolveOptions opts;
      opts.cut_tol = cut_tol;
      ccg::SolveReport rep = ccg::solve_special(g, polys, obj, opts);
      emit(ccg::solve_report_to_json(rep), sa.out_path);
      if (!out_strategy.empty()) ccg::save_strategy(out_strategy, rep.z);
      return 0;
    }
    if (lcmd->parsed()) {
      ccg::ConstrainedGame g = ccg::load_game(la.game_path);
      auto polys = ccg::resolve_polytopes(g, la.phi);
      ccg::LearningTrace trace = ccg::run_dynamics(g, polys, rounds, lseed);
      if (!trace_path.empty()) ccg::write_trace_csv(trace_path, trace, !checkpoints);
      if (!zbar_path.empty()) {
        ccg::CorrelatedStrategy zbar;
        zbar.z = trace.zbar;
        ccg::save_strategy(zbar_path, zbar);
      }
      emit(ccg::learn_summary_to_json(trace), la.out_path);
      return 0;
    }
    if (ocmd->parsed()) {
      ccg::ConstrainedGame g = ccg::load_game(oa.game_path);
      auto polys = ccg::resolve_polytopes(g, oa.phi);
      ccg::LinearObjective obj = ccg::load_objective(o_objective_path);
      obj.check(g);
      ccg::BruteOptions bo;
      bo.grid_k = grid_k;
      bo.eps = oracle_eps;
      bo.node_budget = budget;
      bo.threads = oa.threads > 0 ? oa.threads : 1;
      emit(ccg::brute_to_json(ccg::brute_oracle(g, polys, obj.coefficients, bo)), oa.out_path);
      return 0;
    }
    if (tcmd->parsed()) {
      const auto& cases = ccg::selftest::all_cases();
      int failed = 0;
      int shared = 0;
      for (const auto& c : cases)
        if (c.time_limit == 0.0) ++shared;
      const double slice = shared > 0 ? st_budget / shared : st_budget;
      for (const auto& c : cases) {
        if (st_acceptance_only && c.criterion == 0) continue;
        auto o = ccg::selftest::run_case(c, st_seed, c.time_limit > 0.0 ? c.time_limit : slice);
        std::printf("[%s]%s %s (%.2fs)%s%s\n", o.pass ? "PASS" : "FAIL",
                    o.budget_limited ? " (budget-limited)" : "", o.name.c_str(), o.seconds,
                    o.message.empty() ? "" : " -- ", o.message.c_str());
        failed += o.pass ? 0 : 1;
      }
      return failed == 0 ? 0 : 3;
    }
  } catch (const ccg::InputError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 2;
  } catch (const ccg::SolveError& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 2;
}
