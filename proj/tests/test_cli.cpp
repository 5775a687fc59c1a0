// End-to-end checks of the ccg binary; the path arrives via CCG_BIN.

#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "ccg/io.hpp"

namespace fs = std::filesystem;
using Catch::Approx;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  const char* bin = std::getenv("CCG_BIN");
  REQUIRE(bin != nullptr);
  const std::string cmd = std::string(bin) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("ccg_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("generate, verify, and exit codes") {
  TempDir dir;
  RunResult gen = run("gen example1 --out-dir " + dir.path.string());
  REQUIRE(gen.exit_code == 0);
  CHECK(fs::exists(dir.file("game.json")));
  CHECK(fs::exists(dir.file("z3.json")));

  RunResult bad = run("verify --game " + dir.file("game.json") + " --strategy " +
                      dir.file("z3.json") + " --phi ALL --eps 0");
  CHECK(bad.exit_code == 1);
  ccg::json rep = ccg::json::parse(bad.out);
  CHECK(rep["verdict"] == false);
  CHECK(rep["gaps"][1].get<double>() == Approx(1.0 / 3.0).margin(1e-6));

  RunResult good = run("verify --game " + dir.file("game.json") + " --strategy " +
                       dir.file("z1.json") + " --phi ALL --eps 0");
  CHECK(good.exit_code == 0);
  CHECK(ccg::json::parse(good.out)["verdict"] == true);

  RunResult missing = run("verify --game " + dir.file("nope.json") + " --strategy " +
                          dir.file("z1.json"));
  CHECK(missing.exit_code == 2);

  RunResult badflag = run("verify --game " + dir.file("game.json") + " --strategy " +
                          dir.file("z1.json") + " --phi SOME");
  CHECK(badflag.exit_code == 2);
}

TEST_CASE("best deviation and strict feasibility from files") {
  TempDir dir;
  REQUIRE(run("gen example1 --out-dir " + dir.path.string()).exit_code == 0);
  RunResult best = run("best-dev --game " + dir.file("game.json") + " --strategy " +
                       dir.file("z3.json") + " --player 1 --phi ALL");
  REQUIRE(best.exit_code == 0);
  ccg::json j = ccg::json::parse(best.out);
  CHECK(j["best_value"].get<double>() == Approx(0.5).margin(1e-9));
  CHECK(j["gap"].get<double>() == Approx(1.0 / 3.0).margin(1e-9));

  RunResult feas = run("strict-feas --game " + dir.file("game.json") + " --strategy " +
                       dir.file("z1.json") + " --player 1 --phi ALL");
  REQUIRE(feas.exit_code == 0);
  CHECK(ccg::json::parse(feas.out)["rho_hat"].get<double>() == Approx(0.5).margin(1e-9));

  // --out writes the report to a file and keeps stdout quiet
  RunResult quiet = run("best-dev --game " + dir.file("game.json") + " --strategy " +
                        dir.file("z3.json") + " --player 1 --phi ALL --out " +
                        dir.file("report.json"));
  REQUIRE(quiet.exit_code == 0);
  CHECK(quiet.out.empty());
  ccg::json filed = ccg::json::parse(slurp(dir.file("report.json")));
  CHECK(filed["best_value"].get<double>() == Approx(0.5).margin(1e-9));
}

TEST_CASE("solving and learning end to end") {
  TempDir dir;
  REQUIRE(run("gen random --n 2 --s 3 --m 1 --seed 9 --out-dir " + dir.path.string()).exit_code ==
          0);
  ccg::ConstrainedGame g = ccg::load_game(dir.file("game.json"));
  ccg::LinearObjective obj;
  obj.coefficients = g.utilities[0];
  ccg::save_objective(dir.file("obj.json"), obj);

  RunResult solved = run("solve-special --game " + dir.file("game.json") + " --objective " +
                         dir.file("obj.json") + " --phi CCE --out-strategy " +
                         dir.file("zstar.json"));
  REQUIRE(solved.exit_code == 0);
  ccg::json sj = ccg::json::parse(solved.out);
  CHECK(sj["max_gap"].get<double>() <= 1e-6);
  RunResult checked = run("verify --game " + dir.file("game.json") + " --strategy " +
                          dir.file("zstar.json") + " --phi CCE --eps 0");
  CHECK(checked.exit_code == 0);

  RunResult learned = run("learn --game " + dir.file("game.json") +
                          " --phi CCE --rounds 64 --seed 3 --checkpoints --trace " +
                          dir.file("trace.csv") + " --zbar " + dir.file("zbar.json"));
  REQUIRE(learned.exit_code == 0);
  ccg::CorrelatedStrategy zbar = ccg::load_strategy(dir.file("zbar.json"));
  CHECK(ccg::is_safe(ccg::load_game(dir.file("game.json")), zbar).safe);
  const std::string csv = slurp(dir.file("trace.csv"));
  CHECK(csv.rfind("t,player,regret,gap_bound,max_cost_residual,utility_avg\n", 0) == 0);
  RunResult again = run("learn --game " + dir.file("game.json") +
                        " --phi CCE --rounds 64 --seed 3 --checkpoints --trace " +
                        dir.file("trace2.csv"));
  REQUIRE(again.exit_code == 0);
  CHECK(slurp(dir.file("trace2.csv")) == csv);  // same seed, same bytes

  // the mismatch between ALL deviations and the special solver is a solver error
  RunResult refused = run("solve-special --game " + dir.file("game.json") + " --objective " +
                          dir.file("obj.json") + " --phi ALL");
  CHECK(refused.exit_code == 3);
}

TEST_CASE("grid oracle and the hardness generator") {
  TempDir dir;
  REQUIRE(run("gen example1 --out-dir " + dir.path.string()).exit_code == 0);
  {
    ccg::LinearObjective obj;
    ccg::ConstrainedGame g = ccg::load_game(dir.file("game.json"));
    obj.coefficients = g.utilities[1];
    ccg::save_objective(dir.file("obj.json"), obj);
  }
  RunResult grid = run("oracle --game " + dir.file("game.json") + " --objective " +
                       dir.file("obj.json") + " --phi ALL --grid 30 --eps 1e-3");
  REQUIRE(grid.exit_code == 0);
  ccg::json gj = ccg::json::parse(grid.out);
  CHECK(gj["found"] == true);
  CHECK(gj["best_value"].get<double>() >= 1.0 / 3.0 - 1e-9);

  {
    std::ofstream out(dir.file("cycle.txt"));
    for (int i = 0; i < 8; ++i) out << i << " " << (i + 1) % 8 << "\n";
  }
  RunResult gadget = run("gen hardness --graph " + dir.file("cycle.txt") +
                         " --vertices 8 --alpha 0.5 --delta 0.333333333333333333 "
                         "--independent-set 0,2,4,6 --out-dir " +
                         dir.path.string());
  REQUIRE(gadget.exit_code == 0);
  RunResult vg = run("verify --game " + dir.file("game.json") + " --strategy " +
                     dir.file("zstar.json") + " --phi ALL --eps 0");
  CHECK(vg.exit_code == 0);
}
