#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ccg/instances.hpp"

namespace ccg {

using json = nlohmann::json;

// JSON serializer that prints every float with 17 significant digits, so a
// dumped double reparses to the identical bit pattern.
inline void dump17(const json& j, std::string& out) {
  switch (j.type()) {
    case json::value_t::null:
      out += "null";
      break;
    case json::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      break;
    case json::value_t::number_integer:
      out += std::to_string(j.get<std::int64_t>());
      break;
    case json::value_t::number_unsigned:
      out += std::to_string(j.get<std::uint64_t>());
      break;
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) throw InputError("cannot serialize a non-finite number");
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      break;
    }
    case json::value_t::string: {
      out += '"';
      for (char c : j.get<std::string>()) {
        switch (c) {
          case '"': out += "\\\""; break;
          case '\\': out += "\\\\"; break;
          case '\n': out += "\\n"; break;
          case '\t': out += "\\t"; break;
          case '\r': out += "\\r"; break;
          default:
            if (static_cast<unsigned char>(c) < 0x20) {
              char buf[8];
              std::snprintf(buf, sizeof buf, "\\u%04x", c);
              out += buf;
            } else {
              out += c;
            }
        }
      }
      out += '"';
      break;
    }
    case json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& el : j) {
        if (!first) out += ',';
        first = false;
        dump17(el, out);
      }
      out += ']';
      break;
    }
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        dump17(json(it.key()), out);
        out += ':';
        dump17(it.value(), out);
      }
      out += '}';
      break;
    }
    default:
      throw InputError("unsupported JSON value");
  }
}

inline std::string dump17(const json& j) {
  std::string out;
  dump17(j, out);
  return out;
}

namespace detail_io {

inline json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
  return j;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << content;
  if (!out) throw InputError("write to " + path + " failed");
}

inline const json& field(const json& j, const char* name, const std::string& where) {
  if (!j.is_object() || !j.contains(name))
    throw InputError(where + ": missing field '" + name + "'");
  return j.at(name);
}

inline std::vector<double> double_array(const json& j, const std::string& where) {
  if (!j.is_array()) throw InputError(where + ": expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& el : j) {
    if (!el.is_number()) throw InputError(where + ": expected an array of numbers");
    out.push_back(el.get<double>());
  }
  return out;
}

}  // namespace detail_io

inline json game_to_json(const ConstrainedGame& g) {
  json j;
  j["n"] = g.num_players();
  j["actions"] = g.actions;
  j["m"] = g.num_constraints();
  json utils = json::array();
  for (const auto& u : g.utilities) utils.push_back(u);
  j["utilities"] = std::move(utils);
  json costs = json::array();
  for (const auto& player_costs : g.costs) {
    json per = json::array();
    for (const auto& c : player_costs) per.push_back(c);
    costs.push_back(std::move(per));
  }
  j["costs"] = std::move(costs);
  return j;
}

inline ConstrainedGame game_from_json(const json& j, const std::string& where = "game") {
  using detail_io::field;
  const int n = field(j, "n", where).get<int>();
  std::vector<int> actions = field(j, "actions", where).get<std::vector<int>>();
  if (static_cast<int>(actions.size()) != n)
    throw InputError(where + ": 'actions' must list " + std::to_string(n) + " entries");
  const int m = field(j, "m", where).get<int>();
  const json& utils = field(j, "utilities", where);
  if (!utils.is_array() || static_cast<int>(utils.size()) != n)
    throw InputError(where + ": 'utilities' must hold one tensor per player");
  std::vector<std::vector<double>> utilities;
  for (const auto& u : utils) utilities.push_back(detail_io::double_array(u, where + ".utilities"));
  const json& costs_j = field(j, "costs", where);
  if (!costs_j.is_array() || static_cast<int>(costs_j.size()) != n)
    throw InputError(where + ": 'costs' must hold one list per player");
  std::vector<std::vector<std::vector<double>>> costs;
  for (const auto& per : costs_j) {
    if (!per.is_array() || static_cast<int>(per.size()) != m)
      throw InputError(where + ": each player needs exactly m cost tensors");
    std::vector<std::vector<double>> list;
    for (const auto& c : per) list.push_back(detail_io::double_array(c, where + ".costs"));
    costs.push_back(std::move(list));
  }
  return ConstrainedGame::make(std::move(actions), std::move(utilities), std::move(costs));
}

inline ConstrainedGame load_game(const std::string& path) {
  return game_from_json(detail_io::parse_file(path), path);
}

inline void save_game(const std::string& path, const ConstrainedGame& g) {
  detail_io::write_file(path, dump17(game_to_json(g)) + "\n");
}

inline json strategy_to_json(const CorrelatedStrategy& z) {
  json j;
  j["z"] = z.z;
  return j;
}

inline CorrelatedStrategy strategy_from_json(const json& j, const std::string& where = "strategy") {
  return CorrelatedStrategy::ingest(
      detail_io::double_array(detail_io::field(j, "z", where), where + ".z"));
}

inline CorrelatedStrategy load_strategy(const std::string& path) {
  return strategy_from_json(detail_io::parse_file(path), path);
}

inline void save_strategy(const std::string& path, const CorrelatedStrategy& z) {
  detail_io::write_file(path, dump17(strategy_to_json(z)) + "\n");
}

inline json deviation_to_json(const Deviation& d) {
  json rows = json::array();
  for (int b = 0; b < d.phi.rows; ++b) {
    std::vector<double> row(d.phi.cols);
    for (int a = 0; a < d.phi.cols; ++a) row[a] = d.phi(b, a);
    rows.push_back(row);
  }
  json j;
  j["owner"] = d.owner;
  j["phi"] = std::move(rows);
  return j;
}

inline Deviation deviation_from_json(const json& j, const std::string& where = "deviation") {
  using detail_io::field;
  const int owner = field(j, "owner", where).get<int>();
  const json& rows = field(j, "phi", where);
  if (!rows.is_array() || rows.empty()) throw InputError(where + ": 'phi' must be a matrix");
  const int s = static_cast<int>(rows.size());
  Matrix phi(s, s, 0.0);
  for (int b = 0; b < s; ++b) {
    std::vector<double> row = detail_io::double_array(rows[b], where + ".phi");
    if (static_cast<int>(row.size()) != s) throw InputError(where + ": 'phi' must be square");
    for (int a = 0; a < s; ++a) phi(b, a) = row[a];
  }
  return Deviation::ingest(owner, std::move(phi));
}

inline Deviation load_deviation(const std::string& path) {
  return deviation_from_json(detail_io::parse_file(path), path);
}

inline void save_deviation(const std::string& path, const Deviation& d) {
  detail_io::write_file(path, dump17(deviation_to_json(d)) + "\n");
}

inline LinearObjective load_objective(const std::string& path) {
  const json j = detail_io::parse_file(path);
  LinearObjective obj;
  obj.coefficients =
      detail_io::double_array(detail_io::field(j, "coefficients", path), path + ".coefficients");
  return obj;
}

inline void save_objective(const std::string& path, const LinearObjective& obj) {
  json j;
  j["coefficients"] = obj.coefficients;
  detail_io::write_file(path, dump17(j) + "\n");
}

inline DeviationPolytope polytope_from_json(const json& j, int side,
                                            const std::string& where = "polytope") {
  using detail_io::field;
  const int owner = field(j, "owner", where).get<int>();
  std::vector<PolytopeRow> rows;
  for (const auto& row : field(j, "rows", where)) {
    const json& mj = field(row, "M", where + ".rows");
    if (!mj.is_array() || static_cast<int>(mj.size()) != side)
      throw InputError(where + ": row matrix must be " + std::to_string(side) + "x" +
                       std::to_string(side));
    Matrix m(side, side, 0.0);
    for (int b = 0; b < side; ++b) {
      std::vector<double> r = detail_io::double_array(mj[b], where + ".rows.M");
      if (static_cast<int>(r.size()) != side)
        throw InputError(where + ": row matrix must be square");
      for (int a = 0; a < side; ++a) m(b, a) = r[a];
    }
    rows.push_back({std::move(m), field(row, "d", where + ".rows").get<double>()});
  }
  return DeviationPolytope::custom(owner, side, std::move(rows));
}

// --phi ALL | CCE | file:PATH. A polytope file holds either a single
// {owner, rows} object (remaining players default to ALL) or an array with
// one object per player.
inline std::vector<DeviationPolytope> resolve_polytopes(const ConstrainedGame& g,
                                                        const std::string& selector) {
  if (selector == "ALL" || selector == "all") return preset_for_game(g, PolytopeTag::All);
  if (selector == "CCE" || selector == "cce") return preset_for_game(g, PolytopeTag::Cce);
  if (selector.rfind("file:", 0) == 0) {
    const std::string path = selector.substr(5);
    const json j = detail_io::parse_file(path);
    std::vector<DeviationPolytope> polys = preset_for_game(g, PolytopeTag::All);
    auto assign = [&](const json& pj) {
      const int owner = detail_io::field(pj, "owner", path).get<int>();
      g.check_player(owner);
      polys[owner] = polytope_from_json(pj, g.actions[owner], path);
    };
    if (j.is_array())
      for (const auto& pj : j) assign(pj);
    else
      assign(j);
    return polys;
  }
  throw InputError("unknown deviation set '" + selector + "' (expected ALL, CCE, or file:PATH)");
}

// Plain edge list, one "u v" pair per line, 0-indexed; '#' starts a comment.
inline GraphInstance parse_graph(std::istream& in, int vertices) {
  GraphInstance gr;
  gr.num_vertices = vertices;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    int u, v;
    if (!(ls >> u)) continue;
    if (!(ls >> v)) throw InputError("edge list line " + std::to_string(lineno) + ": missing endpoint");
    gr.edges.emplace_back(u, v);
  }
  gr.validate();
  return gr;
}

inline GraphInstance load_graph(const std::string& path, int vertices) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return parse_graph(in, vertices);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

inline json safety_to_json(const SafetyReport& s) {
  json j;
  j["safe"] = s.safe;
  j["max_cost_residual"] = s.max_residual;
  json per = json::array();
  for (const auto& r : s.residuals) per.push_back(r);
  j["residuals"] = std::move(per);
  return j;
}

inline json report_to_json(const EquilibriumReport& r) {
  json j;
  j["verdict"] = r.verdict;
  j["eps"] = r.eps;
  j["gap_tol"] = r.gap_tol;
  j["safety"] = safety_to_json(r.safety);
  j["gaps"] = r.gaps;
  j["max_gap"] = r.max_gap;
  json wit = json::array();
  for (const auto& w : r.witnesses) wit.push_back(deviation_to_json(w));
  j["witnesses"] = std::move(wit);
  return j;
}

inline json oracle_to_json(const OracleResult& r) {
  json j;
  j["player"] = r.player;
  j["best_value"] = r.best_value;
  j["gap"] = r.gap;
  j["witness"] = deviation_to_json(r.witness);
  j["safety_residuals"] = r.safety_residuals;
  return j;
}

inline json certificate_to_json(const FeasibilityCertificate& c) {
  json j;
  j["player"] = c.player;
  j["rho_hat"] = c.rho_hat;
  j["witness"] = deviation_to_json(c.witness);
  return j;
}

inline json solve_report_to_json(const SolveReport& r) {
  json j;
  j["objective_value"] = r.objective;
  j["iterations"] = r.iterations;
  j["cuts_per_player"] = r.cuts_per_player;
  j["max_gap"] = r.max_gap;
  j["max_cost_residual"] = r.max_cost_residual;
  j["z"] = r.z.z;
  return j;
}

inline json brute_to_json(const BruteResult& r) {
  json j;
  j["found"] = r.found;
  j["exhaustive"] = r.exhaustive;
  j["nodes"] = r.nodes;
  j["candidates"] = r.candidates;
  if (r.found) {
    j["best_value"] = r.best_value;
    j["best_z"] = r.best_z.z;
  } else {
    j["best_value"] = nullptr;
    j["best_z"] = nullptr;
  }
  return j;
}

inline std::string trace_csv(const LearningTrace& trace, bool checkpoints_only_final = false) {
  std::string out = "t,player,regret,gap_bound,max_cost_residual,utility_avg\n";
  char buf[200];
  for (const auto& row : trace.checkpoints) {
    if (checkpoints_only_final && row.t != trace.rounds) continue;
    std::snprintf(buf, sizeof buf, "%lld,%d,%.17g,%.17g,%.17g,%.17g\n",
                  static_cast<long long>(row.t), row.player, row.regret, row.gap_bound,
                  row.max_cost_residual, row.utility_avg);
    out += buf;
  }
  return out;
}

inline void write_trace_csv(const std::string& path, const LearningTrace& trace,
                            bool checkpoints_only_final = false) {
  detail_io::write_file(path, trace_csv(trace, checkpoints_only_final));
}

inline json learn_summary_to_json(const LearningTrace& trace) {
  json j;
  j["rounds"] = trace.rounds;
  j["seed"] = trace.seed;
  j["final_regret"] = trace.final_regret;
  json bounds = json::array();
  for (double r : trace.final_regret) bounds.push_back(r / static_cast<double>(trace.rounds));
  j["final_gap_bound"] = std::move(bounds);
  j["zbar"] = trace.zbar;
  return j;
}

}  // namespace ccg
