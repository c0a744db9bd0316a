#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "coeff_search.hpp"
#include "experiments.hpp"
#include "order_conditions.hpp"
#include "solver.hpp"
#include "tableaux.hpp"
#include "trees.hpp"

namespace bsderk::cli {

enum ExitCode : int {
  kOk = 0,
  kRuntimeFailure = 1,  // also a search that ran out of budget
  kNegative = 2,        // check failed or search proved infeasibility
  kUsage = 64,
  kBadData = 65,
};

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Everything a subcommand may read. Values come from the JSON config file
/// first and are then overridden by flags.
struct CliConfig {
  std::string command;
  std::string emit = "md";
  std::string output;
  bool timing = false;
  unsigned threads = 0;

  unsigned order = 0;
  bool minus = false;
  bool render = false;
  int stages = 0;
  std::string tableau;
  double tol = 1e-10;
  std::uint64_t seed = 0;
  int restarts = 32;
  long max_iterations = 4000;

  int example = 0;
  std::vector<std::string> schemes;
  std::vector<int> N;
  int M = 16;
  int l = 0;
  double h = 0.0;
  std::vector<double> domain;
};

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> c = {"trees", "conditions", "check",
                                             "search", "solve",      "convergence"};
  return c;
}

/// Reads a config object. Unknown keys and mistyped values are usage errors.
inline void apply_config(const nlohmann::json& j, CliConfig& cfg) {
  if (!j.is_object()) throw UsageError("config: top level must be a JSON object");
  static const std::set<std::string> known = {
      "command", "emit",     "output",   "timing",         "threads", "order",
      "minus",   "render",   "stages",   "tableau",        "tol",     "seed",
      "restarts", "max_iterations", "example", "scheme", "N",       "M",
      "l",       "h",        "domain"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw UsageError("config: unknown key \"" + key + "\"");
    try {
      if (key == "command") cfg.command = value.get<std::string>();
      else if (key == "emit") cfg.emit = value.get<std::string>();
      else if (key == "output") cfg.output = value.get<std::string>();
      else if (key == "timing") cfg.timing = value.get<bool>();
      else if (key == "threads") cfg.threads = value.get<unsigned>();
      else if (key == "order") cfg.order = value.get<unsigned>();
      else if (key == "minus") cfg.minus = value.get<bool>();
      else if (key == "render") cfg.render = value.get<bool>();
      else if (key == "stages") cfg.stages = value.get<int>();
      else if (key == "tableau") cfg.tableau = value.get<std::string>();
      else if (key == "tol") cfg.tol = value.get<double>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "restarts") cfg.restarts = value.get<int>();
      else if (key == "max_iterations") cfg.max_iterations = value.get<long>();
      else if (key == "example") cfg.example = value.get<int>();
      else if (key == "scheme")
        cfg.schemes = value.is_array() ? value.get<std::vector<std::string>>()
                                       : std::vector<std::string>{value.get<std::string>()};
      else if (key == "N")
        cfg.N = value.is_array() ? value.get<std::vector<int>>() : std::vector<int>{value.get<int>()};
      else if (key == "M") cfg.M = value.get<int>();
      else if (key == "l") cfg.l = value.get<int>();
      else if (key == "h") cfg.h = value.get<double>();
      else if (key == "domain") cfg.domain = value.get<std::vector<double>>();
    } catch (const nlohmann::json::exception&) {
      throw UsageError("config: key \"" + key + "\" has the wrong type");
    }
  }
}

inline CliConfig load_config(const std::string& path, CliConfig cfg = {}) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file \"" + path + "\"");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("config file \"" + path + "\" is not valid JSON: " + e.what());
  }
  apply_config(j, cfg);
  return cfg;
}

inline void validate(const CliConfig& c) {
  auto need = [](bool ok, const std::string& msg) {
    if (!ok) throw UsageError(msg);
  };
  need(c.emit == "md" || c.emit == "csv" || c.emit == "json",
       "--emit must be one of md, csv, json (got \"" + c.emit + "\")");
  const auto& cmd = c.command;
  need(!cmd.empty(), "a subcommand is required: trees, conditions, check, search, solve, convergence");
  need(std::find(commands().begin(), commands().end(), cmd) != commands().end(),
       "unknown subcommand \"" + cmd + "\"");
  if (cmd == "trees" || cmd == "conditions" || cmd == "check" || cmd == "search") {
    need(c.order >= 1, cmd + ": --order is required and must be >= 1");
    need(c.order <= kMaxEnumerationOrder,
         cmd + ": --order must be <= " + std::to_string(kMaxEnumerationOrder));
  }
  if (cmd == "conditions") need(c.stages >= 0, "conditions: --stages must be >= 0");
  if (cmd == "check") need(!c.tableau.empty(), "check: --tableau is required");
  if (cmd == "check" || cmd == "search") need(c.tol > 0, cmd + ": --tol must be > 0");
  if (cmd == "search") {
    need(c.stages >= 1, "search: --stages is required and must be >= 1");
    need(c.restarts >= 1, "search: --restarts must be >= 1");
    need(c.max_iterations >= 1, "search: --max-iter must be >= 1");
  }
  if (cmd == "solve" || cmd == "convergence") {
    need(c.example == 1 || c.example == 2, cmd + ": --example must be 1 or 2");
    need(!c.schemes.empty(), cmd + ": --scheme is required");
    need(c.M >= 1 && c.M <= kMaxHermiteNodes,
         cmd + ": --M must lie in [1, " + std::to_string(kMaxHermiteNodes) + "]");
    need(c.l >= 0 && c.l + 1 <= kMaxHermiteNodes, cmd + ": --l out of range");
    need(c.h >= 0, cmd + ": --space-step must be >= 0");
    need(c.domain.empty() || (c.domain.size() == 2 && c.domain[0] <= c.domain[1]),
         cmd + ": --domain takes a,b with a <= b");
    for (int n : c.N) need(n >= 1, cmd + ": --N values must be >= 1");
  }
  if (cmd == "solve") {
    need(c.schemes.size() == 1, "solve: exactly one --scheme");
    need(c.N.size() == 1, "solve: exactly one --N value is required");
  }
}

namespace detail {

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2E", v);
  return buf;
}
inline std::string full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<Scheme> resolve_schemes(const std::vector<std::string>& sel) {
  std::vector<Scheme> out;
  for (const auto& s : sel) {
    if (s == "all") {
      for (const auto& t : table_schemes()) out.push_back(scheme_from_name(t));
      continue;
    }
    try {
      out.push_back(scheme_from_name(s));
    } catch (const TableauError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  return out;
}

/// Built-in selector when it parses as one, otherwise a tableau JSON file.
inline std::pair<std::string, ButcherTableau> resolve_tableau(const std::string& src) {
  std::string base = src.substr(0, src.find(':'));
  if (std::find(builtin_names().begin(), builtin_names().end(), base) != builtin_names().end()) {
    try {
      Scheme s = scheme_from_name(src);
      return {s.name, s.tableau};
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  try {
    return {src, load_tableau_file(src)};
  } catch (const std::exception& e) {
    throw DataError(e.what());
  }
}

inline BSDEProblem problem_for(const CliConfig& c) {
  BSDEProblem p = example_problem(c.example);
  if (c.domain.size() == 2) {
    p.a = c.domain[0];
    p.b = c.domain[1];
  }
  return p;
}

inline SolveConfig solve_config(const CliConfig& c) {
  SolveConfig s;
  s.M = c.M;
  s.l = c.l;
  s.h = c.h;
  s.threads = c.threads;
  return s;
}

inline std::string condition_text(const CrCondition& cond) {
  if (cond.row > 0) {
    std::string i = std::to_string(cond.row);
    return "Σ_j a_{" + i + "j} = c_" + i;
  }
  return render_condition(cond.tree);
}

// ------------------------------------------------------------------ commands

inline int cmd_trees(const CliConfig& c, std::ostream& out) {
  TreeSet set = c.minus ? enumerate_trees_minus(c.order) : enumerate_trees(c.order);
  if (c.emit == "json") {
    nlohmann::json j = to_json(set);
    j["minus"] = c.minus;
    out << j.dump(2) << '\n';
  } else if (c.emit == "csv") {
    out << "tree,depth,order,symmetry,factorial,alpha\n";
    for (const auto& t : set.trees)
      out << to_notation(t) << ',' << nesting_depth(t) << ',' << t.order() << ',' << symmetry(t)
          << ',' << tree_factorial(t) << ',' << alpha(t) << '\n';
  } else {
    out << "T_" << c.order << (c.minus ? "−" : "") << ": " << set.size() << " trees\n\n";
    out << "| Tree | L | Order | S | γ | α |\n|---|---|---|---|---|---|\n";
    for (const auto& t : set.trees)
      out << "| " << to_notation(t) << " | " << nesting_depth(t) << " | " << t.order() << " | "
          << symmetry(t) << " | " << tree_factorial(t) << " | " << alpha(t) << " |\n";
  }
  return kOk;
}

inline int cmd_conditions(const CliConfig& c, std::ostream& out) {
  std::vector<CrCondition> conds;
  if (c.stages > 0) {
    conds = cr_conditions(c.stages, c.order);
  } else {
    conds.push_back({0, leaf(0)});
    for (auto& t : enumerate_trees_minus(c.order).trees) conds.push_back({0, std::move(t)});
  }
  auto key = [&](const CrCondition& k) {
    if (c.stages == 0 && k.tree == leaf(0)) return std::string("A_i([ ]_0)");
    return cr_key(k.row, k.tree);
  };
  if (c.emit == "json") {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& k : conds) {
      nlohmann::json r = {{"row", k.row}, {"tree", to_notation(k.tree)}, {"key", key(k)}};
      if (c.render) r["rendered"] = condition_text(k);
      rows.push_back(r);
    }
    nlohmann::json j = {{"order", c.order}, {"count", conds.size()}, {"conditions", rows}};
    j["stages"] = c.stages > 0 ? nlohmann::json(c.stages) : nlohmann::json();
    out << j.dump(2) << '\n';
  } else if (c.emit == "csv") {
    out << "index,row,tree" << (c.render ? ",condition" : "") << '\n';
    for (std::size_t q = 0; q < conds.size(); ++q) {
      out << q + 1 << ',' << conds[q].row << ',' << to_notation(conds[q].tree);
      if (c.render) out << ",\"" << condition_text(conds[q]) << '"';
      out << '\n';
    }
  } else {
    out << "C(" << c.order << ")";
    if (c.stages > 0) out << " for m = " << c.stages;
    out << ": " << conds.size() << " conditions\n\n";
    out << (c.render ? "| # | Coefficient | Condition |\n|---|---|---|\n" : "| # | Coefficient |\n|---|---|\n");
    for (std::size_t q = 0; q < conds.size(); ++q) {
      const bool generic = c.stages == 0 && conds[q].tree == leaf(0);
      out << "| " << q + 1 << " | " << key(conds[q]) << " = 0" << (generic ? " for 0 <= i < m" : "")
          << " |";
      if (c.render) {
        std::string text = generic
                               ? condition_text(conds[q]) + ", Σ_j a_{ij} = c_i"
                               : condition_text(conds[q]);
        out << ' ' << text << " |";
      }
      out << '\n';
    }
  }
  return kOk;
}

inline int cmd_check(const CliConfig& c, std::ostream& out) {
  auto [name, tab] = resolve_tableau(c.tableau);
  ConditionReport cr = check_Cr(tab, c.order, c.tol);
  std::optional<ConditionReport> t1;
  if (c.order <= kTable1MaxOrder) t1 = check_table1(tab, c.order, c.tol);
  const bool ok = cr.passed() && (!t1 || t1->passed());
  if (c.emit == "json") {
    nlohmann::json j = {{"tableau", name}, {"order", c.order}, {"passed", ok}, {"Cr", to_json(cr)}};
    j["table1"] = t1 ? to_json(*t1) : nlohmann::json();
    out << j.dump(2) << '\n';
  } else if (c.emit == "csv") {
    out << "kind,condition,residual,passed\n";
    auto rows = [&](const ConditionReport& r) {
      for (const auto& e : r.entries)
        out << r.kind << ",\"" << e.key << "\"," << full(e.residual) << ','
            << (e.passed ? "true" : "false") << '\n';
    };
    rows(cr);
    if (t1) rows(*t1);
  } else {
    char tol[32];
    std::snprintf(tol, sizeof tol, "%.1e", c.tol);
    out << "Tableau " << name << ", order " << c.order << ", tolerance " << tol << ": "
        << (ok ? "PASS" : "FAIL") << "\n";
    auto first = [&](const ConditionReport& r) {
      if (const auto* f = r.first_failure()) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3e", f->residual);
        out << "first failure: " << f->key << " (residual " << buf << ")\n";
      }
    };
    out << "\nC(" << c.order << ")\n\n" << to_markdown(cr);
    first(cr);
    if (t1) {
      out << "\nConditions (1)-(" << t1->entries.size() << ")\n\n" << to_markdown(*t1);
      first(*t1);
    }
  }
  return ok ? kOk : kNegative;
}

inline int cmd_search(const CliConfig& c, std::ostream& out) {
  SearchSpec s;
  s.m = c.stages;
  s.r = c.order;
  s.tolerance = c.tol;
  s.seed = c.seed;
  s.restarts = c.restarts;
  s.max_iterations = c.max_iterations;
  s.threads = c.threads;
  SearchResult r = search(s);
  if (c.emit == "json") {
    nlohmann::json j = to_json(r);
    j["stages"] = c.stages;
    j["order"] = c.order;
    j["seed"] = c.seed;
    j["tolerance"] = c.tol;
    out << j.dump(2) << '\n';
  } else if (c.emit == "csv") {
    out << "stages,order,status,objective,max_residual,stationarity,iterations,restart\n"
        << c.stages << ',' << c.order << ',' << to_string(r.status) << ',' << full(r.objective)
        << ',' << full(r.max_residual) << ',' << full(r.stationarity) << ',' << r.iterations
        << ',' << r.restart << '\n';
  } else {
    out << "Search m = " << c.stages << ", r = " << c.order << ", seed " << c.seed << ": "
        << to_string(r.status) << "\n\n"
        << "| Quantity | Value |\n|---|---|\n"
        << "| objective | " << full(r.objective) << " |\n"
        << "| max residual | " << sci(r.max_residual) << " |\n";
    if (r.status != SearchStatus::found) out << "| stationarity | " << sci(r.stationarity) << " |\n";
    out << "| iterations | " << r.iterations << " |\n| restart | " << r.restart << " |\n";
    if (r.tableau) out << "\n```\n" << pretty_print(*r.tableau) << "```\n";
  }
  switch (r.status) {
    case SearchStatus::found: return kOk;
    case SearchStatus::infeasible: return kNegative;
    default: return kRuntimeFailure;
  }
}

inline int cmd_solve(const CliConfig& c, std::ostream& out) {
  const BSDEProblem p = problem_for(c);
  const Scheme s = resolve_schemes(c.schemes).front();
  SolveConfig sc = solve_config(c);
  sc.N = c.N.front();
  sc.order = s.order;
  Solution sol = solve(p, s.tableau, sc);
  const double ey = linf_error(sol.y0, p.exact_y), ez = linf_error(sol.z0, p.exact_z);
  if (c.emit == "json") {
    nlohmann::json xs = nlohmann::json::array(), ys = xs, zs = xs;
    for (long i = sol.y0.lo; i <= sol.y0.hi; ++i) {
      xs.push_back(sol.y0.x(i));
      ys.push_back(sol.y0.at(i));
      zs.push_back(sol.z0.at(i));
    }
    nlohmann::json j = {{"example", p.name}, {"scheme", s.name}, {"N", sc.N}, {"dt", sol.dt},
                        {"h", sol.h},        {"l", sol.l},       {"M", sol.M}, {"err_y", ey},
                        {"err_z", ez},       {"x", xs},          {"y", ys},    {"z", zs}};
    nlohmann::json ext = nlohmann::json::array();
    for (const auto& e : sol.level_extents) ext.push_back({e.lo, e.hi});
    j["level_extents"] = ext;
    if (c.timing) j["runtime_s"] = sol.runtime_seconds;
    out << j.dump(2) << '\n';
  } else if (c.emit == "csv") {
    out << "x,y,z,y_exact,z_exact,err_y,err_z\n";
    for (long i = sol.y0.lo; i <= sol.y0.hi; ++i) {
      const double x = sol.y0.x(i), y = sol.y0.at(i), z = sol.z0.at(i);
      const double ye = p.exact_y(0.0, x), ze = p.exact_z(0.0, x);
      out << full(x) << ',' << full(y) << ',' << full(z) << ',' << full(ye) << ',' << full(ze)
          << ',' << full(std::abs(y - ye)) << ',' << full(std::abs(z - ze)) << '\n';
    }
  } else {
    out << p.name << ", " << s.name << ", N = " << sc.N << ", M = " << sol.M << ", l = " << sol.l
        << ", h = " << sci(sol.h) << "\n\n"
        << "‖Y^0−Y_0‖∞ = " << sci(ey) << ", ‖Z^0−Z_0‖∞ = " << sci(ez);
    if (c.timing) {
      char rt[32];
      std::snprintf(rt, sizeof rt, "%.2f", sol.runtime_seconds);
      out << ", RT(s) = " << rt;
    }
    out << "\n\n| x | Y^0 | Z^0 |\n|---|---|---|\n";
    for (long i = sol.y0.lo; i <= sol.y0.hi; ++i)
      out << "| " << sci(sol.y0.x(i)) << " | " << sci(sol.y0.at(i)) << " | " << sci(sol.z0.at(i))
          << " |\n";
  }
  return kOk;
}

inline int cmd_convergence(const CliConfig& c, std::ostream& out) {
  const BSDEProblem p = problem_for(c);
  const std::vector<int> Ns = c.N.empty() ? default_step_counts() : c.N;
  std::vector<ConvergenceReport> reps;
  for (const auto& s : resolve_schemes(c.schemes))
    reps.push_back(convergence_study(p, s, Ns, solve_config(c)));
  if (c.emit == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reps) arr.push_back(to_json(r, c.timing));
    out << nlohmann::json{{"reports", arr}}.dump(2) << '\n';
  } else if (c.emit == "csv") {
    out << to_csv(reps, c.timing);
  } else {
    out << to_markdown(reps, c.timing);
  }
  return kOk;
}

// Finds "--config path" or "--config=path" ahead of the main parse.
inline std::string find_config_flag(int argc, const char* const* argv) {
  std::string path;
  for (int k = 1; k < argc; ++k) {
    std::string a = argv[k];
    if (a == "--config" && k + 1 < argc) path = argv[k + 1];
    else if (a.rfind("--config=", 0) == 0) path = a.substr(9);
  }
  return path;
}

}  // namespace detail

/// Parses argv, dispatches one subcommand and returns its exit code. Reports go
/// to `out`, diagnostics to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CliConfig cfg;
  try {
    if (auto path = detail::find_config_flag(argc, argv); !path.empty()) cfg = load_config(path);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kBadData;
  }

  CLI::App app{"Runge-Kutta schemes for BSDEs: tree calculus, order conditions, search and solver", "bsderk"};
  app.require_subcommand(0, 1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; flags override its values");
  app.add_option("--emit", cfg.emit, "Output format: md, csv or json");
  app.add_option("-o,--output", cfg.output, "Write the report to a file instead of stdout");
  app.add_flag("--timing", cfg.timing, "Include wall-clock runtimes");
  app.add_option("--threads", cfg.threads, "Worker threads (default: BSDERK_THREADS or all cores)");

  auto* trees = app.add_subcommand("trees", "List the trees of order <= r");
  trees->add_option("--order", cfg.order, "Maximum order r");
  trees->add_flag("--minus", cfg.minus, "Only trees without a [ ]_0 branch");

  auto* conds = app.add_subcommand("conditions", "List the order-r conditions C(r)");
  conds->add_option("--order", cfg.order, "Order r");
  conds->add_option("--stages", cfg.stages, "Stage count m; expands the A_i([ ]_0) rows");
  conds->add_flag("--render", cfg.render, "Print each condition as a sum over coefficients");

  auto* check = app.add_subcommand("check", "Verify a tableau against the order conditions");
  check->add_option("--tableau", cfg.tableau, "Built-in scheme selector or tableau JSON file");
  check->add_option("--order", cfg.order, "Order r");
  check->add_option("--tol", cfg.tol, "Residual tolerance");

  auto* srch = app.add_subcommand("search", "Search for a minimum-norm tableau of order r");
  srch->add_option("--stages", cfg.stages, "Stage count m");
  srch->add_option("--order", cfg.order, "Order r");
  srch->add_option("--seed", cfg.seed, "Seed of the random restarts");
  srch->add_option("--tol", cfg.tol, "Constraint tolerance");
  srch->add_option("--restarts", cfg.restarts, "Number of random restarts");
  srch->add_option("--max-iter", cfg.max_iterations, "Iteration budget per restart");

  auto* slv = app.add_subcommand("solve", "Solve one example and report Y_0, Z_0 on the window");
  auto* conv = app.add_subcommand("convergence", "Convergence study over several N");
  for (auto* sub : {slv, conv}) {
    sub->add_option("--example", cfg.example, "Example problem, 1 or 2");
    sub->add_option("--scheme", cfg.schemes,
                    "euler, rk2[:c1], rk3[:c1,c2], rk4_5, rk4_6, rk5_7, rk5_8 or all")
        ->delimiter(';');
    sub->add_option("--M", cfg.M, "Gauss-Hermite nodes");
    sub->add_option("--l", cfg.l, "Interpolation degree (default 2r+1)");
    sub->add_option("--space-step", cfg.h, "Spatial step h (default dt^((r+1)/(l+1)))");
    sub->add_option("--domain", cfg.domain, "Reporting window a,b")->delimiter(',')->expected(2);
  }
  slv->add_option("--N", cfg.N, "Number of time steps");
  conv->add_option("--N", cfg.N, "Time step counts (default 30,40,54,70,90)")->delimiter(',');
  for (auto* sub : {trees, conds, check, srch, slv, conv}) sub->fallthrough();

  // flags given on the command line replace list values taken from the config
  std::vector<int> cfg_N = cfg.N;
  std::vector<std::string> cfg_schemes = cfg.schemes;
  std::vector<double> cfg_domain = cfg.domain;
  cfg.N.clear();
  cfg.schemes.clear();
  cfg.domain.clear();
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  if (cfg.N.empty()) cfg.N = cfg_N;
  if (cfg.schemes.empty()) cfg.schemes = cfg_schemes;
  if (cfg.domain.empty()) cfg.domain = cfg_domain;
  for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();

  std::ostringstream report;
  int code = kOk;
  try {
    validate(cfg);
    const auto& cmd = cfg.command;
    if (cmd == "trees") code = detail::cmd_trees(cfg, report);
    else if (cmd == "conditions") code = detail::cmd_conditions(cfg, report);
    else if (cmd == "check") code = detail::cmd_check(cfg, report);
    else if (cmd == "search") code = detail::cmd_search(cfg, report);
    else if (cmd == "solve") code = detail::cmd_solve(cfg, report);
    else code = detail::cmd_convergence(cfg, report);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kBadData;
  } catch (const TableauError& e) {
    err << "error: " << e.what() << '\n';
    return kBadData;
  } catch (const SolverFailure& e) {
    err << "solver failure: " << e.what() << '\n';
    return kRuntimeFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }

  if (cfg.output.empty()) {
    out << report.str();
  } else {
    std::ofstream f(cfg.output, std::ios::binary);
    if (!(f << report.str())) {
      err << "error: cannot write \"" << cfg.output << "\"\n";
      return kRuntimeFailure;
    }
  }
  return code;
}

}  // namespace bsderk::cli
