#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "solver.hpp"
#include "tableaux.hpp"

namespace bsderk {

/// σ = 1, T = 1 on [0, π]; Y = e^{t²} ln(sin X + 3).
inline BSDEProblem example1() {
  BSDEProblem p;
  p.name = "Example 1";
  p.sigma = 1.0;
  p.T = 1.0;
  p.a = 0.0;
  p.b = M_PI;
  p.f = [](double t, double, double y, double z) {
    const double e = std::exp(t * t);
    return 0.5 * (e - 4.0 * t * y - 3.0 * std::exp(t * t - y / e) + z * z / e);
  };
  const double eT = std::exp(p.T * p.T);
  p.phi = [eT](double x) { return eT * std::log(std::sin(x) + 3.0); };
  p.dphi = [eT](double x) { return eT * std::cos(x) / (std::sin(x) + 3.0); };
  p.exact_y = [](double t, double x) { return std::exp(t * t) * std::log(std::sin(x) + 3.0); };
  p.exact_z = [](double t, double x) {
    return std::exp(t * t) * std::cos(x) / (std::sin(x) + 3.0);
  };
  return p;
}

/// T = 1 on [-1, 1]; Y = logistic(t + X), Z = σ Y (1 - Y).
inline BSDEProblem example2(double sigma = 0.25) {
  if (!(sigma > 0)) throw std::invalid_argument("example2: sigma must be > 0");
  BSDEProblem p;
  p.name = "Example 2";
  p.sigma = sigma;
  p.T = 1.0;
  p.a = -1.0;
  p.b = 1.0;
  const double s = p.sigma;
  const double k = (2.0 + s * s) / (2.0 * s * s);
  p.f = [s, k](double, double, double y, double z) { return s * (y - k) * z; };
  auto logistic = [](double u) { return 1.0 / (1.0 + std::exp(-u)); };
  const double T = p.T;
  p.phi = [=](double x) { return logistic(T + x); };
  p.dphi = [=](double x) {
    double v = logistic(T + x);
    return v * (1.0 - v);
  };
  p.exact_y = [=](double t, double x) { return logistic(t + x); };
  p.exact_z = [=](double t, double x) {
    double v = logistic(t + x);
    return s * v * (1.0 - v);
  };
  return p;
}

inline BSDEProblem example_problem(int id) {
  if (id == 1) return example1();
  if (id == 2) return example2();
  throw std::invalid_argument("example must be 1 or 2");
}

inline const std::vector<int>& default_step_counts() {
  static const std::vector<int> Ns = {30, 40, 54, 70, 90};
  return Ns;
}

/// Scheme selectors of the full convergence tables, in display order.
inline const std::vector<std::string>& table_schemes() {
  static const std::vector<std::string> s = {"euler",      "rk2:1/2",    "rk2:2/3",
                                             "rk3:2/3,1/3", "rk3:1/2,1/4", "rk3:3/4,1/2",
                                             "rk4_5",      "rk4_6",      "rk5_7",
                                             "rk5_8"};
  return s;
}

/// Max-norm error at t = 0 over the reported nodes.
inline double linf_error(const GridFunction& g, const std::function<double(double, double)>& exact) {
  double e = 0;
  for (long i = g.lo; i <= g.hi; ++i) e = std::max(e, std::abs(g.at(i) - exact(0.0, g.x(i))));
  return e;
}

/// Max-norm error over the nodes inside [a, b].
inline double linf_error(const GridFunction& g, const std::function<double(double, double)>& exact,
                         double a, double b) {
  double e = 0;
  bool any = false;
  for (long i = g.lo; i <= g.hi; ++i) {
    const double x = g.x(i);
    if (x < a || x > b) continue;
    any = true;
    e = std::max(e, std::abs(g.at(i) - exact(0.0, x)));
  }
  if (!any) throw std::invalid_argument("linf_error: window contains no grid node");
  return e;
}

/// Least-squares slope of ln(err) against ln(dt); empty when any error is 0.
inline std::optional<double> fit_rate(const std::vector<double>& dt, const std::vector<double>& err) {
  if (dt.size() != err.size() || dt.size() < 2) return std::nullopt;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(dt.size());
  for (std::size_t q = 0; q < dt.size(); ++q) {
    if (!(err[q] > 0) || !(dt[q] > 0)) return std::nullopt;
    double x = std::log(dt[q]), y = std::log(err[q]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double den = n * sxx - sx * sx;
  if (den == 0) return std::nullopt;
  return (n * sxy - sx * sy) / den;
}

struct ConvergenceRow {
  int N;
  double dt;
  double err_y;
  double err_z;
  double runtime_seconds;
};

struct ConvergenceReport {
  std::string example;
  std::string scheme;
  unsigned order = 0;
  int M = 0;
  int l = 0;
  std::vector<ConvergenceRow> rows;
  std::optional<double> cr_y, cr_z;
};

inline ConvergenceReport convergence_study(const BSDEProblem& p, const Scheme& s,
                                           const std::vector<int>& Ns, SolveConfig cfg = {}) {
  if (Ns.size() < 2) throw std::invalid_argument("convergence_study: need at least two step counts");
  ConvergenceReport rep;
  rep.example = p.name;
  rep.scheme = s.name;
  rep.order = s.order;
  cfg.order = s.order;
  rep.M = cfg.M;
  rep.l = cfg.degree();
  std::vector<double> dts, ey, ez;
  for (int N : Ns) {
    cfg.N = N;
    Solution sol = solve(p, s.tableau, cfg);
    ConvergenceRow row{N, sol.dt, linf_error(sol.y0, p.exact_y, p.a, p.b),
                       linf_error(sol.z0, p.exact_z, p.a, p.b), sol.runtime_seconds};
    rep.rows.push_back(row);
    dts.push_back(row.dt);
    ey.push_back(row.err_y);
    ez.push_back(row.err_z);
  }
  rep.cr_y = fit_rate(dts, ey);
  rep.cr_z = fit_rate(dts, ez);
  return rep;
}

// ---------------------------------------------------------------- rendering

namespace detail {
inline std::string sci3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2E", v);
  return buf;
}
inline std::string fixed3(std::optional<double> v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", *v);
  return buf;
}
inline std::string full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace detail

/// Markdown table in the layout Scheme | N | errors | RT(s) | CR. Runtimes are
/// shown only on request so that default output is reproducible byte for byte.
inline std::string to_markdown(const std::vector<ConvergenceReport>& reps, bool timing = false) {
  std::string out;
  if (!reps.empty())
    out += reps.front().example + " (M = " + std::to_string(reps.front().M) + ")\n\n";
  out += "| Scheme | N | ‖Y^0−Y_0‖∞ | ‖Z^0−Z_0‖∞ | RT(s) | CR of Y^0 | CR of Z^0 |\n";
  out += "|---|---|---|---|---|---|---|\n";
  for (const auto& rep : reps) {
    for (std::size_t q = 0; q < rep.rows.size(); ++q) {
      const auto& r = rep.rows[q];
      char rt[32] = "-";
      if (timing) std::snprintf(rt, sizeof rt, "%.2f", r.runtime_seconds);
      out += "| " + (q == 0 ? rep.scheme : std::string()) + " | " + std::to_string(r.N) + " | " +
             detail::sci3(r.err_y) + " | " + detail::sci3(r.err_z) + " | " + rt + " | " +
             (q == 0 ? detail::fixed3(rep.cr_y) : std::string()) + " | " +
             (q == 0 ? detail::fixed3(rep.cr_z) : std::string()) + " |\n";
    }
  }
  return out;
}

inline std::string to_csv(const std::vector<ConvergenceReport>& reps, bool timing = false) {
  std::string out = "example,scheme,order,M,l,N,dt,err_y,err_z,runtime_s,cr_y,cr_z\n";
  for (const auto& rep : reps)
    for (const auto& r : rep.rows) {
      out += rep.example + ",\"" + rep.scheme + "\"," + std::to_string(rep.order) + "," +
             std::to_string(rep.M) + "," + std::to_string(rep.l) + "," + std::to_string(r.N) +
             "," + detail::full(r.dt) + "," + detail::full(r.err_y) + "," +
             detail::full(r.err_z) + "," + (timing ? detail::full(r.runtime_seconds) : "") + "," +
             (rep.cr_y ? detail::full(*rep.cr_y) : "") + "," +
             (rep.cr_z ? detail::full(*rep.cr_z) : "") + "\n";
    }
  return out;
}

inline nlohmann::json to_json(const ConvergenceReport& rep, bool timing = false) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : rep.rows) {
    nlohmann::json row = {{"N", r.N}, {"dt", r.dt}, {"err_y", r.err_y}, {"err_z", r.err_z}};
    if (timing) row["runtime_s"] = r.runtime_seconds;
    rows.push_back(row);
  }
  auto opt = [](std::optional<double> v) { return v ? nlohmann::json(*v) : nlohmann::json(); };
  return {{"example", rep.example}, {"scheme", rep.scheme}, {"order", rep.order},
          {"M", rep.M},             {"l", rep.l},           {"rows", rows},
          {"cr_y", opt(rep.cr_y)},  {"cr_z", opt(rep.cr_z)}};
}

}  // namespace bsderk
