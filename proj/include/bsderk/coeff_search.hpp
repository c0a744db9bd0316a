#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "order_conditions.hpp"
#include "parallel.hpp"
#include "tableau.hpp"

namespace bsderk {

/// Forward-mode value with a dense gradient; an empty gradient means zero.
struct Jet {
  double v = 0.0;
  std::vector<double> d;

  Jet() = default;
  Jet(double value) : v(value) {}  // NOLINT: implicit by design
  static Jet variable(double value, std::size_t n, std::size_t k) {
    Jet j(value);
    j.d.assign(n, 0.0);
    j.d[k] = 1.0;
    return j;
  }

  friend Jet operator+(const Jet& x, const Jet& y) {
    Jet r(x.v + y.v);
    if (x.d.empty()) {
      r.d = y.d;
    } else {
      r.d = x.d;
      for (std::size_t k = 0; k < y.d.size(); ++k) r.d[k] += y.d[k];
    }
    return r;
  }
  friend Jet operator-(const Jet& x, double c) {
    Jet r = x;
    r.v -= c;
    return r;
  }
  friend Jet operator*(const Jet& x, const Jet& y) {
    Jet r(x.v * y.v);
    const std::size_t n = std::max(x.d.size(), y.d.size());
    if (n) r.d.assign(n, 0.0);
    for (std::size_t k = 0; k < x.d.size(); ++k) r.d[k] += x.d[k] * y.v;
    for (std::size_t k = 0; k < y.d.size(); ++k) r.d[k] += x.v * y.d[k];
    return r;
  }
  friend Jet operator*(const Jet& x, double c) {
    Jet r(x.v * c);
    r.d = x.d;
    for (double& e : r.d) e *= c;
    return r;
  }
};

enum class SearchStatus { found, infeasible, budget_exhausted };

inline std::string to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::found: return "found";
    case SearchStatus::infeasible: return "infeasible";
    default: return "budget-exhausted";
  }
}

struct SearchSpec {
  int m = 1;
  unsigned r = 1;
  std::vector<double> c;            // c_0..c_m; empty selects c_i = 1 - i/m
  double tolerance = 1e-10;         // max |A| accepted as satisfied
  long max_iterations = 4000;       // solver iterations per restart
  int restarts = 32;
  std::uint64_t seed = 0;
  unsigned threads = 0;             // 0 reads the environment
};

struct SearchResult {
  SearchStatus status = SearchStatus::budget_exhausted;
  std::optional<ButcherTableau> tableau;  // present when found
  double objective = 0;                   // sum a^2 + sum b^2
  double max_residual = 0;                // max |A| over C(r)
  double stationarity = 0;                // |J^T g|_inf of the best stalled restart
  long iterations = 0;                    // summed over restarts
  int restart = -1;                       // index that produced the reported point
  std::optional<bool> table1_passed;      // cross-check for r <= 5 when found
};

/// Thresholds of the infeasibility test.
inline constexpr double kInfeasibleResidual = 1e-4;
inline constexpr double kInfeasibleStationarity = 1e-8;

namespace detail {

/// Bits of a 64-bit draw mapped to [-1, 1) without relying on library distributions.
inline double uniform_pm1(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

class SearchProblem {
 public:
  explicit SearchProblem(const SearchSpec& s) : m_(s.m) {
    c_ = s.c;
    if (c_.empty())
      for (int i = 0; i <= m_; ++i) c_.push_back(1.0 - static_cast<double>(i) / m_);
    for (const auto& cond : cr_conditions(m_, s.r)) {
      rows_.push_back(cond.row);
      nodes_.push_back(plan_.add(cond.tree));
    }
    n_ = static_cast<std::size_t>(m_ * (m_ - 1) / 2 + m_);
  }

  std::size_t vars() const { return n_; }
  std::size_t constraints() const { return rows_.size(); }

  // variables: a(i, j) for 1 <= i < j <= m row by row, then b_1..b_m
  ButcherTableau tableau(const Eigen::VectorXd& x) const {
    ButcherTableau t(m_);
    t.c_ = c_;
    std::size_t k = 0;
    for (int i = 1; i <= m_; ++i)
      for (int j = i + 1; j <= m_; ++j) t.a(i, j) = x(static_cast<Eigen::Index>(k++));
    for (int j = 1; j <= m_; ++j) t.b(j) = x(static_cast<Eigen::Index>(k++));
    return t;
  }

  void constraints(const Eigen::VectorXd& x, Eigen::VectorXd& g, Eigen::MatrixXd& J) const {
    BasicTableau<Jet> t(m_);
    t.c_ = c_;
    std::size_t k = 0;
    for (int i = 1; i <= m_; ++i)
      for (int j = i + 1; j <= m_; ++j, ++k)
        t.a(i, j) = Jet::variable(x(static_cast<Eigen::Index>(k)), n_, k);
    for (int j = 1; j <= m_; ++j, ++k) t.b(j) = Jet::variable(x(static_cast<Eigen::Index>(k)), n_, k);
    auto A = plan_.evaluate(t);
    const auto nc = static_cast<Eigen::Index>(rows_.size());
    g.resize(nc);
    J.setZero(nc, static_cast<Eigen::Index>(n_));
    for (Eigen::Index q = 0; q < nc; ++q) {
      const Jet& v = A[nodes_[static_cast<std::size_t>(q)]][static_cast<std::size_t>(rows_[static_cast<std::size_t>(q)])];
      g(q) = v.v;
      for (std::size_t p = 0; p < v.d.size(); ++p) J(q, static_cast<Eigen::Index>(p)) = v.d[p];
    }
  }

 private:
  int m_;
  std::vector<double> c_;
  ElementaryPlan plan_;
  std::vector<int> rows_;
  std::vector<std::size_t> nodes_;
  std::size_t n_;
};

/// Levenberg-Marquardt on 0.5 |R(x)|^2. fn(x, R, J) fills residual and Jacobian.
/// Returns iterations spent; stops on a small gradient, a stalled step or the cap.
template <typename Fn>
long levenberg_marquardt(Fn&& fn, Eigen::VectorXd& x, long cap, double gtol) {
  Eigen::VectorXd R, Rn;
  Eigen::MatrixXd J, Jn;
  fn(x, R, J);
  double cost = 0.5 * R.squaredNorm();
  double nu = 1e-3 * std::max(1.0, (J.transpose() * J).diagonal().maxCoeff());
  double grow = 2.0;
  long it = 0;
  while (it < cap) {
    ++it;
    Eigen::VectorXd grad = J.transpose() * R;
    if (grad.lpNorm<Eigen::Infinity>() <= gtol) break;
    Eigen::MatrixXd H = J.transpose() * J;
    H.diagonal().array() += nu;
    Eigen::VectorXd step = H.ldlt().solve(-grad);
    if (!step.allFinite()) break;
    if (step.norm() <= 1e-15 * (1.0 + x.norm())) break;
    Eigen::VectorXd xn = x + step;
    fn(xn, Rn, Jn);
    double ncost = 0.5 * Rn.squaredNorm();
    double pred = -(step.dot(grad) + 0.5 * step.dot((J.transpose() * J) * step));
    double rho = pred > 0 ? (cost - ncost) / pred : -1.0;
    if (std::isfinite(ncost) && rho > 0) {
      x = std::move(xn);
      R = std::move(Rn);
      J = std::move(Jn);
      cost = ncost;
      nu *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
      grow = 2.0;
    } else {
      nu *= grow;
      grow *= 2.0;
      if (!std::isfinite(nu) || nu > 1e300) break;
    }
  }
  return it;
}

struct RestartOutcome {
  Eigen::VectorXd x;
  bool feasible = false;
  bool stalled = false;
  double objective = 0;
  double residual = 0;
  double stationarity = 0;
  long iterations = 0;
};

inline RestartOutcome run_restart(const SearchProblem& P, const SearchSpec& s, int index) {
  const auto n = static_cast<Eigen::Index>(P.vars());
  const auto nc = static_cast<Eigen::Index>(P.constraints());
  std::mt19937_64 gen(s.seed + static_cast<std::uint64_t>(index));
  RestartOutcome out;
  out.x.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) out.x(k) = uniform_pm1(gen);
  Eigen::VectorXd& x = out.x;
  Eigen::VectorXd g, lambda = Eigen::VectorXd::Zero(nc);
  Eigen::MatrixXd Jg;
  long budget = s.max_iterations;
  auto spend = [&](long used) {
    out.iterations += used;
    budget -= used;
  };

  // augmented Lagrangian homotopy: |x|^2 + lambda.g + mu/2 |g|^2, mu = 10 .. 1e8
  double mu = 10.0;
  constexpr int kStages = 8;
  const long per_stage = std::max<long>(1, s.max_iterations / (2 * kStages));
  for (int stage = 0; stage < kStages && budget > 0; ++stage) {
    const double root_mu = std::sqrt(mu);
    auto fn = [&](const Eigen::VectorXd& v, Eigen::VectorXd& R, Eigen::MatrixXd& J) {
      Eigen::VectorXd gg;
      Eigen::MatrixXd JJ;
      P.constraints(v, gg, JJ);
      R.resize(n + nc);
      R.head(n) = std::sqrt(2.0) * v;
      R.tail(nc) = root_mu * (gg + lambda / mu);
      J.resize(n + nc, n);
      J.topRows(n) = std::sqrt(2.0) * Eigen::MatrixXd::Identity(n, n);
      J.bottomRows(nc) = root_mu * JJ;
    };
    spend(levenberg_marquardt(fn, x, std::min(per_stage, budget), 1e-12 * (1.0 + mu)));
    P.constraints(x, g, Jg);
    lambda += mu * g;
    mu *= 10.0;
  }

  // minimum-norm Gauss-Newton projection onto g = 0
  P.constraints(x, g, Jg);
  for (int it = 0; it < 50 && budget > 0 && g.lpNorm<Eigen::Infinity>() > 1e-3 * s.tolerance; ++it) {
    Eigen::VectorXd dx = Jg.completeOrthogonalDecomposition().solve(-g);
    Eigen::VectorXd xn = x + dx;
    Eigen::VectorXd gn;
    Eigen::MatrixXd Jn;
    P.constraints(xn, gn, Jn);
    spend(1);
    if (!gn.allFinite() || gn.lpNorm<Eigen::Infinity>() >= g.lpNorm<Eigen::Infinity>()) break;
    x = std::move(xn);
    g = std::move(gn);
    Jg = std::move(Jn);
  }
  out.residual = g.lpNorm<Eigen::Infinity>();
  out.objective = x.squaredNorm();
  if (out.residual <= s.tolerance && check_Cr(P.tableau(x), s.r, s.tolerance).passed()) {
    out.feasible = true;
    return out;
  }

  // not feasible: drive |g|^2 to a stationary point to tell a barrier from slow progress
  Eigen::VectorXd y = x;
  auto fg = [&](const Eigen::VectorXd& v, Eigen::VectorXd& R, Eigen::MatrixXd& J) {
    P.constraints(v, R, J);
  };
  if (budget > 0) spend(levenberg_marquardt(fg, y, budget, 0.1 * kInfeasibleStationarity));
  P.constraints(y, g, Jg);
  const double res = g.lpNorm<Eigen::Infinity>();
  const double stat = (Jg.transpose() * g).lpNorm<Eigen::Infinity>();
  out.stationarity = stat;
  if (res > kInfeasibleResidual && stat < kInfeasibleStationarity) {
    out.stalled = true;
    out.x = y;
    out.residual = res;
    out.objective = y.squaredNorm();
  }
  return out;
}

}  // namespace detail

inline void validate(const SearchSpec& s) {
  if (s.m < 1 || s.m > 16) throw std::invalid_argument("search: stage count m must lie in [1, 16]");
  if (s.r < 1 || s.r > kMaxEnumerationOrder)
    throw std::invalid_argument("search: order r must lie in [1, " +
                                std::to_string(kMaxEnumerationOrder) + "]");
  if (!(s.tolerance > 0)) throw std::invalid_argument("search: tolerance must be > 0");
  if (s.restarts < 1) throw std::invalid_argument("search: need at least one restart");
  if (s.max_iterations < 1) throw std::invalid_argument("search: iteration budget must be >= 1");
  if (!s.c.empty()) {
    ButcherTableau probe(s.m);
    if (s.c.size() != static_cast<std::size_t>(s.m + 1))
      throw std::invalid_argument("search: c must list c_0..c_m");
    probe.c_ = s.c;
    validate_structure(probe);
  }
}

/// Minimizes sum a^2 + sum b^2 subject to C(r) with the nodes held fixed.
inline SearchResult search(const SearchSpec& spec) {
  validate(spec);
  const detail::SearchProblem P(spec);
  std::vector<detail::RestartOutcome> runs(static_cast<std::size_t>(spec.restarts));
  const unsigned workers = spec.threads ? spec.threads : thread_count();
  parallel_for(0, spec.restarts, workers, [&](long lo, long hi) {
    for (long k = lo; k < hi; ++k)
      runs[static_cast<std::size_t>(k)] = detail::run_restart(P, spec, static_cast<int>(k));
  });

  SearchResult res;
  int best = -1, best_stalled = -1;
  bool all_stalled = true;
  for (int k = 0; k < spec.restarts; ++k) {
    const auto& o = runs[static_cast<std::size_t>(k)];
    res.iterations += o.iterations;
    if (o.feasible) {
      if (best < 0 || o.objective < runs[static_cast<std::size_t>(best)].objective) best = k;
    }
    if (!o.stalled) all_stalled = false;
    if (o.stalled && (best_stalled < 0 || o.residual < runs[static_cast<std::size_t>(best_stalled)].residual))
      best_stalled = k;
  }

  if (best >= 0) {
    const auto& o = runs[static_cast<std::size_t>(best)];
    res.status = SearchStatus::found;
    res.restart = best;
    res.tableau = P.tableau(o.x);
    res.objective = o.objective;
    res.max_residual = check_Cr(*res.tableau, spec.r, spec.tolerance).max_residual();
    if (spec.r <= kTable1MaxOrder)
      res.table1_passed = check_table1(*res.tableau, spec.r, std::max(spec.tolerance, 1e-9)).passed();
    return res;
  }
  const int pick = best_stalled >= 0 ? best_stalled : 0;
  const auto& o = runs[static_cast<std::size_t>(pick)];
  res.status = all_stalled ? SearchStatus::infeasible : SearchStatus::budget_exhausted;
  res.restart = pick;
  res.objective = o.objective;
  res.max_residual = o.residual;
  res.stationarity = o.stationarity;
  return res;
}

inline nlohmann::json to_json(const SearchResult& r) {
  nlohmann::json j = {{"status", to_string(r.status)},
                      {"objective", r.objective},
                      {"max_residual", r.max_residual},
                      {"stationarity", r.stationarity},
                      {"iterations", r.iterations},
                      {"restart", r.restart}};
  j["tableau"] = r.tableau ? to_json(*r.tableau) : nlohmann::json();
  j["table1_passed"] = r.table1_passed ? nlohmann::json(*r.table1_passed) : nlohmann::json();
  return j;
}

}  // namespace bsderk
