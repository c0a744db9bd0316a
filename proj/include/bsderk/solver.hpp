#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "parallel.hpp"
#include "quadrature.hpp"
#include "tableau.hpp"

namespace bsderk {

/// Decoupled FBSDE with X_t = x + σ W_t:
///   -dY = f(t, X, Y, Z) dt - Z dW,  Y_T = φ(X_T).
struct BSDEProblem {
  std::string name;
  double sigma = 1.0;
  double T = 1.0;
  double a = 0.0, b = 1.0;  // spatial window where Y_0, Z_0 are reported
  std::function<double(double t, double x, double y, double z)> f;
  std::function<double(double x)> phi;
  std::function<double(double x)> dphi;
  std::function<double(double t, double x)> exact_y;  // optional
  std::function<double(double t, double x)> exact_z;  // optional
};

struct SolveConfig {
  int N = 10;
  unsigned order = 1;  // nominal order r; drives the default l and h
  int M = 16;          // Gauss-Hermite nodes
  int l = 0;           // interpolation degree; 0 selects 2r+1
  double h = 0.0;      // spatial step; 0 selects Δt^{(r+1)/(l+1)}
  int guard_cells = 1; // extra cells added to every cone widening
  unsigned threads = 0; // 0 reads the environment
  long max_grid_points = 1L << 24;  // per time level, across the widest stage

  int degree() const { return l > 0 ? l : static_cast<int>(2 * order + 1); }
};

struct Extent {
  long lo;
  long hi;
  friend bool operator==(const Extent&, const Extent&) = default;
};

struct SolverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Time and space discretization derived from (problem, tableau, config):
/// stage offsets of the backward dependency cone and the per-step widening.
struct Discretization {
  int N;
  int m;
  double dt;
  double h;
  int l;
  GaussHermiteRule rule;
  Extent base;                 // level 0 covers [a, b]
  std::vector<long> stage_pad; // cells stage i extends beyond the level extent
  long step_pad;               // widening per time level

  Discretization(const BSDEProblem& p, const ButcherTableau& t, const SolveConfig& cfg)
      : N(cfg.N), m(t.m), dt(p.T / cfg.N), l(cfg.degree()), rule(gh_rule(cfg.M)) {
    if (cfg.N < 1) throw std::invalid_argument("solve: N must be >= 1");
    if (!(p.sigma > 0) || !(p.T > 0) || !(p.b >= p.a))
      throw std::invalid_argument("solve: need sigma > 0, T > 0 and a <= b");
    if (l < 1 || l + 1 > kMaxHermiteNodes) throw std::invalid_argument("solve: bad degree l");
    validate_structure(t);
    h = cfg.h > 0 ? cfg.h : std::pow(dt, static_cast<double>(cfg.order + 1) / (l + 1));
    base = {static_cast<long>(std::floor(p.a / h)), static_cast<long>(std::ceil(p.b / h))};
    stage_pad.assign(static_cast<std::size_t>(m + 1), 0);
    for (int j = 1; j <= m; ++j) {
      long w = 0;
      for (int i = 0; i < j; ++i)
        w = std::max(w, stage_pad[static_cast<std::size_t>(i)] +
                            widening(p.sigma, (t.c(i) - t.c(j)) * dt, cfg.guard_cells));
      stage_pad[static_cast<std::size_t>(j)] = w;
    }
    step_pad = stage_pad[static_cast<std::size_t>(m)];
  }

  /// Cells needed beyond a query range so every abscissa x + σ sqrt(2τ) q_k
  /// still has a full interpolation stencil.
  long widening(double sigma, double tau, int guard) const {
    double reach = sigma * std::sqrt(2.0 * tau) * rule.max_node() / h;
    return static_cast<long>(std::ceil(reach - 1e-12)) + (l + 2) / 2 + guard;
  }

  Extent level(int n) const { return {base.lo - n * step_pad, base.hi + n * step_pad}; }
  Extent stage(int n, int i) const {
    Extent e = level(n);
    long w = stage_pad[static_cast<std::size_t>(i)];
    return {e.lo - w, e.hi + w};
  }
};

/// Index range that time level n must cover so that all abscissae queried while
/// stepping from level n down to level 0 have full stencils.
inline Extent required_domain(const BSDEProblem& p, const ButcherTableau& t, const SolveConfig& cfg,
                              int n) {
  return Discretization(p, t, cfg).level(n);
}

struct Solution {
  GridFunction y0;  // restricted to nodes inside [a, b]
  GridFunction z0;
  double dt = 0;
  double h = 0;
  int l = 0;
  int M = 0;
  Extent terminal_extent{0, -1};
  std::vector<Extent> level_extents;  // index n: nodes stored for time level n
  double runtime_seconds = 0;
};

namespace detail {

struct PairStencil {
  double tau;
  std::vector<long> offset;          // per quadrature node
  std::vector<double> weight;        // (l+1) per node, Lagrange basis
  std::vector<double> shift;         // σ sqrt(2τ) q_k
  std::vector<double> dw;            // sqrt(2τ) q_k / τ
};

}  // namespace detail

inline Solution solve(const BSDEProblem& p, const ButcherTableau& t, const SolveConfig& cfg) {
  auto start = std::chrono::steady_clock::now();
  Discretization d(p, t, cfg);
  const int m = t.m, N = d.N, l = d.l, M = d.rule.size();
  const double dt = d.dt, h = d.h, sigma = p.sigma;
  const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);
  const unsigned workers = cfg.threads ? cfg.threads : thread_count();

  std::vector<double> qw(static_cast<std::size_t>(M));
  for (int k = 0; k < M; ++k) qw[static_cast<std::size_t>(k)] = d.rule.weights[static_cast<std::size_t>(k)] * inv_sqrt_pi;

  // pair (i, j), 0 <= i < j <= m
  std::vector<detail::PairStencil> pairs(static_cast<std::size_t>((m + 1) * (m + 1)));
  auto pair = [&](int i, int j) -> detail::PairStencil& {
    return pairs[static_cast<std::size_t>(i * (m + 1) + j)];
  };
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j <= m; ++j) {
      auto& ps = pair(i, j);
      ps.tau = (t.c(i) - t.c(j)) * dt;
      const double root = std::sqrt(2.0 * ps.tau);
      ps.offset.resize(static_cast<std::size_t>(M));
      ps.weight.resize(static_cast<std::size_t>(M * (l + 1)));
      ps.shift.resize(static_cast<std::size_t>(M));
      ps.dw.resize(static_cast<std::size_t>(M));
      for (int k = 0; k < M; ++k) {
        auto K = static_cast<std::size_t>(k);
        double q = d.rule.nodes[K];
        ps.shift[K] = sigma * root * q;
        ps.dw[K] = root * q / ps.tau;
        double s = ps.shift[K] / h;
        long left = stencil_left(s, l);
        ps.offset[K] = left;
        lagrange_basis(s - static_cast<double>(left), l, &ps.weight[K * static_cast<std::size_t>(l + 1)]);
      }
    }

  // terminal level
  Extent eT = d.level(N);
  {
    const Extent widest = d.stage(N - 1, m - 1);
    const long points = widest.hi - widest.lo + 1;
    if (points > cfg.max_grid_points)
      throw SolverFailure("required domain needs " + std::to_string(points) +
                          " grid points per level, above the limit of " +
                          std::to_string(cfg.max_grid_points));
  }
  std::vector<std::vector<double>> Y(static_cast<std::size_t>(m + 1)), Z(Y.size());
  std::vector<Extent> ext(Y.size());
  {
    auto& y = Y[static_cast<std::size_t>(m)];
    auto& z = Z[static_cast<std::size_t>(m)];
    y.resize(static_cast<std::size_t>(eT.hi - eT.lo + 1));
    z.resize(y.size());
    for (long n = eT.lo; n <= eT.hi; ++n) {
      double x = static_cast<double>(n) * h;
      y[static_cast<std::size_t>(n - eT.lo)] = p.phi(x);
      z[static_cast<std::size_t>(n - eT.lo)] = sigma * p.dphi(x);
    }
    ext[static_cast<std::size_t>(m)] = eT;
  }

  for (int lev = N - 1; lev >= 0; --lev) {
    const double t_next = (lev + 1) * dt;
    for (int i = m - 1; i >= 0; --i) {
      const Extent e = d.stage(lev, i);
      auto& yi = Y[static_cast<std::size_t>(i)];
      auto& zi = Z[static_cast<std::size_t>(i)];
      yi.assign(static_cast<std::size_t>(e.hi - e.lo + 1), 0.0);
      zi.assign(yi.size(), 0.0);
      ext[static_cast<std::size_t>(i)] = e;

      parallel_for(e.lo, e.hi + 1, workers, [&](long nlo, long nhi) {
        for (long n = nlo; n < nhi; ++n) {
          const double x = static_cast<double>(n) * h;
          double ysum = 0, zsum = 0, yf = 0, zf = 0;
          for (int j = i + 1; j <= m; ++j) {
            const double coef = t.coef(i, j);
            if (coef == 0.0 && j != m) continue;
            const auto& ps = pair(i, j);
            const double tj = t_next - t.c(j) * dt;
            const auto& yj = Y[static_cast<std::size_t>(j)];
            const auto& zj = Z[static_cast<std::size_t>(j)];
            const long base = n - ext[static_cast<std::size_t>(j)].lo;
            double fy = 0, fz = 0, ty = 0, tz = 0;
            for (int k = 0; k < M; ++k) {
              auto K = static_cast<std::size_t>(k);
              const double* w = &ps.weight[K * static_cast<std::size_t>(l + 1)];
              const std::size_t at = static_cast<std::size_t>(base + ps.offset[K]);
              const double* yp = yj.data() + at;
              const double* zp = zj.data() + at;
              double yv = 0, zv = 0;
              for (int q = 0; q <= l; ++q) {
                yv += w[q] * yp[q];
                zv += w[q] * zp[q];
              }
              if (j == m) {
                ty += qw[K] * yv;
                tz += qw[K] * zv;
              }
              if (coef != 0.0) {
                const double fv = qw[K] * p.f(tj, x + ps.shift[K], yv, zv);
                fy += fv;
                fz += fv * ps.dw[K];
              }
            }
            if (j == m) {
              ysum = ty;
              zsum = tz;
            }
            yf += coef * fy;
            zf += coef * fz;
          }
          yi[static_cast<std::size_t>(n - e.lo)] = ysum + dt * yf;
          zi[static_cast<std::size_t>(n - e.lo)] = zsum + dt * zf;
        }
      });

      for (long n = e.lo; n <= e.hi; ++n) {
        auto at = static_cast<std::size_t>(n - e.lo);
        if (!std::isfinite(yi[at]) || !std::isfinite(zi[at])) {
          std::ostringstream msg;
          msg.precision(17);
          msg << "non-finite value at time level n = " << lev << ", stage i = " << i
              << ", x = " << static_cast<double>(n) * h;
          throw SolverFailure(msg.str());
        }
      }
    }
    // stage 0 becomes level lev, which is the next step's stage m
    std::swap(Y[static_cast<std::size_t>(m)], Y[0]);
    std::swap(Z[static_cast<std::size_t>(m)], Z[0]);
    ext[static_cast<std::size_t>(m)] = ext[0];
  }

  Solution sol;
  sol.dt = dt;
  sol.h = h;
  sol.l = l;
  sol.M = M;
  sol.terminal_extent = eT;
  for (int n = 0; n <= N; ++n) sol.level_extents.push_back(d.level(n));
  const Extent e0 = ext[static_cast<std::size_t>(m)];
  long lo = static_cast<long>(std::ceil(p.a / h - 1e-9)), hi = static_cast<long>(std::floor(p.b / h + 1e-9));
  lo = std::max(lo, e0.lo);
  hi = std::min(hi, e0.hi);
  sol.y0 = GridFunction(h, 0.0, lo, hi);
  sol.z0 = GridFunction(h, 0.0, lo, hi);
  for (long n = lo; n <= hi; ++n) {
    sol.y0.at(n) = Y[static_cast<std::size_t>(m)][static_cast<std::size_t>(n - e0.lo)];
    sol.z0.at(n) = Z[static_cast<std::size_t>(m)][static_cast<std::size_t>(n - e0.lo)];
  }
  sol.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return sol;
}

}  // namespace bsderk
