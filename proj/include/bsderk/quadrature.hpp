#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

namespace bsderk {

inline constexpr int kMaxHermiteNodes = 64;

/// Nodes q_k (ascending) and weights w_k with sum_k w_k g(q_k) ~ ∫ g(q) e^{-q^2} dq.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  int size() const { return static_cast<int>(nodes.size()); }
  double max_node() const { return nodes.empty() ? 0.0 : nodes.back(); }
};

namespace detail {

// Orthonormal Hermite recurrence; returns p_M(x) and fills p_0..p_{M-1}.
inline double hermite_orthonormal(int M, double x, std::vector<double>& p) {
  p.assign(static_cast<std::size_t>(M) + 1, 0.0);
  p[0] = std::pow(M_PI, -0.25);
  if (M >= 1) p[1] = std::sqrt(2.0) * x * p[0];
  for (int k = 1; k < M; ++k)
    p[static_cast<std::size_t>(k) + 1] =
        std::sqrt(2.0 / (k + 1)) * x * p[static_cast<std::size_t>(k)] -
        std::sqrt(static_cast<double>(k) / (k + 1)) * p[static_cast<std::size_t>(k) - 1];
  return p[static_cast<std::size_t>(M)];
}

}  // namespace detail

/// Golub-Welsch: nodes are eigenvalues of the symmetric Jacobi matrix, then one
/// Newton polish on the orthonormal recurrence with Christoffel weights.
inline GaussHermiteRule gh_rule(int M) {
  if (M < 1 || M > kMaxHermiteNodes)
    throw std::invalid_argument("gh_rule: M must lie in [1, " + std::to_string(kMaxHermiteNodes) +
                                "], got " + std::to_string(M));
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(M);
  Eigen::VectorXd sub(M > 1 ? M - 1 : 0);
  for (int k = 1; k < M; ++k) sub(k - 1) = std::sqrt(k / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  GaussHermiteRule rule;
  rule.nodes.resize(static_cast<std::size_t>(M));
  rule.weights.resize(static_cast<std::size_t>(M));
  std::vector<double> p;
  for (int i = 0; i < M; ++i) {
    double x = es.eigenvalues()(i);
    for (int it = 0; it < 3; ++it) {
      double pm = detail::hermite_orthonormal(M, x, p);
      double dpm = std::sqrt(2.0 * M) * p[static_cast<std::size_t>(M) - 1];
      if (dpm == 0.0) break;
      x -= pm / dpm;
    }
    detail::hermite_orthonormal(M, x, p);
    double s = 0;
    for (int k = 0; k < M; ++k) s += p[static_cast<std::size_t>(k)] * p[static_cast<std::size_t>(k)];
    rule.nodes[static_cast<std::size_t>(i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = 1.0 / s;
  }
  // enforce exact symmetry
  for (int i = 0; i < M / 2; ++i) {
    auto lo = static_cast<std::size_t>(i), hi = static_cast<std::size_t>(M - 1 - i);
    double x = 0.5 * (rule.nodes[hi] - rule.nodes[lo]);
    double w = 0.5 * (rule.weights[hi] + rule.weights[lo]);
    rule.nodes[lo] = -x;
    rule.nodes[hi] = x;
    rule.weights[lo] = rule.weights[hi] = w;
  }
  if (M % 2) rule.nodes[static_cast<std::size_t>(M / 2)] = 0.0;
  return rule;
}

/// Samples on the lattice x_i = origin + i h for lo <= i <= hi.
struct GridFunction {
  double h = 1.0;
  double origin = 0.0;
  long lo = 0;
  long hi = -1;
  std::vector<double> values;

  GridFunction() = default;
  GridFunction(double h_, double origin_, long lo_, long hi_)
      : h(h_), origin(origin_), lo(lo_), hi(hi_),
        values(static_cast<std::size_t>(hi_ - lo_ + 1), 0.0) {}

  template <typename Fn>
  static GridFunction sample(double h, double origin, long lo, long hi, Fn&& g) {
    GridFunction f(h, origin, lo, hi);
    for (long i = lo; i <= hi; ++i) f.at(i) = g(f.x(i));
    return f;
  }

  long size() const { return hi - lo + 1; }
  double x(long i) const { return origin + static_cast<double>(i) * h; }
  double& at(long i) { return values[static_cast<std::size_t>(i - lo)]; }
  double at(long i) const { return values[static_cast<std::size_t>(i - lo)]; }
};

inline std::string to_csv(const GridFunction& g) {
  std::string out = "x,value\n";
  char buf[80];
  for (long i = g.lo; i <= g.hi; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", g.x(i), g.at(i));
    out += buf;
  }
  return out;
}

/// Lagrange basis for nodes 0..l evaluated at u.
inline void lagrange_basis(double u, int l, double* w) {
  for (int p = 0; p <= l; ++p) {
    double num = 1.0, den = 1.0;
    for (int q = 0; q <= l; ++q) {
      if (q == p) continue;
      num *= u - q;
      den *= p - q;
    }
    w[p] = num / den;
  }
}

/// First stencil node for a query at lattice coordinate s: the l+1 nearest nodes.
inline long stencil_left(double s, int l) {
  return l % 2 ? static_cast<long>(std::floor(s)) - (l - 1) / 2
               : static_cast<long>(std::lround(s)) - l / 2;
}

/// Degree-l interpolation from the l+1 nearest nodes; near the ends of the
/// stored range the stencil is shifted to stay one-sided inside it.
inline double lagrange_interpolate(const GridFunction& g, double x, int l) {
  if (l < 0 || l + 1 > kMaxHermiteNodes)
    throw std::invalid_argument("lagrange_interpolate: degree out of range");
  if (g.size() < l + 1)
    throw std::invalid_argument("lagrange_interpolate: need at least l+1 samples");
  double s = (x - g.origin) / g.h;
  if (double r = std::round(s); std::abs(s - r) < 1e-12) s = r;
  long left = std::clamp(stencil_left(s, l), g.lo, g.hi - l);
  double w[kMaxHermiteNodes];
  lagrange_basis(s - static_cast<double>(left), l, w);
  double v = 0;
  for (int p = 0; p <= l; ++p) v += w[p] * g.at(left + p);
  return v;
}

/// E[g(x + σ W_τ)] by Gauss-Hermite quadrature over the interpolant of g.
inline double cond_expect(const GridFunction& g, double x, double tau, double sigma,
                          const GaussHermiteRule& rule, int l) {
  if (tau < 0) throw std::invalid_argument("cond_expect: tau must be >= 0");
  const double scale = sigma * std::sqrt(2.0 * tau);
  const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);
  double v = 0;
  for (int k = 0; k < rule.size(); ++k)
    v += rule.weights[static_cast<std::size_t>(k)] * inv_sqrt_pi *
         lagrange_interpolate(g, x + scale * rule.nodes[static_cast<std::size_t>(k)], l);
  return v;
}

/// E[g(x + σ W_τ) W_τ] / τ.
inline double cond_expect_dw(const GridFunction& g, double x, double tau, double sigma,
                             const GaussHermiteRule& rule, int l) {
  if (!(tau > 0)) throw std::invalid_argument("cond_expect_dw: tau must be > 0");
  const double root = std::sqrt(2.0 * tau);
  const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);
  double v = 0;
  for (int k = 0; k < rule.size(); ++k) {
    double q = rule.nodes[static_cast<std::size_t>(k)];
    v += rule.weights[static_cast<std::size_t>(k)] * inv_sqrt_pi *
         lagrange_interpolate(g, x + sigma * root * q, l) * root * q;
  }
  return v / tau;
}

}  // namespace bsderk
