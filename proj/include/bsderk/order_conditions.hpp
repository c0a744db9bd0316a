#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "tableau.hpp"
#include "trees.hpp"

namespace bsderk {

namespace detail {
inline double ipow(double x, unsigned k) {
  double r = 1.0;
  for (unsigned q = 0; q < k; ++q) r *= x;
  return r;
}
}  // namespace detail

/// Distinct subtrees of a tree collection, children before parents, so the
/// elementary coefficient recursion can be evaluated bottom-up without lookups.
class ElementaryPlan {
 public:
  struct Node {
    unsigned label;
    std::vector<std::size_t> children;
  };

  std::size_t add(const ULNTree& t) {
    if (auto it = index_.find(t); it != index_.end()) return it->second;
    std::vector<std::size_t> ch;
    for (const auto& c : t.children()) ch.push_back(add(c));
    nodes_.push_back({t.label(), std::move(ch)});
    index_.emplace(t, nodes_.size() - 1);
    return nodes_.size() - 1;
  }

  const std::vector<Node>& nodes() const { return nodes_; }

  /// out[node][i] = A_i(node) for i = 0..m.
  template <typename Scalar>
  std::vector<std::vector<Scalar>> evaluate(const BasicTableau<Scalar>& t) const {
    const int m = t.m;
    std::vector<std::vector<Scalar>> out(nodes_.size());
    for (std::size_t n = 0; n < nodes_.size(); ++n) {
      const Node& nd = nodes_[n];
      auto& A = out[n];
      A.assign(static_cast<std::size_t>(m + 1), Scalar(0.0));
      for (int i = 0; i <= m; ++i) {
        Scalar s(0.0);
        for (int j = i + 1; j <= m; ++j) {
          Scalar term = t.coef(i, j) * detail::ipow(t.c(i) - t.c(j), nd.label);
          for (std::size_t p : nd.children) term = term * out[p][static_cast<std::size_t>(j)];
          s = s + term;
        }
        if (nd.children.empty())
          s = s - detail::ipow(t.c(i), nd.label + 1) / static_cast<double>(nd.label + 1);
        A[static_cast<std::size_t>(i)] = s;
      }
    }
    return out;
  }

 private:
  std::vector<Node> nodes_;
  std::map<ULNTree, std::size_t> index_;
};

/// A_i(Υ) for i = 0..m.
template <typename Scalar>
std::vector<Scalar> elementary_coefficients(const BasicTableau<Scalar>& t, const ULNTree& tree) {
  ElementaryPlan plan;
  std::size_t root = plan.add(tree);
  return plan.evaluate(t)[root];
}

template <typename Scalar>
Scalar elementary_coefficient(const BasicTableau<Scalar>& t, int i, const ULNTree& tree) {
  return elementary_coefficients(t, tree)[static_cast<std::size_t>(i)];
}

/// One equation of C(r): A_row(tree) = 0.
struct CrCondition {
  int row;
  ULNTree tree;
};

/// The rows A_i([ ]_0) that are not identically zero (A_m([ ]_0) always vanishes),
/// followed by A_0(Υ) for Υ in T_{r-}.
inline std::vector<CrCondition> cr_conditions(int m, unsigned r) {
  std::vector<CrCondition> out;
  for (int i = 0; i < m; ++i) out.push_back({i, leaf(0)});
  for (auto& t : enumerate_trees_minus(r).trees) out.push_back({0, std::move(t)});
  return out;
}

// ---------------------------------------------------------------- reports

struct ConditionEntry {
  std::string key;
  double residual;  // lhs - rhs
  bool passed;
};

struct ConditionReport {
  std::string kind;  // "Cr" or "table1"
  unsigned order = 0;
  double tolerance = 0;
  std::vector<ConditionEntry> entries;

  bool passed() const {
    for (const auto& e : entries)
      if (!e.passed) return false;
    return true;
  }
  double max_residual() const {
    double r = 0;
    for (const auto& e : entries) r = std::max(r, std::abs(e.residual));
    return r;
  }
  const ConditionEntry* first_failure() const {
    for (const auto& e : entries)
      if (!e.passed) return &e;
    return nullptr;
  }
};

inline std::string cr_key(int row, const ULNTree& t) {
  return "A_" + std::to_string(row) + "(" + to_notation(t) + ")";
}

inline ConditionReport check_Cr(const ButcherTableau& t, unsigned r, double tol = 1e-10) {
  validate_structure(t);
  ConditionReport rep{"Cr", r, tol, {}};
  ElementaryPlan plan;
  auto conds = cr_conditions(t.m, r);
  std::vector<std::size_t> idx;
  for (const auto& c : conds) idx.push_back(plan.add(c.tree));
  auto A = plan.evaluate(t);
  for (std::size_t q = 0; q < conds.size(); ++q) {
    double v = A[idx[q]][static_cast<std::size_t>(conds[q].row)];
    rep.entries.push_back({cr_key(conds[q].row, conds[q].tree), v, std::abs(v) <= tol});
  }
  return rep;
}

/// Highest order covered by the explicit condition table.
inline constexpr unsigned kTable1MaxOrder = 5;

inline ConditionReport check_table1(const ButcherTableau& t, unsigned r, double tol = 1e-10) {
  if (r < 1 || r > kTable1MaxOrder)
    throw DomainError("the explicit condition table covers orders 1.." +
                      std::to_string(kTable1MaxOrder) + "; use check_Cr for order " +
                      std::to_string(r));
  ConditionReport rep{"table1", r, tol, {}};
  const int m = t.m;

  // (1) node ordering, reported as the worst shortfall against the minimum gap.
  double r1 = std::abs(t.c(0) - 1.0) + std::abs(t.c(m));
  for (int i = 0; i < m; ++i) r1 = std::max(r1, kStageGap - (t.c(i) - t.c(i + 1)));
  rep.entries.push_back({"(1)", r1, r1 <= 0.0});

  double r2 = 0;
  for (int i = 1; i <= m; ++i)
    for (int j = 1; j <= i; ++j) r2 = std::max(r2, std::abs(t.a(i, j)));
  rep.entries.push_back({"(2)", r2, r2 == 0.0});

  std::vector<double> c(static_cast<std::size_t>(m + 1)), ac(c.size()), ac2(c.size()),
      ac3(c.size()), aac(c.size()), aac2(c.size()), aaac(c.size()), acac(c.size());
  for (int i = 0; i <= m; ++i) c[static_cast<std::size_t>(i)] = t.c(i);
  auto sum_a = [&](int i, auto&& g) {
    double s = 0;
    for (int j = i + 1; j <= m; ++j) s += t.a(i, j) * g(j);
    return s;
  };
  auto C = [&](int j) { return c[static_cast<std::size_t>(j)]; };
  double r3 = 0;
  for (int i = 1; i <= m; ++i) r3 = std::max(r3, std::abs(sum_a(i, [](int) { return 1.0; }) - C(i)));
  rep.entries.push_back({"(3)", r3, r3 <= tol});

  for (int i = m; i >= 1; --i) {
    auto I = static_cast<std::size_t>(i);
    ac[I] = sum_a(i, [&](int j) { return C(j); });
    ac2[I] = sum_a(i, [&](int j) { return C(j) * C(j); });
    ac3[I] = sum_a(i, [&](int j) { return C(j) * C(j) * C(j); });
    aac[I] = sum_a(i, [&](int j) { return ac[static_cast<std::size_t>(j)]; });
    aac2[I] = sum_a(i, [&](int j) { return ac2[static_cast<std::size_t>(j)]; });
    aaac[I] = sum_a(i, [&](int j) { return aac[static_cast<std::size_t>(j)]; });
    acac[I] = sum_a(i, [&](int j) { return C(j) * ac[static_cast<std::size_t>(j)]; });
  }
  auto sum_b = [&](auto&& g) {
    double s = 0;
    for (int i = 1; i <= m; ++i) s += t.b(i) * g(static_cast<std::size_t>(i));
    return s;
  };
  struct Row {
    int id;
    unsigned min_order;
    double value;
    double rhs;
  };
  const std::vector<Row> rows = {
      {4, 1, sum_b([&](std::size_t) { return 1.0; }), 1.0},
      {5, 2, sum_b([&](std::size_t i) { return c[i]; }), 1.0 / 2},
      {6, 3, sum_b([&](std::size_t i) { return c[i] * c[i]; }), 1.0 / 3},
      {7, 3, sum_b([&](std::size_t i) { return ac[i]; }), 1.0 / 6},
      {8, 4, sum_b([&](std::size_t i) { return c[i] * c[i] * c[i]; }), 1.0 / 4},
      {9, 4, sum_b([&](std::size_t i) { return c[i] * ac[i]; }), 1.0 / 8},
      {10, 4, sum_b([&](std::size_t i) { return ac2[i]; }), 1.0 / 12},
      {11, 4, sum_b([&](std::size_t i) { return aac[i]; }), 1.0 / 24},
      {12, 5, sum_b([&](std::size_t i) { return c[i] * c[i] * c[i] * c[i]; }), 1.0 / 5},
      {13, 5, sum_b([&](std::size_t i) { return c[i] * c[i] * ac[i]; }), 1.0 / 10},
      {14, 5, sum_b([&](std::size_t i) { return c[i] * ac2[i]; }), 1.0 / 15},
      {15, 5, sum_b([&](std::size_t i) { return c[i] * aac[i]; }), 1.0 / 30},
      {16, 5, sum_b([&](std::size_t i) { return ac[i] * ac[i]; }), 1.0 / 20},
      {17, 5, sum_b([&](std::size_t i) { return ac3[i]; }), 1.0 / 20},
      {18, 5, sum_b([&](std::size_t i) { return acac[i]; }), 1.0 / 40},
      {19, 5, sum_b([&](std::size_t i) { return aac2[i]; }), 1.0 / 60},
      {20, 5, sum_b([&](std::size_t i) { return aaac[i]; }), 1.0 / 120},
  };
  for (const auto& row : rows) {
    if (row.min_order > r) continue;
    double res = row.value - row.rhs;
    rep.entries.push_back({"(" + std::to_string(row.id) + ")", res, std::abs(res) <= tol});
  }
  return rep;
}

inline nlohmann::json to_json(const ConditionReport& rep) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : rep.entries)
    rows.push_back({{"condition", e.key}, {"residual", e.residual}, {"passed", e.passed}});
  return nlohmann::json{{"kind", rep.kind},
                        {"order", rep.order},
                        {"tolerance", rep.tolerance},
                        {"passed", rep.passed()},
                        {"conditions", rows}};
}

inline std::string to_markdown(const ConditionReport& rep) {
  char buf[64];
  std::string out = "| Condition | Residual | Status |\n|---|---|---|\n";
  for (const auto& e : rep.entries) {
    std::snprintf(buf, sizeof buf, "%.3e", e.residual);
    out += "| " + e.key + " | " + buf + " | " + (e.passed ? "pass" : "FAIL") + " |\n";
  }
  return out;
}

// ---------------------------------------------------------------- rendering

namespace detail {

inline std::string superscript(unsigned n) {
  static const char* digits[] = {"⁰", "¹", "²", "³", "⁴", "⁵", "⁶", "⁷", "⁸", "⁹"};
  if (n == 0) return digits[0];
  std::string s;
  while (n) {
    s.insert(0, digits[n % 10]);
    n /= 10;
  }
  return s;
}

inline std::string index_name(std::size_t n) {
  static const char names[] = "ijklpqrsuvw";
  constexpr std::size_t count = sizeof(names) - 1;
  std::string s(1, names[n % count]);
  if (n >= count) s += std::to_string(n / count);
  return s;
}

struct FlatNode {
  unsigned label;
  int parent;  // -1 for root
  std::string idx;
};

inline void flatten(const ULNTree& t, int parent, std::vector<FlatNode>& out) {
  out.push_back({t.label(), parent, {}});
  int self = static_cast<int>(out.size()) - 1;
  for (const auto& c : t.children()) flatten(c, self, out);
}

}  // namespace detail

/// Human-readable form of A_0(Υ) = 0 with the leading sum on the left.
inline std::string render_condition(const ULNTree& tree) {
  using detail::FlatNode;
  std::vector<FlatNode> nodes;
  detail::flatten(tree, -1, nodes);
  if (nodes.size() == 1) {
    nodes[0].idx = "j";
  } else {
    for (std::size_t n = 0; n < nodes.size(); ++n) nodes[n].idx = detail::index_name(n);
  }
  std::vector<std::size_t> leaves;
  std::vector<bool> has_child(nodes.size(), false);
  for (const auto& nd : nodes)
    if (nd.parent >= 0) has_child[static_cast<std::size_t>(nd.parent)] = true;
  for (std::size_t n = 0; n < nodes.size(); ++n)
    if (!has_child[n]) leaves.push_back(n);

  struct Term {
    int sign;
    std::int64_t den;
    std::string body;
  };
  auto build = [&](std::uint64_t mask) {
    std::vector<bool> dropped(nodes.size(), false);
    int sign = 1;
    std::int64_t den = 1;
    std::vector<unsigned> cpow(nodes.size(), 0);
    for (std::size_t q = 0; q < leaves.size(); ++q) {
      if (!(mask >> q & 1u)) continue;
      std::size_t v = leaves[q];
      dropped[v] = true;
      sign = -sign;
      den *= nodes[v].label + 1;
      if (nodes[v].parent >= 0) cpow[static_cast<std::size_t>(nodes[v].parent)] += nodes[v].label + 1;
    }
    std::vector<std::string> idx;
    std::string factors;
    auto add = [&](const std::string& f) {
      if (!factors.empty() && f[0] != '(') factors += ' ';
      factors += f;
    };
    for (std::size_t n = 0; n < nodes.size(); ++n) {
      if (dropped[n]) continue;
      const auto& nd = nodes[n];
      idx.push_back(nd.idx);
      std::string pw = nd.label > 1 ? detail::superscript(nd.label) : "";
      if (nd.parent < 0) {
        add("b_" + nd.idx);
        if (nd.label) add("(1−c_" + nd.idx + ")" + pw);
      } else {
        const auto& p = nodes[static_cast<std::size_t>(nd.parent)];
        add("a_{" + p.idx + nd.idx + "}");
        if (nd.label) add("(c_" + p.idx + "−c_" + nd.idx + ")" + pw);
      }
    }
    for (std::size_t n = 0; n < nodes.size(); ++n)
      if (cpow[n])
        add("c_" + nodes[n].idx + (cpow[n] > 1 ? detail::superscript(cpow[n]) : ""));
    std::string body;
    if (!idx.empty()) {
      body = "Σ_";
      if (idx.size() == 1) {
        body += idx[0];
      } else {
        body += "{";
        for (std::size_t q = 0; q < idx.size(); ++q) body += (q ? "," : "") + idx[q];
        body += "}";
      }
      body += " " + factors;
      if (den != 1) body += "/" + std::to_string(den);
    } else {
      body = den == 1 ? "1" : "1/" + std::to_string(den);
    }
    return Term{sign, den, body};
  };

  std::string lhs = build(0).body;
  std::string rhs;
  const std::uint64_t total = std::uint64_t{1} << leaves.size();
  for (std::uint64_t mask = 1; mask < total; ++mask) {
    Term t = build(mask);
    int s = -t.sign;  // moved to the right-hand side
    if (rhs.empty())
      rhs = (s < 0 ? "−" : "") + t.body;
    else
      rhs += (s < 0 ? " − " : " + ") + t.body;
  }
  return lhs + " = " + rhs;
}

}  // namespace bsderk
