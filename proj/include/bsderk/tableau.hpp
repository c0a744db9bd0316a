#pragma once

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace bsderk {

/// Raised when a tableau violates the stage ordering (1) or explicitness (2).
struct TableauError : std::invalid_argument {
  TableauError(int condition, const std::string& what)
      : std::invalid_argument("condition (" + std::to_string(condition) + "): " + what),
        condition(condition) {}
  int condition;
};

/// Explicit tableau with stages numbered downward: stage m runs first at c_m = 0,
/// and stage 0 is the final update with weights b and c_0 = 1. Indices are
/// 1-based in the accessors; a(i, j) can be nonzero only for j > i.
template <typename Scalar>
struct BasicTableau {
  int m = 0;
  std::vector<Scalar> a_;  // m*m, row-major, a_[(i-1)*m + (j-1)]
  std::vector<Scalar> b_;  // m
  std::vector<double> c_;  // m+1, c_[0] = 1

  BasicTableau() = default;
  explicit BasicTableau(int stages)
      : m(stages), a_(static_cast<std::size_t>(stages * stages), Scalar(0)),
        b_(static_cast<std::size_t>(stages), Scalar(0)),
        c_(static_cast<std::size_t>(stages + 1), 0.0) {
    c_[0] = 1.0;
  }

  Scalar& a(int i, int j) { return a_[static_cast<std::size_t>((i - 1) * m + (j - 1))]; }
  const Scalar& a(int i, int j) const {
    return a_[static_cast<std::size_t>((i - 1) * m + (j - 1))];
  }
  Scalar& b(int j) { return b_[static_cast<std::size_t>(j - 1)]; }
  const Scalar& b(int j) const { return b_[static_cast<std::size_t>(j - 1)]; }
  double& c(int i) { return c_[static_cast<std::size_t>(i)]; }
  double c(int i) const { return c_[static_cast<std::size_t>(i)]; }

  /// Row-0 weights are b; rows 1..m are a.
  const Scalar& coef(int i, int j) const { return i == 0 ? b(j) : a(i, j); }
};

using ButcherTableau = BasicTableau<double>;

inline constexpr double kStageGap = 1e-12;

/// Throws TableauError naming the first structural condition violated.
inline void validate_structure(const ButcherTableau& t) {
  if (t.m < 1) throw TableauError(1, "at least one stage is required");
  if (t.a_.size() != static_cast<std::size_t>(t.m * t.m) ||
      t.b_.size() != static_cast<std::size_t>(t.m) ||
      t.c_.size() != static_cast<std::size_t>(t.m + 1))
    throw TableauError(1, "array sizes do not match m = " + std::to_string(t.m));
  for (double v : t.c_)
    if (!std::isfinite(v)) throw TableauError(1, "non-finite node");
  if (t.c(0) != 1.0) throw TableauError(1, "c_0 must equal 1");
  if (t.c(t.m) != 0.0) throw TableauError(1, "c_m must equal 0");
  for (int i = 0; i < t.m; ++i)
    if (!(t.c(i) - t.c(i + 1) >= kStageGap))
      throw TableauError(1, "nodes must decrease strictly: c_" + std::to_string(i) +
                                " <= c_" + std::to_string(i + 1));
  for (int i = 1; i <= t.m; ++i)
    for (int j = 1; j <= i; ++j)
      if (t.a(i, j) != 0.0)
        throw TableauError(2, "a_{" + std::to_string(i) + "," + std::to_string(j) +
                                  "} must vanish (explicit scheme)");
}

// JSON layout: {"m": m, "a": m x m rows, "b": [b_1..b_m], "c": [c_0..c_m]}.

inline nlohmann::json to_json(const ButcherTableau& t) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 1; i <= t.m; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 1; j <= t.m; ++j) row.push_back(t.a(i, j));
    a.push_back(row);
  }
  return nlohmann::json{{"m", t.m}, {"a", a}, {"b", t.b_}, {"c", t.c_}};
}

inline ButcherTableau tableau_from_json(const nlohmann::json& j) {
  try {
    const int m = j.at("m").get<int>();
    if (m < 1 || m > 64) throw TableauError(1, "stage count out of range");
    ButcherTableau t(m);
    const auto& a = j.at("a");
    if (!a.is_array() || a.size() != static_cast<std::size_t>(m))
      throw TableauError(1, "\"a\" must have m rows");
    for (int i = 1; i <= m; ++i) {
      const auto& row = a[static_cast<std::size_t>(i - 1)];
      if (!row.is_array() || row.size() != static_cast<std::size_t>(m))
        throw TableauError(1, "\"a\" row " + std::to_string(i) + " must have m entries");
      for (int jj = 1; jj <= m; ++jj) t.a(i, jj) = row[static_cast<std::size_t>(jj - 1)].get<double>();
    }
    t.b_ = j.at("b").get<std::vector<double>>();
    t.c_ = j.at("c").get<std::vector<double>>();
    validate_structure(t);
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("tableau JSON: ") + e.what());
  }
}

/// Plain-text layout: one row per stage i = m..1 as "c_i | a_{i,i+1} .. a_{i,m}",
/// then the weight row "1 | b_1 .. b_m".
inline std::string pretty_print(const ButcherTableau& t) {
  char buf[64];
  std::string out;
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%22.17g", v);
    return std::string(buf);
  };
  for (int i = t.m; i >= 1; --i) {
    out += num(t.c(i)) + " |";
    for (int j = t.m; j > i; --j) out += ' ' + num(t.a(i, j));
    out += '\n';
  }
  out += std::string(22, '-') + "-+" + std::string(static_cast<std::size_t>(23 * t.m), '-') + '\n';
  out += num(t.c(0)) + " |";
  for (int j = t.m; j >= 1; --j) out += ' ' + num(t.b(j));
  out += '\n';
  return out;
}

}  // namespace bsderk
