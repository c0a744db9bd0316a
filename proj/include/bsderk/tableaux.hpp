#pragma once

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tableau.hpp"

namespace bsderk {

/// A tableau together with its display name and nominal order.
struct Scheme {
  std::string name;
  unsigned order;
  ButcherTableau tableau;
};

namespace detail {

inline constexpr double kParamMargin = 1e-9;

inline ButcherTableau uniform_nodes(int m) {
  ButcherTableau t(m);
  for (int i = 0; i <= m; ++i) t.c(i) = 1.0 - static_cast<double>(i) / m;
  t.c(m) = 0.0;
  return t;
}

struct Entry {
  int i, j;
  double v;
};

inline ButcherTableau tabulated(int m, std::initializer_list<Entry> a, std::vector<double> b_desc) {
  ButcherTableau t = uniform_nodes(m);
  for (const auto& e : a) t.a(e.i, e.j) = e.v;
  for (int j = m; j >= 1; --j) t.b(j) = b_desc[static_cast<std::size_t>(m - j)];
  return t;
}

inline std::string fmt_param(double v) {
  for (int den = 1; den <= 12; ++den) {
    double num = v * den;
    if (std::abs(num - std::round(num)) < 1e-12) {
      long n = std::lround(num);
      return den == 1 ? std::to_string(n) : std::to_string(n) + "/" + std::to_string(den);
    }
  }
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

}  // namespace detail

inline ButcherTableau euler() {
  ButcherTableau t(1);
  t.b(1) = 1.0;
  return t;
}

inline ButcherTableau rk2(double c1) {
  if (!(c1 > detail::kParamMargin && c1 < 1.0 - detail::kParamMargin))
    throw std::invalid_argument("rk2: c_1 must lie in (0, 1)");
  ButcherTableau t(2);
  t.c(1) = c1;
  t.a(1, 2) = c1;
  t.b(1) = 1.0 / (2.0 * c1);
  t.b(2) = 1.0 - 1.0 / (2.0 * c1);
  return t;
}

inline ButcherTableau rk3(double c1, double c2) {
  const double eps = detail::kParamMargin;
  if (!(c2 > eps && c1 - c2 > eps && c1 < 1.0 - eps))
    throw std::invalid_argument("rk3: parameters must satisfy 0 < c_2 < c_1 < 1");
  if (std::abs(c2 - 2.0 / 3.0) <= eps)
    throw std::invalid_argument("rk3: c_2 = 2/3 is excluded");
  ButcherTableau t(3);
  t.c(1) = c1;
  t.c(2) = c2;
  const double d = c2 * (2.0 - 3.0 * c2);
  t.a(2, 3) = c2;
  t.a(1, 3) = c1 * (3.0 * c2 - 3.0 * c2 * c2 - c1) / d;
  t.a(1, 2) = c1 * (c1 - c2) / d;
  t.b(3) = (-3.0 * c1 + 6.0 * c2 * c1 + 2.0 - 3.0 * c2) / (6.0 * c2 * c1);
  t.b(2) = (3.0 * c1 - 2.0) / (6.0 * c2 * (c1 - c2));
  t.b(1) = (2.0 - 3.0 * c2) / (6.0 * c1 * (c1 - c2));
  return t;
}

inline ButcherTableau rk4_5() {
  return detail::tabulated(
      5,
      {{4, 5, 0.2},
       {3, 5, -0.13242233706502626}, {3, 4, 0.5324223370650263},
       {2, 5, 0.019886552336434136}, {2, 4, 0.24294264564990678}, {2, 3, 0.3371708020136592},
       {1, 5, 0.1963917348918804}, {1, 4, -0.005472324607713924}, {1, 3, 0.2464094480422048},
       {1, 2, 0.36267114167362885}},
      {0.04623081469521772, 0.27341007455246313, 0.31905155483797115, -0.1432565921142024,
       0.5045641480285504});
}

inline ButcherTableau rk4_6() {
  return detail::tabulated(
      6,
      {{5, 6, 1.0 / 6.0},
       {4, 6, -0.025061513556965075}, {4, 5, 0.3583948468902984},
       {3, 6, 0.13841067828110443}, {3, 5, 0.1693249424852804}, {3, 4, 0.1922643792336152},
       {2, 6, -0.0038511700476725353}, {2, 5, 0.09581249968889799}, {2, 4, 0.22659933188130044},
       {2, 3, 0.34810600514414075},
       {1, 6, 0.16161918775745476}, {1, 5, 0.10244745111384074}, {1, 4, 0.1276198408649451},
       {1, 3, 0.12764301041543388}, {1, 2, 0.31400384318165875}},
      {0.03548077842498064, 0.2095257367170438, 0.3070892688820228, -0.033230011198136004,
       0.12968537675712494, 0.3514488504169638});
}

inline ButcherTableau rk5_7() {
  return detail::tabulated(
      7,
      {{6, 7, 1.0 / 7.0},
       {5, 7, -0.00849922984652299}, {5, 6, 0.2942135155608087},
       {4, 7, 0.012111601574373559}, {4, 6, 0.027194944061276653}, {4, 5, 0.3892648829357783},
       {3, 7, 0.17649344547970258}, {3, 6, 0.038519474866316364}, {3, 5, 0.013295135548829034},
       {3, 4, 0.3431205155337234},
       {2, 7, 0.20775831541493936}, {2, 6, -0.0013035026399939747}, {2, 5, 0.05244696764836481},
       {2, 4, 0.24416745620882727}, {2, 3, 0.21121647765357676},
       {1, 7, 0.04201635027665935}, {1, 6, 0.16939620723268453}, {1, 5, 0.17374202049423548},
       {1, 4, 0.1849766339309189}, {1, 3, -0.053226048370035584}, {1, 2, 0.3402376935783944}},
      {0.09233840526733901, 0.018048818525724868, 0.3316242728057178, 0.021246618173088202,
       0.2976169110457616, -0.12974529206631724, 0.3688702662486858});
}

inline ButcherTableau rk5_8() {
  return detail::tabulated(
      8,
      {{7, 8, 1.0 / 8.0},
       {6, 8, -0.019695026811446536}, {6, 7, 0.2696950268114465},
       {5, 8, 0.12027883922164721}, {5, 7, -0.025389113361355534}, {5, 6, 0.28011027413970835},
       {4, 8, 0.17348303333838974}, {4, 7, 0.15121241994785925}, {4, 6, 0.11261192763186804},
       {4, 5, 0.06269261908188303},
       {3, 8, 0.027377326034266746}, {3, 7, 0.048508067745817715}, {3, 6, 0.14412177807635515},
       {3, 5, 0.2178666996537625}, {3, 4, 0.18712612848979787},
       {2, 8, 0.12076055643080501}, {2, 7, 0.07237536565936713}, {2, 6, 0.1519401323946871},
       {2, 5, 0.16024192906367374}, {2, 4, -0.07416278224686454}, {2, 3, 0.3188447986983316},
       {1, 8, 0.03658677645498778}, {1, 7, 0.08834233979368933}, {1, 6, 0.20873825484619646},
       {1, 5, 0.22487804433654632}, {1, 4, -0.017586277300601805}, {1, 3, 0.03916189598076387},
       {1, 2, 0.29487896588841805}},
      {0.10264676180489864, -0.005963693910170281, 0.14240515226981773, 0.3625707619097686,
       -0.01436402197198115, 0.044156049175500874, 0.10972598940350983, 0.25882300131865577});
}

inline const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = {"euler", "rk2",   "rk3",  "rk4_5",
                                                 "rk4_6", "rk5_7", "rk5_8"};
  return names;
}

namespace detail {

inline double parse_number(const std::string& s) {
  auto slash = s.find('/');
  std::size_t used = 0;
  try {
    if (slash == std::string::npos) {
      double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    }
    std::string n = s.substr(0, slash), d = s.substr(slash + 1);
    double num = std::stod(n, &used);
    if (used != n.size()) throw std::invalid_argument(s);
    double den = std::stod(d, &used);
    if (used != d.size() || den == 0.0) throw std::invalid_argument(s);
    return num / den;
  } catch (const std::logic_error&) {
    throw std::invalid_argument("malformed number \"" + s + "\"");
  }
}

}  // namespace detail

/// Scheme selector: "euler", "rk2[:c1]", "rk3[:c1,c2]", "rk4_5", "rk4_6",
/// "rk5_7", "rk5_8". Parameters accept decimals or fractions such as 2/3.
inline Scheme scheme_from_name(const std::string& spec) {
  std::string base = spec, args;
  if (auto colon = spec.find(':'); colon != std::string::npos) {
    base = spec.substr(0, colon);
    args = spec.substr(colon + 1);
  }
  std::vector<double> p;
  if (!args.empty()) {
    std::stringstream ss(args);
    std::string tok;
    while (std::getline(ss, tok, ',')) p.push_back(detail::parse_number(tok));
  }
  auto want = [&](std::size_t n) {
    if (!args.empty() && p.size() != n)
      throw std::invalid_argument("scheme \"" + base + "\" takes " + std::to_string(n) +
                                  " parameter(s)");
  };
  if (base == "euler") {
    want(0);
    return {"Euler", 1, euler()};
  }
  if (base == "rk2") {
    want(1);
    double c1 = p.empty() ? 0.5 : p[0];
    return {"RK(2;" + detail::fmt_param(c1) + ")", 2, rk2(c1)};
  }
  if (base == "rk3") {
    want(2);
    double c1 = p.empty() ? 2.0 / 3.0 : p[0], c2 = p.empty() ? 1.0 / 3.0 : p[1];
    return {"RK(3;" + detail::fmt_param(c1) + "," + detail::fmt_param(c2) + ")", 3, rk3(c1, c2)};
  }
  want(0);
  if (base == "rk4_5") return {"RK(4;5)", 4, rk4_5()};
  if (base == "rk4_6") return {"RK(4;6)", 4, rk4_6()};
  if (base == "rk5_7") return {"RK(5;7)", 5, rk5_7()};
  if (base == "rk5_8") return {"RK(5;8)", 5, rk5_8()};
  throw std::invalid_argument("unknown scheme \"" + spec + "\"");
}

inline ButcherTableau load_tableau_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open tableau file \"" + path + "\"");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("tableau file \"" + path + "\": " + e.what());
  }
  return tableau_from_json(j);
}

}  // namespace bsderk
