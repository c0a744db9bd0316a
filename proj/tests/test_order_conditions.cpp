#include <gtest/gtest.h>

#include <random>

#include "bsderk/order_conditions.hpp"
#include "bsderk/tableaux.hpp"

using namespace bsderk;

namespace {

ButcherTableau generic3() {
  ButcherTableau t(3);
  t.c(1) = 0.7;
  t.c(2) = 1.0 / 3.0;
  t.a(1, 2) = 0.5;
  t.a(1, 3) = 0.2;
  t.a(2, 3) = 1.0 / 3.0;
  t.b(1) = 0.5;
  t.b(2) = 1.0 / 3.0;
  t.b(3) = 1.0 / 6.0;
  return t;
}

struct Frozen {
  const char* tree;
  double A[4];
};

// Exact rational values from an independent fraction-arithmetic evaluation.
const Frozen kGeneric[] = {
    {"[ ]_1", {7.0 / 180, 47.0 / 600, 1.0 / 18, 0}},
    {"[ ]_3", {4687.0 / 162000, 35881.0 / 1080000, 1.0 / 108, 0}},
    {"[[ ]_1]_1", {7807.0 / 324000, 11.0 / 1080, 0, 0}},
    {"[[ ]_1 [ ]_1]_0", {79643.0 / 19440000, 1.0 / 648, 0, 0}},
    {"[[[ ]_1]_0]_0", {1.0 / 72, 0, 0, 0}},
    {"[[ ]_2]_0", {8183.0 / 243000, 1.0 / 81, 0, 0}},
    {"[[[ ]_1]_0]_1", {1.0 / 240, 0, 0, 0}},
    {"[ ]_4", {177683.0 / 4860000, 237367.0 / 10125000, 4.0 / 1215, 0}},
};

const Frozen kRk3[] = {
    {"[ ]_1", {0, 0, 1.0 / 18, 0}},
    {"[ ]_3", {1.0 / 36, -2.0 / 81, 1.0 / 108, 0}},
    {"[[ ]_1]_1", {0, 1.0 / 81, 0, 0}},
    {"[[ ]_1 [ ]_1]_0", {0, 1.0 / 486, 0, 0}},
    {"[[[ ]_1]_0]_0", {1.0 / 36, 0, 0, 0}},
    {"[[ ]_2]_0", {-1.0 / 54, 4.0 / 243, 0, 0}},
    {"[[[ ]_1]_0]_1", {1.0 / 108, 0, 0, 0}},
    {"[ ]_4", {8.0 / 135, -22.0 / 1215, 4.0 / 1215, 0}},
};

std::vector<std::pair<std::string, ButcherTableau>> builtins() {
  return {{"euler", euler()},     {"rk2", rk2(0.5)},    {"rk3", rk3(2.0 / 3, 1.0 / 3)},
          {"rk4_5", rk4_5()},     {"rk4_6", rk4_6()},   {"rk5_7", rk5_7()},
          {"rk5_8", rk5_8()}};
}

}  // namespace

TEST(ElementaryCoefficients, FrozenRationalValues) {
  for (const auto& [tab, rows] :
       {std::pair{generic3(), std::vector<Frozen>(std::begin(kGeneric), std::end(kGeneric))},
        std::pair{rk3(2.0 / 3, 1.0 / 3), std::vector<Frozen>(std::begin(kRk3), std::end(kRk3))}}) {
    for (const auto& row : rows) {
      auto A = elementary_coefficients(tab, parse_notation(row.tree));
      for (int i = 0; i <= 3; ++i) EXPECT_NEAR(A[i], row.A[i], 1e-15) << row.tree << " i=" << i;
    }
  }
}

TEST(ElementaryCoefficients, EulerLeafOne) {
  EXPECT_DOUBLE_EQ(elementary_coefficient(euler(), 0, leaf(1)), 0.5);
  EXPECT_DOUBLE_EQ(elementary_coefficient(euler(), 0, leaf(0)), 0.0);
}

TEST(ElementaryCoefficients, LastStageVanishes) {
  for (const auto& [name, t] : builtins())
    for (const auto& tree : enumerate_trees(5).trees)
      EXPECT_EQ(elementary_coefficient(t, t.m, tree), 0.0) << name << " " << to_notation(tree);
}

// Trees carrying [ ]_0 as a branch vanish identically once the row sums and
// sum(b) = 1 hold.
TEST(ElementaryCoefficients, LeafZeroBranchSimplification) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  auto trees = enumerate_trees(6);
  for (int trial = 0; trial < 50; ++trial) {
    int m = 2 + trial % 6;
    ButcherTableau t(m);
    std::vector<double> c(static_cast<std::size_t>(m - 1));
    for (auto& v : c) v = 0.5 * (U(rng) + 1.0);
    std::sort(c.begin(), c.end(), std::greater<>());
    for (int i = 1; i < m; ++i) t.c(i) = c[static_cast<std::size_t>(i - 1)];
    for (int i = 1; i < m; ++i) {
      double s = 0;
      for (int j = i + 1; j < m; ++j) s += (t.a(i, j) = U(rng));
      t.a(i, m) = t.c(i) - s;
    }
    double s = 0;
    for (int j = 1; j < m; ++j) s += (t.b(j) = U(rng));
    t.b(m) = 1.0 - s;
    for (const auto& tree : trees.trees) {
      if (!has_branch(tree, leaf(0))) continue;
      auto A = elementary_coefficients(t, tree);
      for (int i = 0; i <= m; ++i) EXPECT_NEAR(A[i], 0.0, 1e-12) << to_notation(tree);
    }
  }
}

TEST(CheckCr, BuiltinsPassAtNominalOrder) {
  const unsigned orders[] = {1, 2, 3, 4, 4, 5, 5};
  auto b = builtins();
  for (std::size_t q = 0; q < b.size(); ++q) {
    auto rep = check_Cr(b[q].second, orders[q], 1e-10);
    EXPECT_TRUE(rep.passed()) << b[q].first << " max residual " << rep.max_residual();
    EXPECT_EQ(rep.entries.size(), enumerate_trees_minus(orders[q]).size() + b[q].second.m);
  }
}

TEST(CheckCr, ImpliesEveryTreeOfTheOrder) {
  const unsigned orders[] = {1, 2, 3, 4, 4, 5, 5};
  auto b = builtins();
  for (std::size_t q = 0; q < b.size(); ++q)
    for (const auto& tree : enumerate_trees(orders[q]).trees)
      EXPECT_NEAR(elementary_coefficient(b[q].second, 0, tree), 0.0, 1e-10)
          << b[q].first << " " << to_notation(tree);
}

TEST(CheckCr, EulerFailsSecondOrderOnLeafOne) {
  auto rep = check_Cr(euler(), 2);
  EXPECT_FALSE(rep.passed());
  ASSERT_NE(rep.first_failure(), nullptr);
  EXPECT_EQ(rep.first_failure()->key, "A_0([ ]_1)");
  EXPECT_EQ(rep.first_failure()->residual, 0.5);
}

TEST(CheckCr, NominalOrderIsSharp) {
  const unsigned orders[] = {1, 2, 3, 4, 4, 5, 5};
  auto b = builtins();
  for (std::size_t q = 0; q < b.size(); ++q)
    EXPECT_FALSE(check_Cr(b[q].second, orders[q] + 1, 1e-10).passed()) << b[q].first;
}

TEST(CheckTable1, BuiltinsPassAtNominalOrder) {
  const unsigned orders[] = {1, 2, 3, 4, 4, 5, 5};
  auto b = builtins();
  for (std::size_t q = 0; q < b.size(); ++q) {
    auto rep = check_table1(b[q].second, orders[q], 1e-10);
    EXPECT_TRUE(rep.passed()) << b[q].first << "\n" << to_markdown(rep);
  }
}

TEST(CheckTable1, ConditionCountPerOrder) {
  // (1)-(4), (1)-(5), (1)-(7), (1)-(11), (1)-(20)
  const std::size_t count[] = {4, 5, 7, 11, 20};
  for (unsigned r = 1; r <= 5; ++r) EXPECT_EQ(check_table1(rk5_8(), r).entries.size(), count[r - 1]);
}

TEST(CheckTable1, EulerNamesConditionFive) {
  auto rep = check_table1(euler(), 2);
  ASSERT_NE(rep.first_failure(), nullptr);
  EXPECT_EQ(rep.first_failure()->key, "(5)");
  EXPECT_DOUBLE_EQ(rep.first_failure()->residual, -0.5);
}

TEST(CheckTable1, RejectsOrderAboveFive) {
  EXPECT_THROW(check_table1(rk5_8(), 6), DomainError);
}

TEST(CheckTable1, AgreesWithCrOnBuiltins) {
  for (const auto& [name, t] : builtins())
    for (unsigned r = 1; r <= 5; ++r)
      EXPECT_EQ(check_table1(t, r, 1e-9).passed(), check_Cr(t, r, 1e-9).passed())
          << name << " r=" << r;
}

TEST(CheckTable1, ReportsStructuralViolations) {
  ButcherTableau t = rk2(0.5);
  t.c(1) = 0.0;
  auto rep = check_table1(t, 1);
  EXPECT_FALSE(rep.entries[0].passed);
  ButcherTableau u = rk2(0.5);
  u.a(2, 1) = 0.1;
  EXPECT_FALSE(check_table1(u, 1).entries[1].passed);
}

TEST(RenderCondition, Examples) {
  EXPECT_EQ(render_condition(leaf(0)), "Σ_j b_j = 1");
  EXPECT_EQ(render_condition(leaf(1)), "Σ_j b_j(1−c_j) = 1/2");
  EXPECT_EQ(render_condition(graft({leaf(1)}, 0)), "Σ_{i,j} b_i a_{ij}(c_i−c_j) = Σ_i b_i c_i²/2");
  EXPECT_EQ(render_condition(graft({leaf(1), leaf(1)}, 0)),
            "Σ_{i,j,k} b_i a_{ij}(c_i−c_j) a_{ik}(c_i−c_k) = Σ_{i,k} b_i a_{ik}(c_i−c_k) c_i²/2 + "
            "Σ_{i,j} b_i a_{ij}(c_i−c_j) c_i²/2 − Σ_i b_i c_i⁴/4");
}

TEST(ConditionReport, JsonShape) {
  auto j = to_json(check_Cr(rk2(0.5), 2));
  EXPECT_EQ(j["kind"], "Cr");
  EXPECT_TRUE(j["passed"].get<bool>());
  EXPECT_EQ(j["conditions"].size(), 3u);
}
