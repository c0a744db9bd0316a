#include <gtest/gtest.h>

#include <random>
#include <set>

#include "bsderk/trees.hpp"
#include "oracles.hpp"

using namespace bsderk;

TEST(Trees, CountsPerOrder) {
  // Frozen from the brute-force ordered-tree oracle (EnumerationMatchesBruteForce).
  const std::size_t expected[] = {1, 3, 8, 21, 58, 166};
  for (unsigned r = 1; r <= 6; ++r) EXPECT_EQ(enumerate_trees(r).size(), expected[r - 1]) << r;
}

TEST(Trees, OrderFiveIncludesRootLabelledStar) {
  auto star = graft({leaf(0), leaf(0), leaf(0)}, 1);
  EXPECT_EQ(order(star), 5u);
  auto set = enumerate_trees(5);
  EXPECT_NE(std::find(set.trees.begin(), set.trees.end(), star), set.trees.end());
}

TEST(Trees, MinusCountsPerOrder) {
  const std::size_t expected[] = {0, 1, 3, 7, 16};
  for (unsigned r = 1; r <= 5; ++r)
    EXPECT_EQ(enumerate_trees_minus(r).size(), expected[r - 1]) << r;
}

TEST(Trees, MinusListingUpToFive) {
  std::set<std::string> want = {
      "[ ]_1", "[ ]_2", "[[ ]_1]_0", "[ ]_3", "[[ ]_2]_0", "[[ ]_1]_1", "[[[ ]_1]_0]_0",
      "[ ]_4", "[[ ]_3]_0", "[[ ]_2]_1", "[[ ]_1]_2", "[[[ ]_2]_0]_0", "[[ ]_1 [ ]_1]_0",
      "[[[ ]_1]_1]_0", "[[[ ]_1]_0]_1", "[[[[ ]_1]_0]_0]_0"};
  std::set<std::string> got;
  for (const auto& t : enumerate_trees_minus(5).trees) got.insert(to_notation(t));
  EXPECT_EQ(got, want);
}

TEST(Trees, EnumerationMatchesBruteForce) {
  for (unsigned r = 1; r <= 6; ++r) {
    auto bf = oracle::brute_force(r);
    auto set = enumerate_trees(r);
    ASSERT_EQ(set.size(), bf.alpha.size()) << r;
    std::set<std::string> seen;
    for (const auto& t : set.trees) {
      auto key = oracle::canon(t.representative());
      ASSERT_TRUE(bf.alpha.count(key)) << to_notation(t);
      EXPECT_TRUE(seen.insert(key).second) << "duplicate " << to_notation(t);
      EXPECT_EQ(alpha(t), bf.alpha[key]) << to_notation(t);
      // orbit-stabilizer: |sibling permutations| = alpha * S
      EXPECT_EQ(oracle::permutation_group(t.representative()), alpha(t) * symmetry(t))
          << to_notation(t);
    }
  }
}

TEST(Trees, CanonicalOrdering) {
  auto set = enumerate_trees(5);
  for (std::size_t q = 1; q < set.size(); ++q) EXPECT_LT(set.trees[q - 1], set.trees[q]);
  EXPECT_EQ(set.trees.front(), leaf(0));
}

TEST(Trees, NotationRoundTrip) {
  for (const auto& t : enumerate_trees(6).trees) {
    auto s = to_notation(t);
    EXPECT_EQ(parse_notation(s), t) << s;
    EXPECT_EQ(to_notation(parse_notation(s)), s);
  }
  EXPECT_EQ(to_notation(graft({leaf(1), leaf(1)}, 0)), "[[ ]_1 [ ]_1]_0");
  EXPECT_EQ(parse_notation("[[]_1[ ]_0]_2"), graft({leaf(0), leaf(1)}, 2));
}

TEST(Trees, NotationRejectsMalformed) {
  for (const char* bad : {"", "[", "[ ]", "[ ]_", "[ ]_x", "[ ]_1 junk", "[[ ]_1", "]_0"})
    EXPECT_THROW(parse_notation(bad), ParseError) << bad;
}

TEST(Trees, PermutationInvariance) {
  std::mt19937 rng(7);
  for (const auto& t : enumerate_trees(6).trees) {
    LNTree rep = t.representative();
    for (int trial = 0; trial < 5; ++trial) {
      LNTree shuffled = rep;
      std::function<void(LNTree&)> shuffle = [&](LNTree& n) {
        std::shuffle(n.children.begin(), n.children.end(), rng);
        for (auto& c : n.children) shuffle(c);
      };
      shuffle(shuffled);
      ULNTree u = canonicalize(shuffled);
      EXPECT_EQ(u, t);
      EXPECT_EQ(order(u), order(t));
      EXPECT_EQ(symmetry(u), symmetry(t));
      EXPECT_EQ(tree_factorial(u), tree_factorial(t));
    }
  }
}

TEST(Trees, ScalarFunctionsOnSmallCases) {
  EXPECT_EQ(order(leaf(3)), 4u);
  EXPECT_EQ(tree_factorial(leaf(3)), 6u);
  EXPECT_EQ(symmetry(graft({leaf(0), leaf(0)}, 0)), 2u);
  EXPECT_EQ(tree_factorial(graft({leaf(0), leaf(0)}, 0)), 2u);
  EXPECT_EQ(order(graft({leaf(0)}, 2)), 4u);
  EXPECT_EQ(tree_factorial(graft({leaf(0)}, 2)), 2u);
  EXPECT_EQ(nesting_depth(leaf(0)), 1u);
  EXPECT_EQ(nesting_depth(parse_notation("[[[ ]_0]_0 [ ]_0]_0")), 3u);
}

TEST(Trees, AlphaCountsOrderedRepresentatives) {
  EXPECT_EQ(alpha(parse_notation("[[[ ]_4 [ ]_4]_2 [ ]_3]_1")), 2u);
  EXPECT_EQ(alpha(parse_notation("[[[ ]_4 [ ]_5]_2 [ ]_3]_1")), 4u);
}

TEST(Trees, BranchRelation) {
  auto t = parse_notation("[[[ ]_0]_1 [ ]_2]_0");
  EXPECT_TRUE(has_branch(t, leaf(0)));
  EXPECT_TRUE(has_branch(t, leaf(2)));
  EXPECT_TRUE(has_branch(t, parse_notation("[[ ]_0]_1")));
  EXPECT_FALSE(has_branch(t, t));
  EXPECT_FALSE(has_branch(leaf(0), leaf(0)));
}

TEST(Trees, EnumerationBound) {
  EXPECT_NO_THROW(enumerate_trees(kMaxEnumerationOrder));
  EXPECT_THROW(enumerate_trees(kMaxEnumerationOrder + 1), ResourceError);
}

TEST(Trees, JsonExport) {
  auto j = to_json(enumerate_trees(3));
  EXPECT_EQ(j["count"], 8);
  EXPECT_EQ(j["trees"][0]["notation"], "[ ]_0");
  for (const auto& row : j["trees"])
    for (const char* key : {"notation", "order", "symmetry", "factorial", "alpha"})
      EXPECT_TRUE(row.contains(key));
}
