#include <gtest/gtest.h>

#include <random>
#include <set>
#include <unordered_set>

#include "wfmgf/error.hpp"
#include "wfmgf/multi_index.hpp"

namespace wfmgf {
namespace {

TEST(MultiIndex, RejectsNegativeComponents) {
  EXPECT_THROW(MultiIndex({1, -1}), InvalidArgument);
}

TEST(MultiIndex, LoweredAndRaised) {
  const MultiIndex a{2, 0, 1};
  EXPECT_EQ(a.lowered(0), (MultiIndex{1, 0, 1}));
  EXPECT_EQ(a.raised(1), (MultiIndex{2, 1, 1}));
  EXPECT_THROW(a.lowered(1), InvalidArgument);
  EXPECT_EQ(degree(a), 3);
  EXPECT_EQ(a.to_string(), "(2,0,1)");
}

TEST(MultiIndex, Factorial) {
  EXPECT_EQ(multi_factorial(MultiIndex{3, 2}), 12u);
  EXPECT_EQ(multi_factorial(MultiIndex{0, 0}), 1u);
  EXPECT_EQ(multi_factorial(MultiIndex{20}), 2432902008176640000u);
  EXPECT_THROW(multi_factorial(MultiIndex{21}), Overflow);
}

TEST(MultiIndex, BinomialMatchesPascalTriangle) {
  std::vector<std::vector<std::uint64_t>> pascal(63);
  for (int n = 0; n < 63; ++n) {
    pascal[n].assign(n + 1, 1);
    for (int k = 1; k < n; ++k) pascal[n][k] = pascal[n - 1][k - 1] + pascal[n - 1][k];
  }
  for (int n = 0; n < 63; ++n) {
    for (int k = 0; k <= n; ++k) ASSERT_EQ(binomial(n, k), pascal[n][k]) << n << "," << k;
  }
  EXPECT_EQ(binomial(5, 7), 0u);
  EXPECT_EQ(binomial(66, 33), 7219428434016265740u);
  EXPECT_THROW(binomial(68, 34), Overflow);
}

TEST(MultiIndex, GradedOrderPutsLeadingComponentsFirst) {
  const auto all = graded_enumerate(2, 2);
  const std::vector<MultiIndex> expected{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
  EXPECT_EQ(all, expected);
}

TEST(MultiIndex, EnumerationCountsAndOrder) {
  for (int K = 1; K <= 4; ++K) {
    for (int d = 0; d <= 6; ++d) {
      const auto all = graded_enumerate(K, d);
      ASSERT_EQ(all.size(), binomial(d + K, K));
      EXPECT_TRUE(std::is_sorted(all.begin(), all.end(), GradedLess{}));
      const std::set<MultiIndex> unique(all.begin(), all.end());
      EXPECT_EQ(unique.size(), all.size());
      EXPECT_EQ(enumerate_degree(K, d).size(), binomial(d + K - 1, K - 1));
    }
  }
}

TEST(MultiIndex, HashAgreesWithEquality) {
  std::unordered_set<MultiIndex> seen;
  for (const auto& a : graded_enumerate(3, 5)) EXPECT_TRUE(seen.insert(a).second);
  EXPECT_FALSE(seen.insert(MultiIndex{1, 2, 2}).second);
}

TEST(MultiIndex, Power) {
  const std::vector<double> x{0.5, 2.0};
  EXPECT_DOUBLE_EQ(power(x, MultiIndex{3, 2}), 0.5);
  EXPECT_THROW(power(x, MultiIndex{1}), InvalidArgument);
}

TEST(SimplexGrid, TwoAlleleLatticeIsIdentityIndexed) {
  const SimplexGrid grid(1, 8);
  ASSERT_EQ(grid.size(), 9u);
  for (int i = 0; i <= 8; ++i) {
    EXPECT_EQ(grid.position(MultiIndex{i}), static_cast<std::size_t>(i));
    EXPECT_DOUBLE_EQ(grid.frequencies(i)[0], i / 8.0);
  }
}

TEST(SimplexGrid, MultiAlleleLattice) {
  const SimplexGrid grid(2, 4);
  EXPECT_EQ(grid.size(), binomial(6, 2));
  for (std::size_t pos = 0; pos < grid.size(); ++pos) {
    EXPECT_EQ(grid.position(grid.state(pos)), pos);
    EXPECT_LE(degree(grid.state(pos)), 4);
  }
  EXPECT_THROW(grid.position(MultiIndex{3, 2}), InvalidArgument);
  EXPECT_THROW(grid.position(MultiIndex{1}), InvalidArgument);
}

}  // namespace
}  // namespace wfmgf
