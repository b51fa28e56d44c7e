#include <gtest/gtest.h>

#include <cmath>

#include "wfmgf/error.hpp"
#include "wfmgf/montecarlo.hpp"

namespace wfmgf::montecarlo {
namespace {

McConfig config(int two_n, int count, int replicates, std::uint64_t seed = 7) {
  McConfig cfg;
  cfg.two_n = two_n;
  cfg.initial_counts = {count};
  cfg.replicates = replicates;
  cfg.seed = seed;
  cfg.threads = 2;
  return cfg;
}

TEST(MonteCarlo, Validation) {
  EXPECT_NO_THROW(McConfig{}.validate());
  auto bad = config(10, 11, 10);
  EXPECT_THROW(bad.validate(), InvalidArgument);
  bad = config(10, -1, 10);
  EXPECT_THROW(bad.validate(), InvalidArgument);
  bad = config(10, 5, 0);
  EXPECT_THROW(bad.validate(), InvalidArgument);
  bad = config(0, 0, 10);
  EXPECT_THROW(bad.validate(), InvalidArgument);
  bad = config(10, 5, 10);
  bad.initial_counts.clear();
  EXPECT_THROW(bad.validate(), InvalidArgument);
  EXPECT_THROW(simulate(config(10, 5, 10), {-1}), InvalidArgument);
  EXPECT_THROW(empirical_moments(simulate(config(10, 5, 10), {1}), {MultiIndex{1, 1}}),
               InvalidArgument);
}

TEST(MonteCarlo, GenerationZeroIsTheInitialState) {
  const auto paths = simulate(config(20, 6, 50), {0});
  for (int r = 0; r < 50; ++r) EXPECT_DOUBLE_EQ(paths.frequency(0, r, 0), 0.3);
}

TEST(MonteCarlo, AbsorbingBoundaries) {
  for (int count : {0, 20}) {
    const auto paths = simulate(config(20, count, 200), {1, 30});
    for (std::size_t g = 0; g < 2; ++g) {
      for (int r = 0; r < 200; ++r) ASSERT_EQ(paths.frequency(g, r, 0), count / 20.0);
    }
  }
  const auto fix = empirical_fixation(config(20, 20, 100), {5});
  EXPECT_EQ(fix[0].fixed_fraction, 1.0);
  EXPECT_EQ(fix[0].lost_fraction, 0.0);
  EXPECT_EQ(fix[0].fixed_std_error, 0.0);
}

TEST(MonteCarlo, ReproducibleAndThreadIndependent) {
  auto cfg = config(100, 37, 500, 42);
  cfg.threads = 1;
  const auto one = simulate(cfg, {3, 50});
  cfg.threads = 3;
  const auto three = simulate(cfg, {3, 50});
  EXPECT_EQ(one.counts, three.counts);
  cfg.seed = 43;
  EXPECT_NE(simulate(cfg, {3, 50}).counts, one.counts);
}

TEST(MonteCarlo, SampleGenerationsNeedNotBeSorted) {
  auto cfg = config(50, 20, 100, 3);
  const auto sorted = simulate(cfg, {2, 9});
  const auto reversed = simulate(cfg, {9, 2});
  EXPECT_EQ(sorted.counts[0], reversed.counts[1]);
  EXPECT_EQ(sorted.counts[1], reversed.counts[0]);
}

// For the discrete chain, E[x] = p and E[x(1-x)] = p(1-p)(1-1/2N)^g exactly.
TEST(MonteCarlo, MomentsMatchDiscreteChain) {
  auto cfg = config(200, 100, 100000, 11);
  cfg.threads = 0;
  const auto rows = simulate_empirical_moments(cfg, {MultiIndex{1}, MultiIndex{2}}, {100});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_DOUBLE_EQ(rows[0].time, 0.5);
  EXPECT_NEAR(rows[0].mean, 0.5, 4 * rows[0].std_error);
  const double m2 = 0.5 - 0.25 * std::pow(1 - 1.0 / 200, 100);
  EXPECT_NEAR(rows[1].mean, m2, 4 * rows[1].std_error);
  EXPECT_GT(rows[1].std_error, 0);
  EXPECT_LT(rows[1].std_error, 2e-3);
}

TEST(MonteCarlo, HeterozygosityDecay) {
  auto cfg = config(40, 12, 40000, 5);
  const auto rows = empirical_heterozygosity(simulate(cfg, {0, 10, 40}));
  const double p = 0.3;
  for (const auto& row : rows) {
    const double expected = 2 * p * (1 - p) * std::pow(1 - 1.0 / 40, row.generation);
    EXPECT_NEAR(row.mean, expected, std::max(4 * row.std_error, 1e-12)) << row.generation;
  }
}

TEST(MonteCarlo, LongRunFixation) {
  const auto rows = empirical_fixation(config(20, 6, 20000, 9), {2000});
  EXPECT_NEAR(rows[0].fixed_fraction + rows[0].lost_fraction, 1.0, 1e-12);
  EXPECT_NEAR(rows[0].fixed_fraction, 0.3, 4 * rows[0].fixed_std_error);
}

TEST(MonteCarlo, MultiAlleleCountsStayOnTheSimplex) {
  McConfig cfg;
  cfg.two_n = 30;
  cfg.initial_counts = {10, 5};
  cfg.generations = 20;
  cfg.replicates = 2000;
  cfg.seed = 13;
  const auto paths = simulate(cfg, {20});
  double mean0 = 0;
  double mean1 = 0;
  for (int r = 0; r < cfg.replicates; ++r) {
    const int a = paths.counts[0][2 * r];
    const int b = paths.counts[0][2 * r + 1];
    ASSERT_GE(a, 0);
    ASSERT_GE(b, 0);
    ASSERT_LE(a + b, 30);
    mean0 += paths.frequency(0, r, 0);
    mean1 += paths.frequency(0, r, 1);
  }
  const auto rows = empirical_moments(paths, {MultiIndex{1, 0}, MultiIndex{0, 1}, MultiIndex{1, 1}});
  EXPECT_NEAR(rows[0].mean, mean0 / cfg.replicates, 1e-12);
  EXPECT_NEAR(rows[1].mean, mean1 / cfg.replicates, 1e-12);
  EXPECT_NEAR(rows[0].mean, 1.0 / 3, 4 * rows[0].std_error);
  EXPECT_NEAR(rows[1].mean, 1.0 / 6, 4 * rows[1].std_error);
  // E[x1 x2] = p1 p2 (1 - 1/2N)^g for the multinomial chain.
  EXPECT_NEAR(rows[2].mean, (1.0 / 18) * std::pow(1 - 1.0 / 30, 20), 4 * rows[2].std_error);
}

}  // namespace
}  // namespace wfmgf::montecarlo
