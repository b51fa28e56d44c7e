#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "wfmgf/error.hpp"
#include "wfmgf/scalar.hpp"
#include "wfmgf/master.hpp"
#include "wfmgf/spectral2.hpp"
#include "wfmgf/spectral_k.hpp"

namespace wfmgf::master {
namespace {

// x(1-x)/2 times the second derivative of the k-th Lagrange basis
// polynomial on nodes j/2N, evaluated at node i.
Rational lagrange_generator_entry(int two_n, int i, int k) {
  const Rational x(i, two_n);
  const Rational zk(k, two_n);
  Rational denom = 1;
  for (int j = 0; j <= two_n; ++j) {
    if (j != k) denom *= zk - Rational(j, two_n);
  }
  Rational second = 0;
  for (int a = 0; a <= two_n; ++a) {
    for (int b = a + 1; b <= two_n; ++b) {
      if (a == k || b == k) continue;
      Rational prod = 2;
      for (int j = 0; j <= two_n; ++j) {
        if (j != k && j != a && j != b) prod *= x - Rational(j, two_n);
      }
      second += prod;
    }
  }
  return x * (1 - x) / 2 * second / denom;
}

TEST(Master, WrightFisherSmallestRows) {
  const auto b = build_rate_wf(2);
  EXPECT_EQ(b.time_unit(), "generation");
  EXPECT_DOUBLE_EQ(b.entries(1, 0), 0.25);
  EXPECT_DOUBLE_EQ(b.entries(1, 1), -0.5);
  EXPECT_DOUBLE_EQ(b.entries(1, 2), 0.25);
  for (int k = 0; k <= 2; ++k) {
    EXPECT_EQ(b.entries(0, k), 0);
    EXPECT_EQ(b.entries(2, k), 0);
  }
}

TEST(Master, WrightFisherHasNoMeanDrift) {
  const auto b = build_rate_wf(4);
  double drift = 0;
  for (int k = 0; k <= 4; ++k) drift += k / 4.0 * b.entries(2, k);
  EXPECT_NEAR(drift, 0, 1e-15);
}

TEST(Master, WrightFisherOffDiagonalNonnegativeAndRowsSumToZero) {
  for (int two_n : {16, 256, 2048}) {
    const auto b = build_rate_wf(two_n);
    for (int i = 0; i <= two_n; ++i) {
      EXPECT_NEAR(b.entries.row(i).sum(), 0, 1e-10);
      for (int k = 0; k <= two_n; ++k) {
        if (k != i) ASSERT_GE(b.entries(i, k), 0);
      }
    }
  }
}

TEST(Master, PopulationChecks) {
  EXPECT_THROW(build_rate_wf(3), InvalidArgument);
  EXPECT_THROW(build_rate_wf(0), InvalidArgument);
  EXPECT_THROW(build_rate_wf(kWrightFisherCap + 2), InvalidArgument);
  EXPECT_THROW(build_rate_implicit(34, Arithmetic::floating), InvalidArgument);
  EXPECT_THROW(build_rate_implicit(66, Arithmetic::exact), InvalidArgument);
  EXPECT_THROW(build_rate_implicit_k(4, 4), InvalidArgument);
  EXPECT_THROW(build_rate_implicit_k(3, 12, Arithmetic::exact), InvalidArgument);
  EXPECT_THROW(build_rate_implicit_k(3, 14), InvalidArgument);  // 680 states
}

TEST(Master, ImplicitSmallestRows) {
  const auto a = build_rate_implicit(2, Arithmetic::exact);
  EXPECT_EQ(a.time_unit(), "diffusion");
  EXPECT_DOUBLE_EQ(a.entries(1, 0), 0.5);
  EXPECT_DOUBLE_EQ(a.entries(1, 1), -1);
  EXPECT_DOUBLE_EQ(a.entries(1, 2), 0.5);
  for (int k = 0; k <= 2; ++k) EXPECT_EQ(a.entries(0, k), 0);
  const auto b = build_rate_wf(2);
  EXPECT_TRUE(a.entries.isApprox(2 * b.entries));
}

TEST(Master, ImplicitMatchesLagrangeOracle) {
  for (int two_n : {4, 8, 12}) {
    const auto exact = build_rate_implicit(two_n, Arithmetic::exact);
    const auto floating = build_rate_implicit(two_n, Arithmetic::floating);
    EXPECT_TRUE(exact.exact);
    EXPECT_FALSE(floating.exact);
    EXPECT_LT(floating.residual, kResidualTolerance);
    for (int i = 0; i <= two_n; ++i) {
      for (int k = 0; k <= two_n; ++k) {
        const double oracle = to_double(lagrange_generator_entry(two_n, i, k));
        EXPECT_NEAR(exact.entries(i, k), oracle, 1e-12 * std::max(1.0, std::abs(oracle)));
        // Residual-gated, not entry-gated: the Vandermonde systems are ill
        // conditioned, so entries carry a few more digits of error.
        EXPECT_NEAR(floating.entries(i, k), oracle, 1e-6 * std::max(1.0, std::abs(oracle)));
      }
    }
  }
}

TEST(Master, ImplicitHasNegativeOffDiagonalRates) {
  const auto a = build_rate_implicit(16);
  double smallest = 0;
  for (int i = 0; i <= 16; ++i) {
    for (int k = 0; k <= 16; ++k) {
      if (k != i) smallest = std::min(smallest, a.entries(i, k));
    }
  }
  EXPECT_LT(smallest, 0);
}

TEST(Master, AutomaticModeFallsBackOrStaysAccurate) {
  for (int two_n : {16, 32, 48}) {
    const auto a = build_rate_implicit(two_n);
    if (a.exact) {
      if (two_n <= kImplicitFloatCap) EXPECT_FALSE(a.warnings.empty());
    } else {
      EXPECT_LE(a.residual, kResidualTolerance);
    }
  }
  EXPECT_TRUE(build_rate_implicit(48).exact);
}

TEST(Master, ImplicitKWithOneCoordinateIsImplicitA) {
  const auto a = build_rate_implicit(8, Arithmetic::exact);
  const auto k1 = build_rate_implicit_k(1, 8, Arithmetic::exact);
  EXPECT_EQ(k1.scheme, Scheme::implicit_k);
  EXPECT_LT((a.entries - k1.entries).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Master, ImplicitKSmallLattice) {
  const auto b = build_rate_implicit_k(2, 2);
  const auto& grid = b.grid;
  ASSERT_EQ(grid.size(), 6u);
  for (const MultiIndex& vertex : {MultiIndex{2, 0}, MultiIndex{0, 2}, MultiIndex{0, 0}}) {
    const auto i = static_cast<Eigen::Index>(grid.position(vertex));
    EXPECT_LT(b.entries.row(i).cwiseAbs().maxCoeff(), 1e-14) << vertex;
  }
  for (Eigen::Index i = 0; i < b.entries.rows(); ++i) {
    EXPECT_NEAR(b.entries.row(i).sum(), 0, 1e-12);
    for (int u = 0; u < 2; ++u) {
      double drift = 0;
      for (std::size_t j = 0; j < grid.size(); ++j) {
        drift += grid.frequencies(j)[u] * b.entries(i, static_cast<Eigen::Index>(j));
      }
      EXPECT_NEAR(drift, 0, 1e-12);
    }
  }
}

TEST(Master, ImplicitKExactAndFloatingAgree) {
  const auto exact = build_rate_implicit_k(2, 6, Arithmetic::exact);
  const auto floating = build_rate_implicit_k(2, 6, Arithmetic::floating);
  const double scale = exact.entries.cwiseAbs().maxCoeff();
  EXPECT_LT((exact.entries - floating.entries).cwiseAbs().maxCoeff(), 1e-8 * scale);
}

TEST(Master, TransitionAtTimeZeroIsIdentity) {
  for (const auto& rates : {build_rate_implicit(8), build_rate_wf(8)}) {
    const auto tr = transition_matrix(rates, 0.0);
    EXPECT_TRUE(tr.P.isApprox(Eigen::MatrixXd::Identity(9, 9)));
  }
  EXPECT_THROW(transition_matrix(build_rate_wf(4), -1.0), InvalidArgument);
}

TEST(Master, TransitionClosedFormAtTwoCopies) {
  const auto a = build_rate_implicit(2);
  const auto b = build_rate_wf(2);
  for (double t : {0.1, 1.0, 7.0}) {
    const auto pa = transition_matrix(a, t).row(1);
    EXPECT_NEAR(pa[0], (1 - std::exp(-t)) / 2, 1e-14);
    EXPECT_NEAR(pa[1], std::exp(-t), 1e-14);
    EXPECT_NEAR(pa[2], (1 - std::exp(-t)) / 2, 1e-14);
    const auto pb = transition_matrix(b, t).row(1);
    EXPECT_NEAR(pb[1], std::exp(-t / 2), 1e-14);
  }
  const auto limit = transition_matrix(a, 60.0).row(1);
  EXPECT_NEAR(limit[0], 0.5, 1e-12);
  EXPECT_NEAR(limit[1], 0.0, 1e-12);
  EXPECT_NEAR(limit[2], 0.5, 1e-12);
}

TEST(Master, SemigroupAndCommutation) {
  for (const auto& rates : {build_rate_implicit(16), build_rate_wf(16)}) {
    for (auto [t, s] : {std::pair{0.3, 0.7}, std::pair{1.0, 2.5}}) {
      const auto pt = transition_matrix(rates, t).P;
      const auto ps = transition_matrix(rates, s).P;
      const auto pts = transition_matrix(rates, t + s);
      EXPECT_LT((pt * ps - pts.P).cwiseAbs().maxCoeff(), 1e-8);
      EXPECT_LT((rates.entries * pts.P - pts.P * rates.entries).cwiseAbs().maxCoeff(), 1e-9);
      EXPECT_LT(pts.commutator_defect, 1e-9);
    }
  }
}

TEST(Master, ProbabilityConservationAndAbsorbingStates) {
  const auto b = build_rate_wf(32);
  const auto tr = transition_matrix(b, 40.0);
  for (int i = 0; i <= 32; ++i) {
    EXPECT_NEAR(tr.P.row(i).sum(), 1, 1e-10);
    EXPECT_GE(tr.P.row(i).minCoeff(), 0);
  }
  EXPECT_EQ(tr.P(0, 0), 1);
  EXPECT_EQ(tr.P(32, 32), 1);
  const auto a = transition_matrix(build_rate_implicit(8), 3.0);
  for (int i = 0; i <= 8; ++i) EXPECT_NEAR(a.P.row(i).sum(), 1, 1e-10);
  EXPECT_NEAR(a.P(0, 0), 1, 1e-12);
  EXPECT_NEAR(a.P(8, 8), 1, 1e-12);
}

TEST(Master, ImplicitTransitionIsSigned) {
  const auto tr = transition_matrix(build_rate_implicit(16), 0.1);
  EXPECT_LT(tr.min_entry, -1.0);
}

TEST(Master, StationaryLimit) {
  const auto row = transition_matrix(build_rate_implicit(8), 50.0).row(2);
  EXPECT_NEAR(row[0], 0.75, 1e-6);
  EXPECT_NEAR(row[8], 0.25, 1e-6);
  for (int j = 1; j < 8; ++j) EXPECT_NEAR(row[j], 0, 1e-6);
}

TEST(Master, DistributionMoments) {
  const auto a = build_rate_implicit(8);
  const auto tr = transition_matrix(a, 1.0);
  const auto row = tr.row(4);
  EXPECT_NEAR(distribution_moment(row, 0, 8), 1, 1e-12);
  EXPECT_NEAR(distribution_moment(row, 1, 8), 0.5, 1e-12);
  auto table = spectral2::build_eigen_table<double>(spectral2::kDefaultOrder);
  const auto sol = spectral2::solve_coefficients(0.5, table);
  EXPECT_NEAR(distribution_moment(row, 2, 8), spectral2::moment(sol, 2, 1.0), 1e-8);
  EXPECT_NEAR(distribution_moment(row, MultiIndex{2}, a.grid), distribution_moment(row, 2, 8),
              1e-15);
  EXPECT_THROW(distribution_moment(row, 2, 6), InvalidArgument);
}

TEST(Master, ImplicitKReproducesMultiAlleleMoments) {
  const auto rates = build_rate_implicit_k(2, 6, Arithmetic::exact);
  const MultiIndex start{2, 3};
  const auto row = transition_matrix(rates, 0.7).row(rates.grid.position(start));
  const std::vector<double> p{2.0 / 6, 3.0 / 6};
  const auto sol = spectral_k::solve_coefficients<double>(std::span<const double>(p),
                                                           spectral_k::build_eigen_table<double>(2, 6));
  for (const auto& beta : graded_enumerate(2, 6)) {
    EXPECT_NEAR(distribution_moment(row, beta, rates.grid), spectral_k::moment(sol, beta, 0.7), 1e-9)
        << beta;
  }
}

TEST(Master, DiffusionLimitResiduals) {
  const auto a = diffusion_limit_residuals(build_rate_implicit(16), 4);
  ASSERT_EQ(a.orders.size(), 5u);
  for (double r : a.max_residual) EXPECT_LT(r, 1e-8);
  const auto ak = diffusion_limit_residuals(build_rate_implicit_k(2, 8), 3);
  ASSERT_EQ(ak.orders.size(), 10u);
  for (double r : ak.max_residual) EXPECT_LT(r, 1e-8);

  const auto b32 = diffusion_limit_residuals(build_rate_wf(32), 4);
  const auto b64 = diffusion_limit_residuals(build_rate_wf(64), 4);
  EXPECT_LT(b32.max_residual[2], 1e-14);
  EXPECT_NEAR(b32.max_residual[3] / b64.max_residual[3], 4, 0.5);
}

TEST(Master, TimeConversion) {
  EXPECT_DOUBLE_EQ(diffusion_time(64.0, 32), 2.0);
  EXPECT_DOUBLE_EQ(generation_time(2.0, 32), 64.0);
}

TEST(Master, SchemeNames) {
  EXPECT_EQ(parse_scheme("a"), Scheme::implicit_a);
  EXPECT_EQ(parse_scheme("wright-fisher-b"), Scheme::wright_fisher_b);
  EXPECT_EQ(parse_scheme("aK"), Scheme::implicit_k);
  EXPECT_EQ(to_string(Scheme::implicit_k), "implicit-K");
  EXPECT_THROW(parse_scheme("c"), InvalidArgument);
  EXPECT_EQ(parse_arithmetic("exact"), Arithmetic::exact);
}

TEST(Master, CsvExport) {
  const auto a = build_rate_implicit(2, Arithmetic::exact);
  std::ostringstream os;
  write_csv(os, a);
  EXPECT_EQ(os.str(),
            "# {\"scheme\":\"implicit-a\",\"twoN\":2,\"K\":1,\"time_unit\":\"diffusion\","
            "\"exact\":true,\"matrix\":\"B\"}\n"
            "0,0,0\n0.5,-1,0.5\n0,0,0\n");
  std::ostringstream op;
  write_csv(op, a, transition_matrix(a, 0.0));
  EXPECT_NE(op.str().find("\"matrix\":\"P\",\"t\":0}"), std::string::npos);
  EXPECT_NE(op.str().find("\n1,0,0\n0,1,0\n0,0,1\n"), std::string::npos);
}

}  // namespace
}  // namespace wfmgf::master
