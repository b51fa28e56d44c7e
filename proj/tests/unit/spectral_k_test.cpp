#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "wfmgf/error.hpp"
#include "wfmgf/spectral2.hpp"
#include "wfmgf/spectral_k.hpp"

namespace wfmgf::spectral_k {
namespace {

// RK4 on dm_b/dt = -mu_|b| m_b + sum_u b_u(b_u-1)/2 m_{b-e_u}, m_b(0) = p^b.
std::map<MultiIndex, double> integrate_moments(const std::vector<double>& p, int degmax,
                                               double t_end, double h) {
  const auto indices = graded_enumerate(static_cast<int>(p.size()), degmax);
  std::map<MultiIndex, double> m;
  for (const auto& b : indices) m[b] = power(p, b);
  auto rhs = [&](const std::map<MultiIndex, double>& y) {
    std::map<MultiIndex, double> d;
    for (const auto& b : indices) {
      const int n = degree(b);
      double v = -n * (n - 1) / 2.0 * y.at(b);
      for (std::size_t u = 0; u < b.size(); ++u) {
        if (b[u] >= 2) v += b[u] * (b[u] - 1) / 2.0 * y.at(b.lowered(u));
      }
      d[b] = v;
    }
    return d;
  };
  auto step = [&](const std::map<MultiIndex, double>& k, double a) {
    auto y = m;
    for (auto& [b, v] : y) v += a * k.at(b);
    return y;
  };
  const int steps = static_cast<int>(std::lround(t_end / h));
  for (int s = 0; s < steps; ++s) {
    const auto k1 = rhs(m);
    const auto k2 = rhs(step(k1, h / 2));
    const auto k3 = rhs(step(k2, h / 2));
    const auto k4 = rhs(step(k3, h));
    for (auto& [b, v] : m) v += h / 6 * (k1.at(b) + 2 * k2.at(b) + 2 * k3.at(b) + k4.at(b));
  }
  return m;
}

TEST(SpectralK, HandComputedCoefficients) {
  const auto t2 = EigenTable<Rational>::build(2, 4);
  EXPECT_EQ(t2.coefficient(MultiIndex{1, 1}, MultiIndex{2, 1}), Rational(1, 4));
  EXPECT_EQ(t2.coefficient(MultiIndex{1, 1}, MultiIndex{1, 1}), 1);
  EXPECT_EQ(t2.coefficient(MultiIndex{1, 1}, MultiIndex{2, 0}), 0);
  EXPECT_EQ(t2.coefficient(MultiIndex{0, 0}, MultiIndex{1, 0}), 0);
  const auto t1 = EigenTable<Rational>::build(1, 4);
  EXPECT_EQ(t1.coefficient(MultiIndex{2}, MultiIndex{3}), Rational(1, 2));
}

TEST(SpectralK, SingleCoordinateTableIsTheTwoAlleleTable) {
  const auto multi = EigenTable<Rational>::build(1, 12);
  const auto two = spectral2::EigenTable<Rational>::build(12);
  for (int k = 0; k <= 12; ++k) {
    Rational fact = 1;
    for (int n = 0; n <= 12; ++n) {
      if (n > 0) fact *= n;
      EXPECT_EQ(multi.coefficient(MultiIndex{k}, MultiIndex{n}) * fact, two.coefficient(n, k))
          << "n=" << n << " k=" << k;
    }
  }
}

TEST(SpectralK, DoubleTableMatchesExactTable) {
  const auto exact = EigenTable<Rational>::build(3, 8);
  const auto approx = EigenTable<double>::build(3, 8);
  const std::size_t m = exact.indices().size();
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      const double e = to_double(exact.coefficient(a, b));
      EXPECT_NEAR(approx.coefficient(a, b), e, 1e-15 * std::max(1.0, std::abs(e)));
    }
  }
}

TEST(SpectralK, BlockOffsets) {
  const auto table = EigenTable<double>::build(2, 3);
  EXPECT_EQ(table.block_offset(0), 0u);
  EXPECT_EQ(table.block_offset(1), 1u);
  EXPECT_EQ(table.block_offset(2), 3u);
  EXPECT_EQ(table.block_offset(3), 6u);
  EXPECT_EQ(table.block_offset(4), 10u);
  EXPECT_THROW(table.position(MultiIndex{4, 0}), InvalidArgument);
}

TEST(SpectralK, EigenfunctionResiduals) {
  for (int dim : {1, 2, 3}) {
    const auto table = EigenTable<double>::build(dim, 8);
    for (const auto& alpha : graded_enumerate(dim, 4)) {
      EXPECT_LT(verify_eigenfunction(table, alpha, 8), 1e-12) << alpha;
    }
    const auto exact = EigenTable<Rational>::build(dim, 6);
    for (const auto& alpha : graded_enumerate(dim, 3)) {
      EXPECT_EQ(verify_eigenfunction(exact, alpha, 6), 0.0) << alpha;
    }
  }
}

TEST(SpectralK, MomentsMatchIntegratedHierarchy) {
  const std::map<int, std::vector<double>> points{{2, {0.3, 0.5}}, {3, {0.2, 0.3, 0.4}}};
  for (const auto& [dim, p] : points) {
    const auto sol = solve_coefficients<double>(p, build_eigen_table<double>(dim, 5));
    const auto oracle = integrate_moments(p, 5, 0.5, 1e-4);
    for (const auto& [beta, value] : oracle) {
      EXPECT_NEAR(moment(sol, beta, 0.5), value, 1e-10) << beta;
    }
  }
}

TEST(SpectralK, MarginalsReduceToTwoAlleles) {
  const std::vector<double> p{0.3, 0.5};
  const auto sol = solve_coefficients<double>(p, build_eigen_table<double>(2, 6));
  auto table2 = spectral2::build_eigen_table<double>(spectral2::kDefaultOrder);
  const auto first = spectral2::solve_coefficients(0.3, table2);
  const auto second = spectral2::solve_coefficients(0.5, table2);
  for (int n = 0; n <= 6; ++n) {
    for (double t : {0.0, 0.5, 2.0}) {
      EXPECT_NEAR(moment(sol, MultiIndex{n, 0}, t), spectral2::moment(first, n, t), 1e-12);
      EXPECT_NEAR(moment(sol, MultiIndex{0, n}, t), spectral2::moment(second, n, t), 1e-12);
    }
  }
}

TEST(SpectralK, ExactAndFloatingCoefficientsAgree) {
  const std::vector<Rational> pe{Rational(1, 5), Rational(3, 10), Rational(2, 5)};
  const std::vector<double> pd{0.2, 0.3, 0.4};
  const auto exact = solve_coefficients<Rational>(pe, build_eigen_table<Rational>(3, 6));
  const auto approx = solve_coefficients<double>(pd, build_eigen_table<double>(3, 6));
  for (std::size_t i = 0; i < exact.coefficients().size(); ++i) {
    const double e = to_double(exact.coefficients()[i]);
    EXPECT_NEAR(approx.coefficients()[i], e, 1e-14 * std::max(1.0, std::abs(e)));
  }
  EXPECT_EQ(exact.coefficient(MultiIndex{0, 0, 0}), 1);
}

TEST(SpectralK, VisitOrderWithinDegreeDoesNotMatter) {
  const std::vector<double> p{0.25, 0.35};
  auto table = build_eigen_table<double>(2, 6);
  const auto forward = solve_coefficients<double>(p, table);
  std::vector<std::size_t> order;
  for (int d = 0; d <= 6; ++d) {
    for (std::size_t i = table->block_offset(d + 1); i-- > table->block_offset(d);) {
      order.push_back(i);
    }
  }
  const auto reversed = solve_coefficients<double>(p, table, order);
  for (std::size_t i = 0; i < order.size(); ++i) {
    EXPECT_EQ(forward.coefficients()[i], reversed.coefficients()[i]);
  }
  std::swap(order.front(), order.back());
  EXPECT_THROW(solve_coefficients<double>(p, table, order), InvalidArgument);
}

TEST(SpectralK, RejectsInvalidFrequencies) {
  auto table = build_eigen_table<double>(2, 4);
  const std::vector<double> too_big{0.6, 0.5};
  const std::vector<double> wrong_size{0.2};
  const std::vector<double> negative{-0.1, 0.5};
  EXPECT_THROW(solve_coefficients<double>(too_big, table), InvalidArgument);
  EXPECT_THROW(solve_coefficients<double>(wrong_size, table), InvalidArgument);
  EXPECT_THROW(solve_coefficients<double>(negative, table), InvalidArgument);
}

TEST(SpectralK, MgfAtTimeZeroIsExponential) {
  const std::vector<double> p{0.2, 0.3};
  const auto sol = solve_coefficients<double>(p, build_eigen_table<double>(2, 20));
  const std::vector<double> s{0.7, -0.4};
  EXPECT_NEAR(mgf<double>(sol, s, 0.0, 20), std::exp(0.7 * 0.2 - 0.4 * 0.3), 1e-12);
}

}  // namespace
}  // namespace wfmgf::spectral_k
