#include "wfmgf/master.hpp"

#include <unsupported/Eigen/MatrixFunctions>
#include <boost/math/distributions/binomial.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>

#include "wfmgf/error.hpp"
#include "wfmgf/format.hpp"
#include "wfmgf/linalg.hpp"
#include "wfmgf/scalar.hpp"

namespace wfmgf::master {

namespace {

void check_population(int two_n, int cap) {
  if (two_n < 2 || two_n % 2 != 0) throw InvalidArgument("2N must be an even integer >= 2");
  if (two_n > cap) {
    throw InvalidArgument("2N = " + std::to_string(two_n) + " exceeds the cap " +
                          std::to_string(cap));
  }
}

void check_row_sums(const RateMatrix& rates) {
  for (Eigen::Index i = 0; i < rates.entries.rows(); ++i) {
    const double sum = rates.entries.row(i).sum();
    const double scale = std::max(1.0, rates.entries.row(i).cwiseAbs().maxCoeff());
    if (std::abs(sum) > 1e-10 * scale) {
      throw AccuracyError("rate matrix row " + std::to_string(i) + " sums to " +
                          format_double(sum));
    }
  }
}

// Right-hand side n(n-1)/2 (x^{n-1} - x^n), n = 0..2N.
template <class Scalar>
std::vector<Scalar> implicit_rhs(const Scalar& x, int two_n) {
  std::vector<Scalar> rhs(static_cast<std::size_t>(two_n) + 1, Scalar(0));
  Scalar lower = 1;  // x^{n-1}
  for (int n = 1; n <= two_n; ++n) {
    const Scalar upper = lower * x;
    rhs[n] = Scalar(static_cast<long long>(n) * (n - 1)) / 2 * (lower - upper);
    lower = upper;
  }
  return rhs;
}

double implicit_residual(std::span<const double> nodes, std::span<const double> solution,
                         std::span<const double> rhs) {
  long double worst = 0;
  for (std::size_t n = 0; n < rhs.size(); ++n) {
    long double sum = 0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      sum += std::pow(static_cast<long double>(nodes[k]), static_cast<int>(n)) * solution[k];
    }
    worst = std::max(worst, std::abs(sum - rhs[n]));
  }
  return static_cast<double>(worst);
}

RateMatrix implicit_floating(int two_n) {
  const int size = two_n + 1;
  std::vector<double> nodes(size);
  for (int k = 0; k < size; ++k) nodes[k] = static_cast<double>(k) / two_n;
  RateMatrix out{Scheme::implicit_a, two_n, SimplexGrid(1, two_n),
                 Eigen::MatrixXd::Zero(size, size), false, 0.0, {}};
  for (int i = 0; i < size; ++i) {
    const auto rhs = implicit_rhs(nodes[i], two_n);
    const auto row = linalg::solve_vandermonde<double>(nodes, rhs);
    out.residual = std::max(out.residual, implicit_residual(nodes, row, rhs));
    for (int k = 0; k < size; ++k) out.entries(i, k) = row[k];
  }
  check_row_sums(out);
  return out;
}

RateMatrix implicit_exact(int two_n) {
  const int size = two_n + 1;
  std::vector<Rational> nodes(size);
  for (int k = 0; k < size; ++k) nodes[k] = Rational(k, two_n);
  RateMatrix out{Scheme::implicit_a, two_n, SimplexGrid(1, two_n),
                 Eigen::MatrixXd::Zero(size, size), false, 0.0, {}};
  out.exact = true;
  for (int i = 0; i < size; ++i) {
    const auto row = linalg::solve_vandermonde<Rational>(nodes, implicit_rhs(nodes[i], two_n));
    for (int k = 0; k < size; ++k) out.entries(i, k) = row[k].convert_to<double>();
  }
  check_row_sums(out);
  return out;
}

// -|a|(|a|-1)/2 x^a + sum_u a_u(a_u-1)/2 x^{a-e_u}
template <class Scalar>
Scalar implicit_k_rhs(const MultiIndex& alpha, std::span<const Scalar> x) {
  auto monomial = [&](const MultiIndex& beta) {
    Scalar r = 1;
    for (std::size_t u = 0; u < beta.size(); ++u) {
      for (int j = 0; j < beta[u]; ++j) r *= x[u];
    }
    return r;
  };
  const int d = degree(alpha);
  Scalar value = -Scalar(static_cast<long long>(d) * (d - 1)) / 2 * monomial(alpha);
  for (std::size_t u = 0; u < alpha.size(); ++u) {
    if (alpha[u] >= 2) {
      value += Scalar(static_cast<long long>(alpha[u]) * (alpha[u] - 1)) / 2 *
               monomial(alpha.lowered(u));
    }
  }
  return value;
}

template <class Scalar>
std::vector<std::vector<Scalar>> lattice_points(const SimplexGrid& grid) {
  std::vector<std::vector<Scalar>> points;
  points.reserve(grid.size());
  for (const auto& state : grid.states()) {
    std::vector<Scalar> x(state.size());
    for (std::size_t u = 0; u < state.size(); ++u) x[u] = Scalar(state[u]) / grid.two_n();
    points.push_back(std::move(x));
  }
  return points;
}

template <class Scalar>
Scalar monomial_at(std::span<const Scalar> x, const MultiIndex& alpha) {
  Scalar r = 1;
  for (std::size_t u = 0; u < x.size(); ++u) {
    for (int j = 0; j < alpha[u]; ++j) r *= x[u];
  }
  return r;
}

RateMatrix implicit_k_floating(const SimplexGrid& grid) {
  const auto m = static_cast<Eigen::Index>(grid.size());
  const auto points = lattice_points<double>(grid);
  // V^T B^T = R^T with V(k, alpha) = z_k^alpha and R(i, alpha) the rhs.
  Eigen::MatrixXd vt(m, m);
  Eigen::MatrixXd rt(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    const auto& alpha = grid.state(static_cast<std::size_t>(a));
    for (Eigen::Index k = 0; k < m; ++k) {
      vt(a, k) = monomial_at<double>(points[k], alpha);
      rt(a, k) = implicit_k_rhs<double>(alpha, points[k]);
    }
  }
  const Eigen::MatrixXd bt = vt.partialPivLu().solve(rt);
  RateMatrix out{Scheme::implicit_k, grid.two_n(), grid, bt.transpose(), false, 0.0, {}};
  out.residual = (vt * bt - rt).cwiseAbs().maxCoeff();
  check_row_sums(out);
  return out;
}

RateMatrix implicit_k_exact(const SimplexGrid& grid) {
  const std::size_t m = grid.size();
  const auto points = lattice_points<Rational>(grid);
  linalg::DenseMatrix<Rational> vt(m, m);
  linalg::DenseMatrix<Rational> rt(m, m);
  for (std::size_t a = 0; a < m; ++a) {
    const auto& alpha = grid.state(a);
    for (std::size_t k = 0; k < m; ++k) {
      vt(a, k) = monomial_at<Rational>(points[k], alpha);
      rt(a, k) = implicit_k_rhs<Rational>(alpha, points[k]);
    }
  }
  const auto bt = linalg::solve(std::move(vt), std::move(rt));
  const auto size = static_cast<Eigen::Index>(m);
  RateMatrix out{Scheme::implicit_k, grid.two_n(), grid, Eigen::MatrixXd::Zero(size, size), false, 0.0, {}};
  out.exact = true;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < m; ++k) {
      out.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          bt(k, i).convert_to<double>();
    }
  }
  check_row_sums(out);
  return out;
}

std::string metadata_json(const RateMatrix& rates) {
  std::string meta = "{\"scheme\":\"" + std::string(to_string(rates.scheme)) + "\"";
  meta += ",\"twoN\":" + std::to_string(rates.two_n);
  meta += ",\"K\":" + std::to_string(rates.dimension());
  meta += ",\"time_unit\":\"" + std::string(rates.time_unit()) + "\"";
  meta += std::string(",\"exact\":") + (rates.exact ? "true" : "false");
  return meta;
}

void write_rows(std::ostream& os, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << format_double(m(i, j));
    }
    os << '\n';
  }
}

}  // namespace

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::implicit_a: return "implicit-a";
    case Scheme::wright_fisher_b: return "wright-fisher-b";
    case Scheme::implicit_k: return "implicit-K";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "a" || name == "implicit-a") return Scheme::implicit_a;
  if (name == "b" || name == "wright-fisher-b") return Scheme::wright_fisher_b;
  if (name == "aK" || name == "implicit-K") return Scheme::implicit_k;
  throw InvalidArgument("unknown scheme '" + std::string(name) + "'");
}

std::string_view to_string(Arithmetic arithmetic) {
  switch (arithmetic) {
    case Arithmetic::automatic: return "auto";
    case Arithmetic::floating: return "float";
    case Arithmetic::exact: return "exact";
  }
  return "unknown";
}

Arithmetic parse_arithmetic(std::string_view name) {
  if (name == "auto") return Arithmetic::automatic;
  if (name == "float") return Arithmetic::floating;
  if (name == "exact") return Arithmetic::exact;
  throw InvalidArgument("unknown arithmetic '" + std::string(name) + "'");
}

std::string_view RateMatrix::time_unit() const noexcept {
  return scheme == Scheme::wright_fisher_b ? "generation" : "diffusion";
}

RateMatrix build_rate_wf(int two_n) {
  check_population(two_n, kWrightFisherCap);
  const int size = two_n + 1;
  RateMatrix out{Scheme::wright_fisher_b, two_n, SimplexGrid(1, two_n),
                 Eigen::MatrixXd::Zero(size, size), false, 0.0, {}};
  // Rows 0 and 2N are absorbing: the pmf is a point mass on the diagonal.
  for (int i = 1; i < two_n; ++i) {
    const boost::math::binomial_distribution<double> pmf(two_n, static_cast<double>(i) / two_n);
    for (int k = 0; k < size; ++k) out.entries(i, k) = boost::math::pdf(pmf, k);
    out.entries(i, i) -= 1.0;
  }
  check_row_sums(out);
  return out;
}

RateMatrix build_rate_implicit(int two_n, Arithmetic arithmetic) {
  switch (arithmetic) {
    case Arithmetic::floating:
      check_population(two_n, kImplicitFloatCap);
      return implicit_floating(two_n);
    case Arithmetic::exact:
      check_population(two_n, kImplicitExactCap);
      return implicit_exact(two_n);
    case Arithmetic::automatic:
      break;
  }
  check_population(two_n, kImplicitExactCap);
  if (two_n > kImplicitFloatCap) return implicit_exact(two_n);
  auto floating = implicit_floating(two_n);
  if (floating.residual <= kResidualTolerance) return floating;
  auto exact = implicit_exact(two_n);
  exact.warnings.push_back("floating-point Vandermonde residual " +
                           format_double(floating.residual) +
                           " exceeds 1e-8; rebuilt in exact arithmetic");
  return exact;
}

RateMatrix build_rate_implicit_k(int dimension, int two_n, Arithmetic arithmetic) {
  if (dimension < 1 || dimension > 3) throw InvalidArgument("implicit-K supports K in {1, 2, 3}");
  check_population(two_n, kImplicitExactCap);
  const SimplexGrid grid(dimension, two_n);
  if (grid.size() > kImplicitStateCap) {
    throw InvalidArgument("state space of " + std::to_string(grid.size()) +
                          " states exceeds the cap " + std::to_string(kImplicitStateCap));
  }
  auto exact_allowed = [&] {
    if (grid.size() > kImplicitExactStateCap) {
      throw InvalidArgument("exact implicit-K build is limited to " +
                            std::to_string(kImplicitExactStateCap) + " states");
    }
  };
  switch (arithmetic) {
    case Arithmetic::exact:
      exact_allowed();
      return implicit_k_exact(grid);
    case Arithmetic::floating:
      return implicit_k_floating(grid);
    case Arithmetic::automatic:
      break;
  }
  auto floating = implicit_k_floating(grid);
  if (floating.residual <= kResidualTolerance) return floating;
  if (grid.size() > kImplicitExactStateCap) {
    throw AccuracyError("implicit-K residual " + format_double(floating.residual) +
                        " exceeds 1e-8 and the state space is too large for exact arithmetic");
  }
  auto exact = implicit_k_exact(grid);
  exact.warnings.push_back("floating-point residual " + format_double(floating.residual) +
                           " exceeds 1e-8; rebuilt in exact arithmetic");
  return exact;
}

TransitionMatrix transition_matrix(const RateMatrix& rates, double t,
                                   const TransitionOptions& options) {
  if (!(t >= 0)) throw InvalidArgument("time t must be >= 0");
  TransitionMatrix out;
  out.t = t;
  out.P = (rates.entries * t).exp();
  out.min_entry = out.P.minCoeff();

  if (rates.scheme == Scheme::wright_fisher_b) {
    if (out.min_entry < -1e-12) {
      throw AccuracyError("transition matrix entry " + format_double(out.min_entry) +
                          " is below -1e-12");
    }
    out.P = out.P.cwiseMax(0.0);
    for (Eigen::Index i = 0; i < out.P.rows(); ++i) out.P.row(i) /= out.P.row(i).sum();
  }

  for (Eigen::Index i = 0; i < out.P.rows(); ++i) {
    const double scale = std::max(1.0, out.P.row(i).cwiseAbs().sum());
    if (std::abs(out.P.row(i).sum() - 1.0) > 1e-10 * scale) {
      throw AccuracyError("row " + std::to_string(i) + " of e^{Bt} does not sum to 1");
    }
  }

  if (options.self_check && t > 0) {
    const double p_max = out.P.cwiseAbs().maxCoeff();
    const Eigen::MatrixXd half = (rates.entries * (t / 2)).exp();
    out.semigroup_defect = (half * half - out.P).cwiseAbs().maxCoeff();
    if (out.semigroup_defect > options.semigroup_tolerance * std::max(1.0, p_max)) {
      throw AccuracyError("semigroup self-check failed: |P(t/2)^2 - P(t)| = " +
                          format_double(out.semigroup_defect));
    }
    out.commutator_defect =
        (rates.entries * out.P - out.P * rates.entries).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, rates.entries.cwiseAbs().maxCoeff() * p_max);
    if (out.commutator_defect > options.commutator_tolerance * scale) {
      throw AccuracyError("commutation self-check failed: |BP - PB| = " +
                          format_double(out.commutator_defect));
    }
  }
  return out;
}

std::vector<double> TransitionMatrix::row(std::size_t i) const {
  if (i >= static_cast<std::size_t>(P.rows())) throw InvalidArgument("state out of range");
  std::vector<double> out(static_cast<std::size_t>(P.cols()));
  for (Eigen::Index j = 0; j < P.cols(); ++j) out[j] = P(static_cast<Eigen::Index>(i), j);
  return out;
}

double distribution_moment(std::span<const double> row, const MultiIndex& order,
                           const SimplexGrid& grid) {
  if (row.size() != grid.size()) throw InvalidArgument("row length does not match the grid");
  if (order.size() != static_cast<std::size_t>(grid.dimension())) {
    throw InvalidArgument("moment order has the wrong dimension");
  }
  double sum = 0;
  for (std::size_t j = 0; j < row.size(); ++j) {
    sum += power(grid.frequencies(j), order) * row[j];
  }
  return sum;
}

double distribution_moment(std::span<const double> row, int n, int two_n) {
  if (row.size() != static_cast<std::size_t>(two_n) + 1) {
    throw InvalidArgument("row length must be 2N + 1");
  }
  double sum = 0;
  for (std::size_t j = 0; j < row.size(); ++j) {
    sum += std::pow(static_cast<double>(j) / two_n, n) * row[j];
  }
  return sum;
}

DiffusionResiduals diffusion_limit_residuals(const RateMatrix& rates, int max_order) {
  if (max_order < 0) throw InvalidArgument("max_order must be >= 0");
  const auto& grid = rates.grid;
  const int K = grid.dimension();
  DiffusionResiduals out;
  out.orders = graded_enumerate(K, max_order);
  out.max_residual.assign(out.orders.size(), 0.0);
  const double second_scale =
      rates.scheme == Scheme::wright_fisher_b ? 1.0 / rates.two_n : 1.0;

  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& state = grid.state(i);
    const int total = degree(state);
    const bool interior =
        total < grid.two_n() &&
        std::all_of(state.components().begin(), state.components().end(),
                    [](int c) { return c > 0; });
    if (!interior) continue;
    const auto x = grid.frequencies(i);

    for (std::size_t o = 0; o < out.orders.size(); ++o) {
      const auto& alpha = out.orders[o];
      double sum = 0;
      for (std::size_t j = 0; j < grid.size(); ++j) {
        const double b = rates.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        if (b == 0) continue;
        const auto z = grid.frequencies(j);
        double centred = 1;
        for (int u = 0; u < K; ++u) centred *= std::pow(z[u] - x[u], alpha[u]);
        sum += centred * b;
      }
      double target = 0;
      if (degree(alpha) == 2) {
        std::vector<int> hit;
        for (int u = 0; u < K; ++u) {
          for (int r = 0; r < alpha[u]; ++r) hit.push_back(u);
        }
        const int u = hit[0];
        const int v = hit[1];
        target = x[u] * ((u == v ? 1.0 : 0.0) - x[v]) * second_scale;
      }
      out.max_residual[o] = std::max(out.max_residual[o], std::abs(sum - target));
    }
  }
  return out;
}

double diffusion_time(double generation_time, int two_n) { return generation_time / two_n; }
double generation_time(double diffusion_time, int two_n) { return diffusion_time * two_n; }

void write_csv(std::ostream& os, const RateMatrix& rates) {
  os << "# " << metadata_json(rates) << ",\"matrix\":\"B\"}\n";
  write_rows(os, rates.entries);
}

void write_csv(std::ostream& os, const RateMatrix& rates, const TransitionMatrix& transition) {
  os << "# " << metadata_json(rates) << ",\"matrix\":\"P\",\"t\":"
     << format_double(transition.t) << "}\n";
  write_rows(os, transition.P);
}

}  // namespace wfmgf::master
