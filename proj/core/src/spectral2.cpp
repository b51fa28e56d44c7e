#include "wfmgf/spectral2.hpp"

#include <cmath>
#include <string>

#include "wfmgf/error.hpp"

namespace wfmgf::spectral2 {

namespace {

template <class Real>
void check_finite(const Real& v, int n, int k) {
  if constexpr (std::is_same_v<Real, double>) {
    if (!std::isfinite(v)) {
      throw Overflow("A_" + std::to_string(n) + "^(" + std::to_string(k) +
                     ") overflows double; lower nmax or use WideReal");
    }
  }
}

template <class Real>
Real mu(int k) {
  return Real(static_cast<long long>(k) * (k - 1)) / 2;
}

template <class Real>
void check_frequency(const Real& p) {
  if (p < 0 || p > 1) throw InvalidArgument("frequency p must lie in [0, 1]");
}

// e^{-mu_k t} for k = 0..kmax.
template <class Real>
std::vector<Real> decay_factors(const Real& t, int kmax) {
  using std::exp;
  if (t < 0) throw InvalidArgument("time t must be >= 0");
  std::vector<Real> d(static_cast<std::size_t>(kmax) + 1);
  for (int k = 0; k <= kmax; ++k) d[k] = exp(-mu<Real>(k) * t);
  return d;
}

template <class Real>
Real moment_with(const Solution<Real>& sol, int n, const std::vector<Real>& decay) {
  const auto a = sol.table().row(n);
  const auto c = sol.coefficients();
  Real sum = 0;
  for (int k = 0; k <= n; ++k) sum += c[k] * a[k] * decay[k];
  return sum;
}

}  // namespace

double eigenvalue(int k) {
  if (k < 0) throw InvalidArgument("eigenvalue index must be >= 0");
  return mu<double>(k);
}

template <class Real>
EigenTable<Real> EigenTable<Real>::build(int nmax) {
  if (nmax < 0) throw InvalidArgument("nmax must be >= 0");
  if constexpr (std::is_same_v<Real, WideReal>) {
    if (nmax > kWideMaxOrder) {
      throw InvalidArgument("nmax exceeds the wide-precision cap " +
                            std::to_string(kWideMaxOrder));
    }
  }
  EigenTable table;
  table.nmax_ = nmax;
  const auto n1 = static_cast<std::size_t>(nmax) + 1;
  table.coefficients_.assign(n1 * (n1 + 1) / 2, Real(0));
  auto at = [&](int n, int k) -> Real& {
    return table.coefficients_[static_cast<std::size_t>(n) * (n + 1) / 2 + k];
  };

  Real factorial = 1;
  for (int k = 0; k <= nmax; ++k) {
    if (k > 1) factorial *= k;
    at(k, k) = factorial;
    check_finite(factorial, k, k);
    if (k == 0) continue;  // A_n^{(0)} = 0 for n >= 1
    const long long kk = static_cast<long long>(k) * (k - 1);
    for (int n = k + 1; n <= nmax; ++n) {
      const long long nn = static_cast<long long>(n) * (n - 1);
      at(n, k) = at(n - 1, k) * Real(nn) / Real(nn - kk);
      check_finite(at(n, k), n, k);
    }
  }

  // The remaining factors of the ratio recurrence telescope:
  //   prod_{m>n} m(m-1) / ((m-k)(m+k-1)) = prod_{i<k} (n+i) / (n+1-k+i),
  // so Abar_k = A_nmax^{(k)} times a k-term product.
  table.limits_.assign(n1, Real(0));
  for (int k = 1; k <= nmax; ++k) {
    Real tail = 1;
    for (int i = 0; i < k; ++i) tail = tail * Real(nmax + i) / Real(nmax + 1 - k + i);
    table.limits_[k] = at(nmax, k) * tail;
    check_finite(table.limits_[k], -1, k);
  }
  return table;
}

template <class Real>
Real EigenTable<Real>::coefficient(int n, int k) const {
  if (n < 0 || k < 0 || n > nmax_) throw InvalidArgument("table index out of range");
  if (k > n) return Real(0);
  return coefficients_[static_cast<std::size_t>(n) * (n + 1) / 2 + k];
}

template <class Real>
std::span<const Real> EigenTable<Real>::row(int n) const {
  if (n < 0 || n > nmax_) throw InvalidArgument("table row out of range");
  const auto start = static_cast<std::size_t>(n) * (n + 1) / 2;
  return std::span<const Real>(coefficients_).subspan(start, static_cast<std::size_t>(n) + 1);
}

template <class Real>
const Real& EigenTable<Real>::limit(int k) const {
  if (k < 0 || k > nmax_) throw InvalidArgument("limit index out of range");
  return limits_[k];
}

template <class Real>
Solution<Real> solve_coefficients(const Real& p, TablePtr<Real> table) {
  if (!table) throw InvalidArgument("null eigen table");
  check_frequency(p);
  const int nmax = table->nmax();
  std::vector<Real> c;
  c.reserve(static_cast<std::size_t>(nmax) + 1);
  Real p_power = 1;
  for (int n = 0; n <= nmax; ++n) {
    const auto a = table->row(n);
    Real rhs = p_power;
    for (int k = 0; k < n; ++k) rhs -= c[k] * a[k];
    c.push_back(rhs / a[n]);
    p_power *= p;
  }
  return Solution<Real>(std::move(table), p, std::move(c));
}

template <class Real>
double verify_eigenfunction(const EigenTable<Real>& table, int k, int nmax) {
  if (k < 0 || k > nmax || nmax > table.nmax()) {
    throw InvalidArgument("verify_eigenfunction requires k <= nmax <= table nmax");
  }
  // Power-series coefficients of y_k, y_k' and y_k''.
  std::vector<Real> y(static_cast<std::size_t>(nmax) + 1);
  Real factorial = 1;
  for (int n = 0; n <= nmax; ++n) {
    if (n > 1) factorial *= n;
    y[n] = table.coefficient(n, k) / factorial;
  }
  auto dy = [&](int m) { return m + 1 <= nmax ? Real(m + 1) * y[m + 1] : Real(0); };
  auto d2y = [&](int m) {
    return m + 2 <= nmax ? Real(m + 2) * Real(m + 1) * y[m + 2] : Real(0);
  };
  const Real two_lambda = 2 * mu<Real>(k);

  double worst = 0;
  for (int n = 0; n <= nmax; ++n) {
    // Coefficient of x^n in -x^2 y'' + x^2 y' + 2 mu_k y.
    const Real t1 = n >= 2 ? Real(-d2y(n - 2)) : Real(0);
    const Real t2 = n >= 2 ? dy(n - 2) : Real(0);
    const Real t3 = two_lambda * y[n];
    using std::abs;
    const Real scale = abs(t1) + abs(t2) + abs(t3);
    if (scale == 0) continue;
    const double r = to_double(Real(abs(t1 + t2 + t3) / scale));
    worst = std::max(worst, r);
  }
  return worst;
}

template <FloatingScalar Real>
Real moment(const Solution<Real>& sol, int n, const Real& t) {
  if (n < 0 || n > sol.table().nmax()) throw InvalidArgument("moment order exceeds nmax");
  return moment_with(sol, n, decay_factors(t, n));
}

template <FloatingScalar Real>
Real mgf(const Solution<Real>& sol, const Real& s, const Real& t, int nmax) {
  if (nmax < 0 || nmax > sol.table().nmax()) {
    throw InvalidArgument("mgf truncation exceeds table nmax");
  }
  const auto decay = decay_factors(t, nmax);
  Real sum = 0;
  Real weight = 1;  // s^n / n!
  for (int n = 0; n <= nmax; ++n) {
    if (n > 0) weight = weight * s / n;
    sum += moment_with(sol, n, decay) * weight;
  }
  return sum;
}

template <FloatingScalar Real>
SeriesValue<Real> fixation_probability(const Solution<Real>& sol, const Real& t, int kmax,
                                       std::optional<double> tail_tolerance) {
  const auto& table = sol.table();
  if (kmax < 1 || kmax > table.nmax()) {
    throw InvalidArgument("fixation_probability requires 1 <= kmax <= table nmax");
  }
  const auto decay = decay_factors(t, kmax);
  const auto c = sol.coefficients();
  SeriesValue<Real> out{sol.frequency(), Real(0), kmax};
  for (int k = 2; k <= kmax; ++k) {
    out.last_term = c[k] * table.limit(k) * decay[k];
    out.value += out.last_term;
  }
  using std::abs;
  if (tail_tolerance && to_double(Real(abs(out.last_term))) > *tail_tolerance) {
    throw TruncationError("fixation series not converged at kmax=" + std::to_string(kmax),
                          to_double(out.last_term));
  }
  return out;
}

template <FloatingScalar Real>
SeriesValue<Real> extinction_probability(const Solution<Real>& sol, const Real& t, int kmax,
                                         std::optional<double> tail_tolerance) {
  const auto other = solve_coefficients(Real(1 - sol.frequency()), sol.table_ptr());
  return fixation_probability(other, t, kmax, tail_tolerance);
}

template <FloatingScalar Real>
Real heterozygosity(const Solution<Real>& sol, const Real& t) {
  if (sol.table().nmax() < 2) throw InvalidArgument("heterozygosity requires nmax >= 2");
  const auto decay = decay_factors(t, 2);
  return 2 * (moment_with(sol, 1, decay) - moment_with(sol, 2, decay));
}

template <FloatingScalar Real>
SeriesValue<Real> mean_absorption_time(const TablePtr<Real>& table, const Real& p, int kmax) {
  if (!table) throw InvalidArgument("null eigen table");
  if (kmax < 2 || kmax > table->nmax()) {
    throw InvalidArgument("mean_absorption_time requires 2 <= kmax <= table nmax");
  }
  const auto c = solve_coefficients(p, table);
  const auto c_other = solve_coefficients(Real(1 - p), table);
  // Odd-k terms cancel between the two alleles.
  SeriesValue<Real> out{Real(0), Real(0), kmax};
  for (int k = 2; k <= kmax; ++k) {
    out.last_term = -(c.coefficient(k) + c_other.coefficient(k)) * table->limit(k) / mu<Real>(k);
    out.value += out.last_term;
  }
  return out;
}

SeriesValue<double> mean_absorption_time(double p, int kmax) {
  if (kmax > kWideMaxOrder) {
    throw InvalidArgument("kmax exceeds the wide-precision cap " + std::to_string(kWideMaxOrder));
  }
  const auto table = build_eigen_table<WideReal>(kmax);
  const auto wide = mean_absorption_time<WideReal>(table, WideReal(p), kmax);
  return {to_double(wide.value), to_double(wide.last_term), wide.kmax};
}

StationaryMass stationary_distribution(double p) {
  check_frequency(p);
  return {1.0 - p, p};
}

#define WFMGF_SPECTRAL2_INSTANTIATE(Real)                                \
  template class EigenTable<Real>;                                       \
  template Solution<Real> solve_coefficients(const Real&, TablePtr<Real>); \
  template double verify_eigenfunction(const EigenTable<Real>&, int, int);

WFMGF_SPECTRAL2_INSTANTIATE(double)
WFMGF_SPECTRAL2_INSTANTIATE(WideReal)
WFMGF_SPECTRAL2_INSTANTIATE(Rational)

#define WFMGF_SPECTRAL2_INSTANTIATE_EVAL(Real)                                     \
  template Real moment(const Solution<Real>&, int, const Real&);                   \
  template Real mgf(const Solution<Real>&, const Real&, const Real&, int);         \
  template SeriesValue<Real> fixation_probability(const Solution<Real>&, const Real&, \
                                                  int, std::optional<double>);     \
  template SeriesValue<Real> extinction_probability(const Solution<Real>&,         \
                                                    const Real&, int,              \
                                                    std::optional<double>);        \
  template Real heterozygosity(const Solution<Real>&, const Real&);                \
  template SeriesValue<Real> mean_absorption_time(const TablePtr<Real>&, const Real&, int);

WFMGF_SPECTRAL2_INSTANTIATE_EVAL(double)
WFMGF_SPECTRAL2_INSTANTIATE_EVAL(WideReal)

}  // namespace wfmgf::spectral2
