#pragma once

// Spectral solution of the two-allele moment generating function equation
//
//   dH/dt = -(s^2/2) d^2H/ds^2 + (s^2/2) dH/ds,
//
// whose separated solutions are y_k(s) e^{-mu_k t} with mu_k = k(k-1)/2 and
// y_k(s) = sum_n a_n^{(k)} s^n. Everything here works with the scaled
// coefficients A_n^{(k)} = n! a_n^{(k)}, in which the moments read
//
//   m_n(t) = sum_{k<=n} c_k A_n^{(k)} e^{-mu_k t}.
//
// Tables and solutions are templated on the scalar: double for everyday use,
// WideReal when series are summed to high order (absorption time), Rational
// to validate the floating-point triangular solve.

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "wfmgf/scalar.hpp"

namespace wfmgf::spectral2 {

inline constexpr int kDefaultOrder = 60;

/// mu_k = k(k-1)/2.
double eigenvalue(int k);

template <class Real>
class EigenTable {
 public:
  /// Fills A_n^{(k)} for 0 <= k <= n <= nmax from the ratio recurrence
  ///   A_n^{(k)} = A_{n-1}^{(k)} n(n-1) / (n(n-1) - k(k-1)),   A_k^{(k)} = k!,
  /// and the limits Abar_k = lim_{n->inf} A_n^{(k)}.
  /// Throws Overflow (naming k) if a value does not fit the scalar type.
  static EigenTable build(int nmax);

  int nmax() const noexcept { return nmax_; }

  /// A_n^{(k)}; zero when n < k.
  Real coefficient(int n, int k) const;
  /// A_n^{(0)} .. A_n^{(n)}.
  std::span<const Real> row(int n) const;
  /// Abar_k for k <= nmax.
  const Real& limit(int k) const;

 private:
  int nmax_ = 0;
  std::vector<Real> coefficients_;  // packed lower triangle, row n at n(n+1)/2
  std::vector<Real> limits_;
};

template <class Real>
using TablePtr = std::shared_ptr<const EigenTable<Real>>;

template <class Real>
TablePtr<Real> build_eigen_table(int nmax) {
  return std::make_shared<const EigenTable<Real>>(EigenTable<Real>::build(nmax));
}

/// Expansion coefficients c_0..c_nmax for the initial frequency p.
template <class Real>
class Solution {
 public:
  Solution(TablePtr<Real> table, Real p, std::vector<Real> c)
      : table_(std::move(table)), p_(std::move(p)), c_(std::move(c)) {}

  const Real& frequency() const noexcept { return p_; }
  std::span<const Real> coefficients() const noexcept { return c_; }
  const Real& coefficient(int k) const { return c_.at(static_cast<std::size_t>(k)); }
  const EigenTable<Real>& table() const noexcept { return *table_; }
  const TablePtr<Real>& table_ptr() const noexcept { return table_; }

 private:
  TablePtr<Real> table_;
  Real p_;
  std::vector<Real> c_;
};

/// Forward substitution on the lower-triangular system
///   p^n = sum_{k<=n} c_k A_n^{(k)},  n = 0..nmax,  diagonal A_n^{(n)} = n!.
template <class Real>
Solution<Real> solve_coefficients(const Real& p, TablePtr<Real> table);

/// Largest relative coefficient residual of the ODE
///   -x^2 y'' + x^2 y' = -2 mu_k y
/// for y_k truncated at order nmax, the coefficients being measured in the
/// factorial-scaled basis. The order nmax + 1 term (the truncation boundary)
/// is excluded.
template <class Real>
double verify_eigenfunction(const EigenTable<Real>& table, int k, int nmax);

/// A truncated series value with its convergence indicator.
template <class Real>
struct SeriesValue {
  Real value;
  Real last_term;  ///< the kmax-th term
  int kmax;
};

template <FloatingScalar Real>
Real moment(const Solution<Real>& sol, int n, const Real& t);

/// sum_{n<=nmax} m_n(t) s^n / n!.
template <FloatingScalar Real>
Real mgf(const Solution<Real>& sol, const Real& s, const Real& t, int nmax);

/// P(X_t = 1) = p + sum_{k=2}^{kmax} c_k Abar_k e^{-mu_k t}. With a tail
/// tolerance, throws TruncationError when |last term| exceeds it.
template <FloatingScalar Real>
SeriesValue<Real> fixation_probability(const Solution<Real>& sol, const Real& t,
                                       int kmax,
                                       std::optional<double> tail_tolerance = {});

/// P(X_t = 0), computed as the fixation probability of the other allele.
template <FloatingScalar Real>
SeriesValue<Real> extinction_probability(const Solution<Real>& sol, const Real& t,
                                         int kmax,
                                         std::optional<double> tail_tolerance = {});

/// 2(m_1(t) - m_2(t)).
template <FloatingScalar Real>
Real heterozygosity(const Solution<Real>& sol, const Real& t);

/// E[T] = -sum_{k=2}^{kmax} (c_k + c'_k) Abar_k / mu_k, c' being the
/// coefficients for 1 - p. Needs table.nmax() >= kmax.
template <FloatingScalar Real>
SeriesValue<Real> mean_absorption_time(const TablePtr<Real>& table, const Real& p,
                                       int kmax);

/// Same, on a 500-digit table built for the call (kmax <= kWideMaxOrder).
SeriesValue<double> mean_absorption_time(double p, int kmax);

struct StationaryMass {
  double at_zero;
  double at_one;
};

/// lim_{t->inf} P(t, i, .) = (1-p) delta_0 + p delta_{2N}.
StationaryMass stationary_distribution(double p);

#define WFMGF_SPECTRAL2_EXTERN(Real)                                          \
  extern template class EigenTable<Real>;                                     \
  extern template Solution<Real> solve_coefficients(const Real&, TablePtr<Real>); \
  extern template double verify_eigenfunction(const EigenTable<Real>&, int, int);

WFMGF_SPECTRAL2_EXTERN(double)
WFMGF_SPECTRAL2_EXTERN(WideReal)
WFMGF_SPECTRAL2_EXTERN(Rational)
#undef WFMGF_SPECTRAL2_EXTERN

#define WFMGF_SPECTRAL2_EXTERN_EVAL(Real)                                          \
  extern template Real moment(const Solution<Real>&, int, const Real&);           \
  extern template Real mgf(const Solution<Real>&, const Real&, const Real&, int); \
  extern template SeriesValue<Real> fixation_probability(                         \
      const Solution<Real>&, const Real&, int, std::optional<double>);            \
  extern template SeriesValue<Real> extinction_probability(                       \
      const Solution<Real>&, const Real&, int, std::optional<double>);            \
  extern template Real heterozygosity(const Solution<Real>&, const Real&);        \
  extern template SeriesValue<Real> mean_absorption_time(const TablePtr<Real>&,   \
                                                         const Real&, int);

WFMGF_SPECTRAL2_EXTERN_EVAL(double)
WFMGF_SPECTRAL2_EXTERN_EVAL(WideReal)
#undef WFMGF_SPECTRAL2_EXTERN_EVAL

}  // namespace wfmgf::spectral2
