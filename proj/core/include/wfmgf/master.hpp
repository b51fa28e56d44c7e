#pragma once

// Finite-population master equations dP/dt = P B on {0..2N} (two alleles) or
// on the simplex lattice Omega_K^{2N}, used as exact oracles for the
// spectral formulas.
//
// Two generators are provided for two alleles:
//  * implicit-a: B is defined row by row through its moments,
//      sum_k (k/2N)^n B(i,k) = n(n-1)/2 ((i/2N)^{n-1} - (i/2N)^n),  n = 0..2N,
//    which reproduces the diffusion moment hierarchy exactly. Time is
//    diffusion time. Off-diagonal entries may be negative.
//  * wright-fisher-b: B(i,k) = Binom(2N, i/2N)(k) - delta_ik, one time unit
//    being about one generation.
// implicit-K is the multi-allele analogue of implicit-a.

#include <Eigen/Dense>

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wfmgf/multi_index.hpp"

namespace wfmgf::master {

enum class Scheme { implicit_a, wright_fisher_b, implicit_k };

/// "implicit-a", "wright-fisher-b", "implicit-K".
std::string_view to_string(Scheme scheme);
/// Accepts the names above and the short forms "a", "b", "aK".
Scheme parse_scheme(std::string_view name);

enum class Arithmetic {
  automatic,  ///< floating point, falling back to exact on a bad residual
  floating,
  exact,
};

std::string_view to_string(Arithmetic arithmetic);
Arithmetic parse_arithmetic(std::string_view name);

inline constexpr int kWrightFisherCap = 2048;
inline constexpr int kImplicitFloatCap = 32;
inline constexpr int kImplicitExactCap = 64;
inline constexpr std::size_t kImplicitStateCap = 500;
inline constexpr std::size_t kImplicitExactStateCap = 200;
inline constexpr double kResidualTolerance = 1e-8;

struct RateMatrix {
  Scheme scheme;
  int two_n;
  SimplexGrid grid;  ///< dimension 1 for the two-allele schemes
  Eigen::MatrixXd entries;
  bool exact = false;  ///< built in rational arithmetic
  double residual = 0;  ///< max defining-system residual (0 for wright-fisher-b)
  std::vector<std::string> warnings;

  int dimension() const noexcept { return grid.dimension(); }
  /// "diffusion" for the implicit schemes, "generation" for wright-fisher-b.
  std::string_view time_unit() const noexcept;
};

/// Binomial Wright-Fisher generator; pmf terms are evaluated without
/// forming the binomial coefficient, so large 2N does not overflow.
RateMatrix build_rate_wf(int two_n);

/// Implicit generator from the moment conditions, one Vandermonde solve per
/// row. Floating mode allows 2N <= 32, exact mode 2N <= 64.
RateMatrix build_rate_implicit(int two_n, Arithmetic arithmetic = Arithmetic::automatic);

/// Multi-allele implicit generator over the monomials x^alpha, alpha in
/// Omega_K^{2N}, with right-hand sides
///   -|alpha|(|alpha|-1)/2 x^alpha + sum_u alpha_u(alpha_u-1)/2 x^{alpha-e_u}.
RateMatrix build_rate_implicit_k(int dimension, int two_n,
                                 Arithmetic arithmetic = Arithmetic::automatic);

struct TransitionOptions {
  bool self_check = true;  ///< verify P(t) = P(t/2)^2 and BP = PB
  double semigroup_tolerance = 1e-8;
  double commutator_tolerance = 1e-9;  ///< relative to max(1, |B|_max |P|_max)
};

struct TransitionMatrix {
  Eigen::MatrixXd P;
  double t = 0;
  /// Most negative entry of e^{Bt} before any clamping.
  double min_entry = 0;
  /// Self-check defects, max-norm; zero when the check was skipped.
  double semigroup_defect = 0;
  double commutator_defect = 0;

  /// Distribution after time t started from state position i.
  std::vector<double> row(std::size_t i) const;
};

/// P(t) = e^{Bt}. For wright-fisher-b, entries in [-1e-12, 0) are clamped
/// and rows renormalized; anything more negative is an AccuracyError. The
/// implicit schemes yield signed matrices and are returned unchanged.
TransitionMatrix transition_matrix(const RateMatrix& rates, double t,
                                   const TransitionOptions& options = {});

/// sum_j (j/2N)^alpha row_j.
double distribution_moment(std::span<const double> row, const MultiIndex& order,
                           const SimplexGrid& grid);
/// Two-allele shorthand: sum_j (j/2N)^n row_j.
double distribution_moment(std::span<const double> row, int n, int two_n);

struct DiffusionResiduals {
  std::vector<MultiIndex> orders;
  std::vector<double> max_residual;  ///< over interior states, per order
};

/// Central-moment sums sum_z (z-x)^alpha b(x,z) against their diffusion
/// targets: x_u(delta_uv - x_v) for |alpha| = 2 (divided by 2N for
/// wright-fisher-b), zero otherwise. Interior states only.
DiffusionResiduals diffusion_limit_residuals(const RateMatrix& rates, int max_order);

/// Wright-fisher-b time unit to diffusion time: t_b / 2N.
double diffusion_time(double generation_time, int two_n);
double generation_time(double diffusion_time, int two_n);

/// Dense row-major CSV with a '#'-prefixed JSON metadata line.
void write_csv(std::ostream& os, const RateMatrix& rates);
void write_csv(std::ostream& os, const RateMatrix& rates, const TransitionMatrix& transition);

}  // namespace wfmgf::master
