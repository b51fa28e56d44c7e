#pragma once

// Spectral solution of the (K+1)-allele moment generating function equation
//
//   dH/dt = -1/2 sum_{ij} s_i s_j d^2H/ds_i ds_j + sum_i (s_i^2/2) dH/ds_i.
//
// For each multi-index alpha with |alpha| = k the eigenfunction
// y_{k,alpha}(s) = sum_beta a_{alpha,beta} s^beta has a_{alpha,beta} =
// delta_{alpha,beta} on |beta| = k and, above that degree,
//
//   a_{alpha,beta} = sum_{u: beta_u >= 1} (beta_u - 1) a_{alpha,beta-e_u}
//                    / (|beta|(|beta|-1) - k(k-1)).
//
// Moments are m_beta(t) = beta! sum_{|alpha|<=|beta|} c_alpha a_{alpha,beta}
// e^{-mu_{|alpha|} t}.

#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "wfmgf/multi_index.hpp"
#include "wfmgf/scalar.hpp"

namespace wfmgf::spectral_k {

inline constexpr int kDefaultDegree = 10;

template <class Real>
class EigenTable {
 public:
  static EigenTable build(int dimension, int max_degree);

  int dimension() const noexcept { return dimension_; }
  int max_degree() const noexcept { return max_degree_; }

  /// Every multi-index of degree <= max_degree, graded lexicographic.
  const std::vector<MultiIndex>& indices() const noexcept { return indices_; }
  std::size_t position(const MultiIndex& alpha) const;
  /// First position of each degree block; block d is [offset(d), offset(d+1)).
  std::size_t block_offset(int degree) const { return block_offsets_.at(degree); }

  /// a_{alpha,beta}; zero when |beta| < |alpha|.
  const Real& coefficient(std::size_t alpha_pos, std::size_t beta_pos) const {
    return a_[beta_pos * indices_.size() + alpha_pos];
  }
  const Real& coefficient(const MultiIndex& alpha, const MultiIndex& beta) const {
    return coefficient(position(alpha), position(beta));
  }

 private:
  int dimension_ = 0;
  int max_degree_ = 0;
  std::vector<MultiIndex> indices_;
  std::unordered_map<MultiIndex, std::size_t> positions_;
  std::vector<std::size_t> block_offsets_;
  std::vector<Real> a_;  // dense, row = beta, column = alpha
};

template <class Real>
using TablePtr = std::shared_ptr<const EigenTable<Real>>;

template <class Real>
TablePtr<Real> build_eigen_table(int dimension, int max_degree) {
  return std::make_shared<const EigenTable<Real>>(
      EigenTable<Real>::build(dimension, max_degree));
}

template <class Real>
class Solution {
 public:
  Solution(TablePtr<Real> table, std::vector<Real> p, std::vector<Real> c)
      : table_(std::move(table)), p_(std::move(p)), c_(std::move(c)) {}

  std::span<const Real> frequencies() const noexcept { return p_; }
  /// c_alpha in the table's index order.
  std::span<const Real> coefficients() const noexcept { return c_; }
  const Real& coefficient(const MultiIndex& alpha) const { return c_[table_->position(alpha)]; }
  const EigenTable<Real>& table() const noexcept { return *table_; }

 private:
  TablePtr<Real> table_;
  std::vector<Real> p_;
  std::vector<Real> c_;
};

/// Solves p^beta = beta! sum_{|alpha|<=|beta|} c_alpha a_{alpha,beta} degree
/// block by degree block. Within a block the system is diagonal, so
///   c_beta = p^beta / beta! - sum_{|alpha|<|beta|} c_alpha a_{alpha,beta}.
template <class Real>
Solution<Real> solve_coefficients(std::span<const Real> p, TablePtr<Real> table);

/// Same, visiting the unknowns in a caller-chosen order. The order must be a
/// permutation of the table positions with non-decreasing degree.
template <class Real>
Solution<Real> solve_coefficients(std::span<const Real> p, TablePtr<Real> table,
                                  std::span<const std::size_t> visit_order);

/// Substitutes y_{k,alpha} truncated at total degree max_degree into
///   -1/2 sum_{ij} s_i s_j y_ij + sum_i (s_i^2/2) y_i + mu_k y
/// by explicit polynomial differentiation and returns the largest relative
/// coefficient residual over |beta| < max_degree.
template <class Real>
double verify_eigenfunction(const EigenTable<Real>& table, const MultiIndex& alpha,
                            int max_degree);

template <FloatingScalar Real>
Real moment(const Solution<Real>& sol, const MultiIndex& beta, const Real& t);

/// sum_{|beta|<=max_degree} m_beta(t) s^beta / beta!.
template <FloatingScalar Real>
Real mgf(const Solution<Real>& sol, std::span<const Real> s, const Real& t, int max_degree);

#define WFMGF_SPECTRALK_EXTERN(Real)                                                 \
  extern template class EigenTable<Real>;                                            \
  extern template Solution<Real> solve_coefficients(std::span<const Real>, TablePtr<Real>); \
  extern template Solution<Real> solve_coefficients(                                 \
      std::span<const Real>, TablePtr<Real>, std::span<const std::size_t>);          \
  extern template double verify_eigenfunction(const EigenTable<Real>&,               \
                                              const MultiIndex&, int);

WFMGF_SPECTRALK_EXTERN(double)
WFMGF_SPECTRALK_EXTERN(Rational)
#undef WFMGF_SPECTRALK_EXTERN

extern template double moment(const Solution<double>&, const MultiIndex&, const double&);
extern template double mgf(const Solution<double>&, std::span<const double>, const double&, int);

}  // namespace wfmgf::spectral_k
