#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wfmgf/scalar.hpp"

namespace wfmgf::linalg {

/// Solves the primal Vandermonde system sum_k nodes[k]^n z_k = rhs[n],
/// n = 0..size-1 (Bjorck-Pereyra, O(size^2)). Nodes must be distinct.
template <class Scalar>
std::vector<Scalar> solve_vandermonde(std::span<const Scalar> nodes, std::vector<Scalar> rhs);

/// Dense row-major matrix over an arbitrary scalar.
template <class Scalar>
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Scalar> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, Scalar(0)) {}
  Scalar& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  const Scalar& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

/// Solves A X = B by Gaussian elimination. Floating scalars use partial
/// pivoting; exact scalars pivot on the first nonzero entry. Throws
/// InvalidArgument if A is singular.
template <class Scalar>
DenseMatrix<Scalar> solve(DenseMatrix<Scalar> a, DenseMatrix<Scalar> b);

extern template std::vector<double> solve_vandermonde(std::span<const double>, std::vector<double>);
extern template std::vector<Rational> solve_vandermonde(std::span<const Rational>, std::vector<Rational>);
extern template DenseMatrix<double> solve(DenseMatrix<double>, DenseMatrix<double>);
extern template DenseMatrix<Rational> solve(DenseMatrix<Rational>, DenseMatrix<Rational>);

}  // namespace wfmgf::linalg
