#include "wfmgf/linalg.hpp"

#include <cmath>
#include <utility>

#include "wfmgf/error.hpp"

namespace wfmgf::linalg {

template <class Scalar>
std::vector<Scalar> solve_vandermonde(std::span<const Scalar> nodes, std::vector<Scalar> rhs) {
  const std::size_t size = nodes.size();
  if (rhs.size() != size) throw InvalidArgument("Vandermonde system size mismatch");
  if (size == 0) return rhs;
  const std::size_t n = size - 1;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = n; i > k; --i) rhs[i] -= nodes[k] * rhs[i - 1];
  }
  for (std::size_t k = n; k-- > 0;) {
    for (std::size_t i = k + 1; i <= n; ++i) {
      const Scalar gap = nodes[i] - nodes[i - k - 1];
      if (gap == 0) throw InvalidArgument("Vandermonde nodes must be distinct");
      rhs[i] /= gap;
    }
    for (std::size_t i = k; i < n; ++i) rhs[i] -= rhs[i + 1];
  }
  return rhs;
}

template <class Scalar>
DenseMatrix<Scalar> solve(DenseMatrix<Scalar> a, DenseMatrix<Scalar> b) {
  const std::size_t n = a.rows;
  if (a.cols != n || b.rows != n) throw InvalidArgument("solve: dimension mismatch");
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    if constexpr (is_exact_v<Scalar>) {
      while (pivot < n && a(pivot, col) == 0) ++pivot;
    } else {
      using std::abs;
      for (std::size_t r = col + 1; r < n; ++r) {
        if (abs(a(r, col)) > abs(a(pivot, col))) pivot = r;
      }
    }
    if (pivot == n || a(pivot, col) == 0) throw InvalidArgument("solve: singular matrix");
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(pivot, j), a(col, j));
      for (std::size_t j = 0; j < b.cols; ++j) std::swap(b(pivot, j), b(col, j));
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      if (a(r, col) == 0) continue;
      const Scalar factor = a(r, col) / a(col, col);
      a(r, col) = 0;
      for (std::size_t j = col + 1; j < n; ++j) a(r, j) -= factor * a(col, j);
      for (std::size_t j = 0; j < b.cols; ++j) b(r, j) -= factor * b(col, j);
    }
  }
  for (std::size_t col = n; col-- > 0;) {
    for (std::size_t j = 0; j < b.cols; ++j) {
      Scalar v = b(col, j);
      for (std::size_t k = col + 1; k < n; ++k) v -= a(col, k) * b(k, j);
      b(col, j) = v / a(col, col);
    }
  }
  return b;
}

template std::vector<double> solve_vandermonde(std::span<const double>, std::vector<double>);
template std::vector<Rational> solve_vandermonde(std::span<const Rational>, std::vector<Rational>);
template DenseMatrix<double> solve(DenseMatrix<double>, DenseMatrix<double>);
template DenseMatrix<Rational> solve(DenseMatrix<Rational>, DenseMatrix<Rational>);

}  // namespace wfmgf::linalg
