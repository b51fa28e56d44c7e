#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace wfmgf {

/// Exponent vector alpha in N_0^K. Indexes moments m_alpha and the series
/// coefficients of the multi-allele eigenfunctions.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> components);
  MultiIndex(std::initializer_list<int> components);

  static MultiIndex zero(std::size_t dimension);
  /// e_u, the u-th unit vector.
  static MultiIndex unit(std::size_t dimension, std::size_t u);

  std::size_t size() const noexcept { return components_.size(); }
  int operator[](std::size_t u) const { return components_[u]; }
  std::span<const int> components() const noexcept { return components_; }

  /// alpha - e_u. Only defined when alpha_u >= 1; throws otherwise.
  MultiIndex lowered(std::size_t u) const;
  MultiIndex raised(std::size_t u) const;

  /// Lexicographic value comparison (suitable for ordered containers).
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

  std::string to_string() const;

 private:
  std::vector<int> components_;
};

std::ostream& operator<<(std::ostream& os, const MultiIndex& alpha);

/// |alpha| = sum of components.
int degree(const MultiIndex& alpha) noexcept;

/// alpha! = prod alpha_u!. Throws Overflow instead of wrapping.
std::uint64_t multi_factorial(const MultiIndex& alpha);

/// C(n, k) with overflow detection.
std::uint64_t binomial(int n, int k);

/// Graded lexicographic order: lower degree first; within a degree, larger
/// leading components first, so (1,0) precedes (0,1).
struct GradedLess {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const;
};

/// All alpha in N_0^K with |alpha| <= max_degree, in graded lexicographic
/// order. The result has C(max_degree + K, K) entries.
std::vector<MultiIndex> graded_enumerate(int dimension, int max_degree);

/// All alpha with |alpha| == degree, in graded lexicographic order.
std::vector<MultiIndex> enumerate_degree(int dimension, int degree);

/// x^alpha for a real point x.
double power(std::span<const double> x, const MultiIndex& alpha);

}  // namespace wfmgf

template <>
struct std::hash<wfmgf::MultiIndex> {
  std::size_t operator()(const wfmgf::MultiIndex& alpha) const noexcept;
};

namespace wfmgf {

/// The lattice Omega_K^{2N} = {i in N_0^K : sum i_u <= 2N}, enumerated in
/// graded lexicographic order. For K = 1 the position of state (i) is i.
class SimplexGrid {
 public:
  SimplexGrid(int dimension, int two_n);

  int dimension() const noexcept { return dimension_; }
  int two_n() const noexcept { return two_n_; }
  std::size_t size() const noexcept { return states_.size(); }
  const std::vector<MultiIndex>& states() const noexcept { return states_; }
  const MultiIndex& state(std::size_t pos) const { return states_[pos]; }

  /// Position of a state; throws InvalidArgument if it is not on the grid.
  std::size_t position(const MultiIndex& state) const;

  /// Frequency vector i / 2N of the state at a position.
  std::vector<double> frequencies(std::size_t pos) const;

 private:
  int dimension_;
  int two_n_;
  std::vector<MultiIndex> states_;
  std::unordered_map<MultiIndex, std::size_t> positions_;
};

}  // namespace wfmgf
