#include "wfmgf/multi_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "wfmgf/error.hpp"

namespace wfmgf {

MultiIndex::MultiIndex(std::vector<int> components)
    : components_(std::move(components)) {
  for (int c : components_) {
    if (c < 0) throw InvalidArgument("multi-index components must be >= 0");
  }
}

MultiIndex::MultiIndex(std::initializer_list<int> components)
    : MultiIndex(std::vector<int>(components)) {}

MultiIndex MultiIndex::zero(std::size_t dimension) {
  return MultiIndex(std::vector<int>(dimension, 0));
}

MultiIndex MultiIndex::unit(std::size_t dimension, std::size_t u) {
  if (u >= dimension) throw InvalidArgument("unit vector index out of range");
  std::vector<int> c(dimension, 0);
  c[u] = 1;
  return MultiIndex(std::move(c));
}

MultiIndex MultiIndex::lowered(std::size_t u) const {
  if (u >= size() || components_[u] < 1) {
    throw InvalidArgument("alpha - e_u requires alpha_u >= 1");
  }
  MultiIndex out = *this;
  --out.components_[u];
  return out;
}

MultiIndex MultiIndex::raised(std::size_t u) const {
  if (u >= size()) throw InvalidArgument("component index out of range");
  MultiIndex out = *this;
  ++out.components_[u];
  return out;
}

std::string MultiIndex::to_string() const {
  std::ostringstream os;
  os << *this;
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const MultiIndex& alpha) {
  os << '(';
  for (std::size_t u = 0; u < alpha.size(); ++u) {
    if (u) os << ',';
    os << alpha[u];
  }
  return os << ')';
}

int degree(const MultiIndex& alpha) noexcept {
  const auto c = alpha.components();
  return std::accumulate(c.begin(), c.end(), 0);
}

std::uint64_t multi_factorial(const MultiIndex& alpha) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t result = 1;
  for (int c : alpha.components()) {
    for (int j = 2; j <= c; ++j) {
      if (result > kMax / static_cast<std::uint64_t>(j)) {
        throw Overflow("multi_factorial" + alpha.to_string() +
                       " does not fit in 64 bits");
      }
      result *= static_cast<std::uint64_t>(j);
    }
  }
  return result;
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  // result * (n-k+j) / j is C(n-k+j, j); cancel the gcd first so the
  // product only overflows when the answer does.
  std::uint64_t result = 1;
  for (int j = 1; j <= k; ++j) {
    const auto g = std::gcd(result, static_cast<std::uint64_t>(j));
    const auto factor = static_cast<std::uint64_t>(n - k + j) / (static_cast<std::uint64_t>(j) / g);
    if (__builtin_mul_overflow(result / g, factor, &result)) {
      throw Overflow("binomial coefficient C(" + std::to_string(n) + "," + std::to_string(k) +
                     ") does not fit in 64 bits");
    }
  }
  return result;
}

bool GradedLess::operator()(const MultiIndex& a, const MultiIndex& b) const {
  const int da = degree(a);
  const int db = degree(b);
  if (da != db) return da < db;
  return b < a;
}

namespace {

void compositions(int dimension, int remaining, std::size_t u,
                  std::vector<int>& current, std::vector<MultiIndex>& out) {
  if (u + 1 == static_cast<std::size_t>(dimension)) {
    current[u] = remaining;
    out.emplace_back(current);
    return;
  }
  for (int c = remaining; c >= 0; --c) {
    current[u] = c;
    compositions(dimension, remaining - c, u + 1, current, out);
  }
}

}  // namespace

std::vector<MultiIndex> enumerate_degree(int dimension, int degree) {
  if (dimension < 1) throw InvalidArgument("dimension must be >= 1");
  if (degree < 0) throw InvalidArgument("degree must be >= 0");
  std::vector<MultiIndex> out;
  std::vector<int> current(static_cast<std::size_t>(dimension), 0);
  compositions(dimension, degree, 0, current, out);
  return out;
}

std::vector<MultiIndex> graded_enumerate(int dimension, int max_degree) {
  if (dimension < 1) throw InvalidArgument("dimension must be >= 1");
  if (max_degree < 0) throw InvalidArgument("max_degree must be >= 0");
  std::vector<MultiIndex> out;
  for (int d = 0; d <= max_degree; ++d) {
    auto block = enumerate_degree(dimension, d);
    out.insert(out.end(), std::make_move_iterator(block.begin()),
               std::make_move_iterator(block.end()));
  }
  return out;
}

double power(std::span<const double> x, const MultiIndex& alpha) {
  if (x.size() != alpha.size()) {
    throw InvalidArgument("point and multi-index dimensions differ");
  }
  double result = 1.0;
  for (std::size_t u = 0; u < x.size(); ++u) {
    for (int j = 0; j < alpha[u]; ++j) result *= x[u];
  }
  return result;
}

SimplexGrid::SimplexGrid(int dimension, int two_n)
    : dimension_(dimension), two_n_(two_n) {
  if (dimension < 1) throw InvalidArgument("dimension K must be >= 1");
  if (two_n < 1) throw InvalidArgument("2N must be >= 1");
  states_ = graded_enumerate(dimension, two_n);
  positions_.reserve(states_.size());
  for (std::size_t i = 0; i < states_.size(); ++i) positions_.emplace(states_[i], i);
}

std::size_t SimplexGrid::position(const MultiIndex& state) const {
  const auto it = positions_.find(state);
  if (it == positions_.end()) {
    throw InvalidArgument("state " + state.to_string() + " is not in the simplex lattice");
  }
  return it->second;
}

std::vector<double> SimplexGrid::frequencies(std::size_t pos) const {
  const auto& s = states_.at(pos);
  std::vector<double> x(s.size());
  for (std::size_t u = 0; u < s.size(); ++u) {
    x[u] = static_cast<double>(s[u]) / two_n_;
  }
  return x;
}

}  // namespace wfmgf

std::size_t std::hash<wfmgf::MultiIndex>::operator()(
    const wfmgf::MultiIndex& alpha) const noexcept {
  std::size_t h = alpha.size();
  for (int c : alpha.components()) {
    h ^= static_cast<std::size_t>(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}
