#include "wfmgf/spectral_k.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "wfmgf/error.hpp"

namespace wfmgf::spectral_k {

namespace {

constexpr auto kNone = std::numeric_limits<std::size_t>::max();

template <class Real>
Real mu(int k) {
  return Real(static_cast<long long>(k) * (k - 1)) / 2;
}

template <class Real>
Real factorial_of(const MultiIndex& alpha) {
  Real f = 1;
  for (int c : alpha.components()) {
    for (int j = 2; j <= c; ++j) f *= j;
  }
  return f;
}

template <class Real>
Real power_of(std::span<const Real> x, const MultiIndex& alpha) {
  Real r = 1;
  for (std::size_t u = 0; u < x.size(); ++u) {
    for (int j = 0; j < alpha[u]; ++j) r *= x[u];
  }
  return r;
}

// Sparse polynomial in s_1..s_K.
template <class Real>
using Polynomial = std::map<MultiIndex, Real>;

template <class Real>
Polynomial<Real> differentiate(const Polynomial<Real>& f, std::size_t u) {
  Polynomial<Real> out;
  for (const auto& [beta, v] : f) {
    if (beta[u] == 0) continue;
    out[beta.lowered(u)] += v * beta[u];
  }
  return out;
}

template <class Real>
Polynomial<Real> multiply_by(const Polynomial<Real>& f, std::size_t u) {
  Polynomial<Real> out;
  for (const auto& [beta, v] : f) out[beta.raised(u)] += v;
  return out;
}

template <class Real>
void validate_frequencies(std::span<const Real> p, int dimension) {
  if (static_cast<int>(p.size()) != dimension) {
    throw InvalidArgument("frequency vector must have K = " + std::to_string(dimension) +
                          " components");
  }
  Real total = 0;
  for (const auto& v : p) {
    if (v < 0) throw InvalidArgument("frequencies must be >= 0");
    total += v;
  }
  if (total > 1) throw InvalidArgument("frequencies must sum to at most 1");
}

}  // namespace

template <class Real>
EigenTable<Real> EigenTable<Real>::build(int dimension, int max_degree) {
  if (dimension < 1) throw InvalidArgument("dimension K must be >= 1");
  if (max_degree < 0) throw InvalidArgument("max_degree must be >= 0");
  EigenTable table;
  table.dimension_ = dimension;
  table.max_degree_ = max_degree;
  table.indices_ = graded_enumerate(dimension, max_degree);
  const std::size_t m = table.indices_.size();
  for (std::size_t i = 0; i < m; ++i) table.positions_.emplace(table.indices_[i], i);

  table.block_offsets_.assign(static_cast<std::size_t>(max_degree) + 2, m);
  for (std::size_t i = m; i-- > 0;) table.block_offsets_[degree(table.indices_[i])] = i;

  // Position of beta - e_u, or kNone when beta_u = 0 (the term is absent).
  const auto K = static_cast<std::size_t>(dimension);
  std::vector<std::size_t> lowered(m * K, kNone);
  for (std::size_t b = 0; b < m; ++b) {
    for (std::size_t u = 0; u < K; ++u) {
      if (table.indices_[b][u] >= 1) {
        lowered[b * K + u] = table.positions_.at(table.indices_[b].lowered(u));
      }
    }
  }

  table.a_.assign(m * m, Real(0));
  for (std::size_t a = 0; a < m; ++a) {
    const int k = degree(table.indices_[a]);
    table.a_[a * m + a] = 1;
    // y_0 = 1; the recurrence would divide 0 by 0 at degree 1.
    if (k == 0) continue;
    const long long kk = static_cast<long long>(k) * (k - 1);
    for (std::size_t b = table.block_offsets_[k + 1]; b < m; ++b) {
      const auto& beta = table.indices_[b];
      const int d = degree(beta);
      Real numerator = 0;
      for (std::size_t u = 0; u < K; ++u) {
        const std::size_t lower = lowered[b * K + u];
        if (lower == kNone) continue;
        numerator += Real(beta[u] - 1) * table.a_[lower * m + a];
      }
      table.a_[b * m + a] = numerator / Real(static_cast<long long>(d) * (d - 1) - kk);
    }
  }
  return table;
}

template <class Real>
std::size_t EigenTable<Real>::position(const MultiIndex& alpha) const {
  const auto it = positions_.find(alpha);
  if (it == positions_.end()) {
    throw InvalidArgument("multi-index " + alpha.to_string() + " is outside the table");
  }
  return it->second;
}

template <class Real>
Solution<Real> solve_coefficients(std::span<const Real> p, TablePtr<Real> table,
                                  std::span<const std::size_t> visit_order) {
  if (!table) throw InvalidArgument("null eigen table");
  validate_frequencies(p, table->dimension());
  const auto& indices = table->indices();
  const std::size_t m = indices.size();
  if (visit_order.size() != m) throw InvalidArgument("visit order must cover every index");
  std::vector<bool> seen(m, false);
  int last_degree = 0;
  for (std::size_t pos : visit_order) {
    if (pos >= m || seen[pos]) throw InvalidArgument("visit order is not a permutation");
    seen[pos] = true;
    const int d = degree(indices[pos]);
    if (d < last_degree) throw InvalidArgument("visit order must not decrease in degree");
    last_degree = d;
  }

  std::vector<Real> c(m, Real(0));
  for (std::size_t b : visit_order) {
    const auto& beta = indices[b];
    Real value = power_of(p, beta) / factorial_of<Real>(beta);
    const std::size_t lower_end = table->block_offset(degree(beta));
    for (std::size_t a = 0; a < lower_end; ++a) value -= c[a] * table->coefficient(a, b);
    c[b] = value;
  }
  return Solution<Real>(std::move(table), std::vector<Real>(p.begin(), p.end()), std::move(c));
}

template <class Real>
Solution<Real> solve_coefficients(std::span<const Real> p, TablePtr<Real> table) {
  if (!table) throw InvalidArgument("null eigen table");
  std::vector<std::size_t> order(table->indices().size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  return solve_coefficients<Real>(p, std::move(table), order);
}

template <class Real>
double verify_eigenfunction(const EigenTable<Real>& table, const MultiIndex& alpha,
                            int max_degree) {
  if (max_degree > table.max_degree() || degree(alpha) > max_degree) {
    throw InvalidArgument("verify_eigenfunction requires |alpha| <= degmax <= table degmax");
  }
  const std::size_t a = table.position(alpha);
  const int k = degree(alpha);
  const auto K = static_cast<std::size_t>(table.dimension());

  Polynomial<Real> y;
  for (std::size_t b = 0; b < table.indices().size(); ++b) {
    if (degree(table.indices()[b]) > max_degree) break;
    const Real& v = table.coefficient(a, b);
    if (v != 0) y[table.indices()[b]] = v;
  }

  // Each operator term is collected separately so the residual can be
  // measured relative to the size of the terms that cancel.
  std::map<MultiIndex, Real> sum;
  std::map<MultiIndex, Real> magnitude;
  auto accumulate = [&](const Polynomial<Real>& f, const Real& scale) {
    using std::abs;
    for (const auto& [beta, v] : f) {
      sum[beta] += scale * v;
      magnitude[beta] += abs(scale * v);
    }
  };

  for (std::size_t i = 0; i < K; ++i) {
    const auto yi = differentiate(y, i);
    for (std::size_t j = 0; j < K; ++j) {
      accumulate(multiply_by(multiply_by(differentiate(yi, j), i), j), Real(-1) / 2);
    }
    accumulate(multiply_by(multiply_by(yi, i), i), Real(1) / 2);
  }
  accumulate(y, mu<Real>(k));

  double worst = 0;
  for (const auto& [beta, v] : sum) {
    if (degree(beta) >= max_degree) continue;
    const Real& scale = magnitude[beta];
    if (scale == 0) continue;
    using std::abs;
    worst = std::max(worst, to_double(Real(abs(v) / scale)));
  }
  return worst;
}

template <FloatingScalar Real>
Real moment(const Solution<Real>& sol, const MultiIndex& beta, const Real& t) {
  using std::exp;
  if (t < 0) throw InvalidArgument("time t must be >= 0");
  const auto& table = sol.table();
  const std::size_t b = table.position(beta);
  const int d = degree(beta);
  const auto c = sol.coefficients();
  Real sum = 0;
  for (int k = 0; k <= d; ++k) {
    const Real decay = exp(-mu<Real>(k) * t);
    Real block = 0;
    for (std::size_t a = table.block_offset(k); a < table.block_offset(k + 1); ++a) {
      block += c[a] * table.coefficient(a, b);
    }
    sum += block * decay;
  }
  return factorial_of<Real>(beta) * sum;
}

template <FloatingScalar Real>
Real mgf(const Solution<Real>& sol, std::span<const Real> s, const Real& t, int max_degree) {
  const auto& table = sol.table();
  if (max_degree > table.max_degree()) throw InvalidArgument("mgf truncation exceeds table degmax");
  if (static_cast<int>(s.size()) != table.dimension()) {
    throw InvalidArgument("s must have K components");
  }
  Real sum = 0;
  for (const auto& beta : table.indices()) {
    if (degree(beta) > max_degree) break;
    sum += moment(sol, beta, t) * power_of(s, beta) / factorial_of<Real>(beta);
  }
  return sum;
}

#define WFMGF_SPECTRALK_INSTANTIATE(Real)                                             \
  template class EigenTable<Real>;                                                    \
  template Solution<Real> solve_coefficients(std::span<const Real>, TablePtr<Real>);  \
  template Solution<Real> solve_coefficients(std::span<const Real>, TablePtr<Real>,   \
                                             std::span<const std::size_t>);           \
  template double verify_eigenfunction(const EigenTable<Real>&, const MultiIndex&, int);

WFMGF_SPECTRALK_INSTANTIATE(double)
WFMGF_SPECTRALK_INSTANTIATE(Rational)

template double moment(const Solution<double>&, const MultiIndex&, const double&);
template double mgf(const Solution<double>&, std::span<const double>, const double&, int);

}  // namespace wfmgf::spectral_k
