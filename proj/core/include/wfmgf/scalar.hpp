#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <concepts>
#include <type_traits>

namespace wfmgf {

/// Exact rational arithmetic (GMP).
using Rational = boost::multiprecision::mpq_rational;

/// 500 significant decimal digits (MPFR). The spectral triangular solves lose
/// roughly 0.77 digits per order, so this covers truncation orders up to
/// kWideMaxOrder with double-precision accuracy left over.
using WideReal = boost::multiprecision::number<
    boost::multiprecision::mpfr_float_backend<500>,
    boost::multiprecision::et_off>;

inline constexpr int kWideMaxOrder = 600;

template <class T>
inline constexpr bool is_exact_v = std::is_same_v<T, Rational>;

/// Scalars that support exp/log (everything except the rational type).
template <class T>
concept FloatingScalar = std::same_as<T, double> || std::same_as<T, WideReal>;

template <class T>
double to_double(const T& v) {
  if constexpr (std::is_same_v<T, double>) {
    return v;
  } else {
    return v.template convert_to<double>();
  }
}

}  // namespace wfmgf
