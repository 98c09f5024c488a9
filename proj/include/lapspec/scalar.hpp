#pragma once

// Scalar types the estimator can be instantiated with, plus the few numeric
// helpers that have to be spelled differently for Boost multiprecision types.

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>

#include <Eigen/Dense>

#if defined(LAPSPEC_HAS_QUAD)
#include <boost/multiprecision/float128.hpp>
#endif

namespace lapspec {

#if defined(LAPSPEC_HAS_QUAD)
/// IEEE binary128 (113-bit significand) through libquadmath.
using quad = boost::multiprecision::float128;
#endif

template <typename S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

template <typename S>
inline S epsilon() {
  return std::numeric_limits<S>::epsilon();
}

template <typename S>
inline double to_double(const S& x) {
  return static_cast<double>(x);
}

template <typename S>
inline S from_double(double x) {
  return S(x);
}

/// Relative singular-value threshold used when the caller does not give one.
/// 1e-8 for double; wider types keep the same sqrt(eps) scaling.
template <typename S>
inline double default_rank_rel_tol() {
  if constexpr (std::is_same_v<S, double>) {
    return 1e-8;
  } else {
    const double ratio = to_double(epsilon<S>()) / std::numeric_limits<double>::epsilon();
    return 1e-8 * std::sqrt(ratio);
  }
}

/// Shortest decimal text that round-trips the value.
template <typename S>
std::string format_scalar(const S& x) {
  std::ostringstream os;
  os.precision(std::numeric_limits<S>::max_digits10);
  os << x;
  return os.str();
}

template <typename S>
S parse_scalar(std::string_view text) {
  if constexpr (std::is_same_v<S, double>) {
    return std::stod(std::string(text));
  } else if constexpr (std::is_same_v<S, long double>) {
    return std::stold(std::string(text));
  } else {
    return S(std::string(text));
  }
}

enum class Precision { Double, Quad };

inline std::string_view precision_name(Precision p) {
  return p == Precision::Double ? "double" : "quad";
}

inline constexpr bool quad_available() {
#if defined(LAPSPEC_HAS_QUAD)
  return true;
#else
  return false;
#endif
}

}  // namespace lapspec

#if defined(LAPSPEC_HAS_QUAD)
namespace Eigen {

// Boost 1.74's eigen.hpp lacks infinity()/quiet_NaN(); GenericNumTraits
// supplies them from std::numeric_limits.
template <>
struct NumTraits<lapspec::quad> : GenericNumTraits<lapspec::quad> {
  using Real = lapspec::quad;
  using NonInteger = lapspec::quad;
  using Nested = lapspec::quad;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 1,
    AddCost = 4,
    MulCost = 8
  };
  static inline Real epsilon() { return std::numeric_limits<lapspec::quad>::epsilon(); }
  static inline Real dummy_precision() { return Real(1e-28); }
  static inline int digits10() { return std::numeric_limits<lapspec::quad>::digits10; }
};

}  // namespace Eigen
#endif
