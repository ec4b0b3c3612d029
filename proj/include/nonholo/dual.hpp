#pragma once

// Forward-mode dual numbers, nestable. Dual<Dual<double>> carries exact
// second derivatives. Comparisons act on the innermost value.

#include <cmath>
#include <type_traits>

#include <Eigen/Core>

namespace nonholo {

template <class T>
struct Dual;

template <class T>
struct is_dual : std::false_type {};
template <class T>
struct is_dual<Dual<T>> : std::true_type {};

template <class T>
inline constexpr int dual_level = 0;
template <class T>
inline constexpr int dual_level<Dual<T>> = 1 + dual_level<T>;

inline double value_of(double x) { return x; }
template <class T>
double value_of(const Dual<T>& x);

template <class T>
struct Dual {
  T v{};
  T d{};

  Dual() = default;
  template <class U, std::enable_if_t<std::is_convertible_v<U, T> && !is_dual<std::decay_t<U>>::value, int> = 0>
  Dual(const U& x) : v(x), d(0) {}
  template <class U, std::enable_if_t<is_dual<U>::value && (dual_level<U> < dual_level<Dual<T>>), int> = 0>
  Dual(const U& x) : v(T(x)), d(0) {}
  Dual(const T& val, const T& der) : v(val), d(der) {}

  Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
  Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
  Dual& operator*=(const Dual& o) { *this = *this * o; return *this; }
  Dual& operator/=(const Dual& o) { *this = *this / o; return *this; }

  friend Dual operator+(const Dual& a) { return a; }
  friend Dual operator-(const Dual& a) { return {-a.v, -a.d}; }
  friend Dual operator+(const Dual& a, const Dual& b) { return {a.v + b.v, a.d + b.d}; }
  friend Dual operator-(const Dual& a, const Dual& b) { return {a.v - b.v, a.d - b.d}; }
  friend Dual operator*(const Dual& a, const Dual& b) { return {a.v * b.v, a.v * b.d + a.d * b.v}; }
  friend Dual operator/(const Dual& a, const Dual& b) {
    const T q = a.v / b.v;
    return {q, (a.d - q * b.d) / b.v};
  }
  friend Dual operator+(const Dual& a, double s) { return {a.v + s, a.d}; }
  friend Dual operator+(double s, const Dual& a) { return {a.v + s, a.d}; }
  friend Dual operator-(const Dual& a, double s) { return {a.v - s, a.d}; }
  friend Dual operator-(double s, const Dual& a) { return {s - a.v, -a.d}; }
  friend Dual operator*(const Dual& a, double s) { return {a.v * s, a.d * s}; }
  friend Dual operator*(double s, const Dual& a) { return {a.v * s, a.d * s}; }
  friend Dual operator/(const Dual& a, double s) { return {a.v / s, a.d / s}; }
  friend Dual operator/(double s, const Dual& a) {
    const T q = s / a.v;
    return {q, -q * a.d / a.v};
  }

  friend bool operator<(const Dual& a, const Dual& b) { return value_of(a) < value_of(b); }
  friend bool operator>(const Dual& a, const Dual& b) { return value_of(a) > value_of(b); }
  friend bool operator<=(const Dual& a, const Dual& b) { return value_of(a) <= value_of(b); }
  friend bool operator>=(const Dual& a, const Dual& b) { return value_of(a) >= value_of(b); }
  friend bool operator==(const Dual& a, const Dual& b) { return value_of(a) == value_of(b) && a.d == b.d; }
  friend bool operator!=(const Dual& a, const Dual& b) { return !(a == b); }
};

template <class T>
double value_of(const Dual<T>& x) {
  return value_of(x.v);
}

template <class T>
Dual<T> sin(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return {sin(a.v), cos(a.v) * a.d};
}
template <class T>
Dual<T> cos(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return {cos(a.v), -sin(a.v) * a.d};
}
template <class T>
Dual<T> tan(const Dual<T>& a) {
  using std::tan;
  const T t = tan(a.v);
  return {t, (1.0 + t * t) * a.d};
}
template <class T>
Dual<T> exp(const Dual<T>& a) {
  using std::exp;
  const T e = exp(a.v);
  return {e, e * a.d};
}
template <class T>
Dual<T> log(const Dual<T>& a) {
  using std::log;
  return {log(a.v), a.d / a.v};
}
template <class T>
Dual<T> sqrt(const Dual<T>& a) {
  using std::sqrt;
  const T s = sqrt(a.v);
  return {s, a.d / (2.0 * s)};
}
template <class T>
Dual<T> abs(const Dual<T>& a) {
  return value_of(a.v) < 0 ? -a : a;
}
template <class T>
Dual<T> fabs(const Dual<T>& a) {
  return abs(a);
}
template <class T>
Dual<T> pow(const Dual<T>& a, double e) {
  using std::pow;
  return {pow(a.v, e), e * pow(a.v, e - 1.0) * a.d};
}
template <class T>
Dual<T> acos(const Dual<T>& a) {
  using std::acos;
  using std::sqrt;
  return {acos(a.v), -a.d / sqrt(1.0 - a.v * a.v)};
}
template <class T>
Dual<T> asin(const Dual<T>& a) {
  using std::asin;
  using std::sqrt;
  return {asin(a.v), a.d / sqrt(1.0 - a.v * a.v)};
}
template <class T>
Dual<T> atan(const Dual<T>& a) {
  using std::atan;
  return {atan(a.v), a.d / (1.0 + a.v * a.v)};
}
template <class T>
Dual<T> atan2(const Dual<T>& y, const Dual<T>& x) {
  using std::atan2;
  const T r2 = x.v * x.v + y.v * y.v;
  return {atan2(y.v, x.v), (x.v * y.d - y.v * x.d) / r2};
}
template <class T>
bool isfinite(const Dual<T>& a) {
  using std::isfinite;
  return isfinite(a.v) && isfinite(a.d);
}

// Scalar tower. Level 2 is the deepest derivative the engine will build.
using S0 = double;
using S1 = Dual<S0>;
using S2 = Dual<S1>;
inline constexpr int kMaxDualLevel = 2;

template <class T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

template <class T>
Vec<double> values_of(const Vec<T>& x) {
  Vec<double> out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = value_of(x[i]);
  return out;
}
template <class T>
Mat<double> values_of(const Mat<T>& x) {
  Mat<double> out(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) out(i, j) = value_of(x(i, j));
  return out;
}

template <class T, class U>
Vec<T> cast_vec(const Vec<U>& x) {
  Vec<T> out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = T(x[i]);
  return out;
}

}  // namespace nonholo

namespace Eigen {

template <class T>
struct NumTraits<nonholo::Dual<T>> : GenericNumTraits<nonholo::Dual<T>> {
  using Real = nonholo::Dual<T>;
  using NonInteger = nonholo::Dual<T>;
  using Nested = nonholo::Dual<T>;
  using Literal = double;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 2 * NumTraits<T>::ReadCost,
    AddCost = 2 * NumTraits<T>::AddCost,
    MulCost = 3 * NumTraits<T>::MulCost
  };
  static Real epsilon() { return Real(NumTraits<double>::epsilon()); }
  static Real dummy_precision() { return Real(1e-12); }
  static Real highest() { return Real(NumTraits<double>::highest()); }
  static Real lowest() { return Real(NumTraits<double>::lowest()); }
  static int digits10() { return NumTraits<double>::digits10(); }
};

template <class T, typename BinaryOp>
struct ScalarBinaryOpTraits<nonholo::Dual<T>, double, BinaryOp> {
  using ReturnType = nonholo::Dual<T>;
};
template <class T, typename BinaryOp>
struct ScalarBinaryOpTraits<double, nonholo::Dual<T>, BinaryOp> {
  using ReturnType = nonholo::Dual<T>;
};

}  // namespace Eigen
