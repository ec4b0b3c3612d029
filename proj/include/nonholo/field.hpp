#pragma once

// Charts, type-erased coefficient functions and the derivative engine.
//
// A field is a closure over chart coordinates. Each closure is instantiated
// at every level of the scalar tower S0 → S1 → S2 so that derivatives of
// order ≤ 2 are exact in dual mode.

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "nonholo/alt.hpp"
#include "nonholo/dual.hpp"
#include "nonholo/rng.hpp"

namespace nonholo {

template <class V>
using scalar_t = typename std::decay_t<V>::Scalar;

struct Interval {
  double lo;
  double hi;
  double width() const { return hi - lo; }
};

struct Chart {
  std::string name;
  int dim = 0;
  std::vector<std::string> coord_names;
  std::vector<Interval> sample_box;
  std::vector<bool> periodic;
  // Replaces box sampling when the natural domain is not a box.
  std::function<Vec<double>(SplitMix64&)> sampler;

  Vec<double> sample(SplitMix64& rng) const;
  int index_of(const std::string& coord) const;
};
using ChartPtr = std::shared_ptr<const Chart>;

// Periodic coordinates sample on [0, 2π) unless an explicit box is given.
ChartPtr make_chart(std::string name, std::vector<std::string> coords, std::vector<Interval> box,
                    std::vector<bool> periodic = {}, std::function<Vec<double>(SplitMix64&)> sampler = {});

// Immutable and shared: copying a field never copies its captured state.
class Fn {
 public:
  Fn() = default;
  template <class F>
  Fn(F f, int out_dim)
      : out_dim_(out_dim),
        impl_(std::make_shared<const Impl>(Impl{[f](const Vec<S0>& x) { return Vec<S0>(f(x)); },
                                                [f](const Vec<S1>& x) { return Vec<S1>(f(x)); },
                                                [f](const Vec<S2>& x) { return Vec<S2>(f(x)); }})) {}

  int out_dim() const { return out_dim_; }
  explicit operator bool() const { return static_cast<bool>(impl_); }

  template <class T>
  Vec<T> operator()(const Vec<T>& x) const {
    if constexpr (std::is_same_v<T, S0>) {
      return impl_->f0(x);
    } else if constexpr (std::is_same_v<T, S1>) {
      return impl_->f1(x);
    } else if constexpr (std::is_same_v<T, S2>) {
      return impl_->f2(x);
    } else {
      static_assert(dual_level<T> <= kMaxDualLevel, "scalar beyond the supported tower");
      return {};
    }
  }

 private:
  struct Impl {
    std::function<Vec<S0>(const Vec<S0>&)> f0;
    std::function<Vec<S1>(const Vec<S1>&)> f1;
    std::function<Vec<S2>(const Vec<S2>&)> f2;
  };
  int out_dim_ = 0;
  std::shared_ptr<const Impl> impl_;
};

class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(ChartPtr chart, Fn fn) : chart_(std::move(chart)), fn_(std::move(fn)) {}
  const ChartPtr& chart() const { return chart_; }
  const Fn& fn() const { return fn_; }
  template <class T>
  T operator()(const Vec<T>& x) const {
    return fn_(x)[0];
  }

 private:
  ChartPtr chart_;
  Fn fn_;
};

// Antisymmetric field; Up selects multivectors, otherwise forms.
template <bool Up>
class AltField {
 public:
  AltField() = default;
  AltField(ChartPtr chart, int degree, Fn fn, bool degenerate = false)
      : chart_(std::move(chart)), degree_(degree), fn_(std::move(fn)), degenerate_(degenerate) {}

  const ChartPtr& chart() const { return chart_; }
  int dim() const { return chart_->dim; }
  int degree() const { return degree_; }
  const Fn& fn() const { return fn_; }
  // True when the degree exceeds the chart dimension and the field is the empty zero.
  bool degenerate() const { return degenerate_; }

  template <class T>
  Alt<T> operator()(const Vec<T>& x) const {
    return Alt<T>(chart_->dim, degree_, fn_(x));
  }
  // Components of a degree-1 field.
  template <class T>
  Vec<T> vec(const Vec<T>& x) const {
    return fn_(x);
  }

 private:
  ChartPtr chart_;
  int degree_ = 0;
  Fn fn_;
  bool degenerate_ = false;
};

using KForm = AltField<false>;
using KVector = AltField<true>;
using OneForm = KForm;
using TwoForm = KForm;
using ThreeForm = KForm;
using VectorField = KVector;
using BiVector = KVector;
using TriVector = KVector;

// Column-major matrix-valued field (metrics, frames, projectors).
class MatrixField {
 public:
  MatrixField() = default;
  MatrixField(ChartPtr chart, int rows, int cols, Fn fn)
      : chart_(std::move(chart)), rows_(rows), cols_(cols), fn_(std::move(fn)) {}
  const ChartPtr& chart() const { return chart_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const Fn& fn() const { return fn_; }
  template <class T>
  Mat<T> operator()(const Vec<T>& x) const {
    const Vec<T> flat = fn_(x);
    return Eigen::Map<const Mat<T>>(flat.data(), rows_, cols_);
  }

 private:
  ChartPtr chart_;
  int rows_ = 0;
  int cols_ = 0;
  Fn fn_;
};

class SmoothMap {
 public:
  SmoothMap() = default;
  SmoothMap(ChartPtr source, ChartPtr target, Fn fn)
      : source_(std::move(source)), target_(std::move(target)), fn_(std::move(fn)) {}
  const ChartPtr& source() const { return source_; }
  const ChartPtr& target() const { return target_; }
  const Fn& fn() const { return fn_; }
  template <class T>
  Vec<T> operator()(const Vec<T>& x) const {
    return fn_(x);
  }

 private:
  ChartPtr source_;
  ChartPtr target_;
  Fn fn_;
};

// Builders from generic lambdas. The lambda receives const Vec<T>& for every
// T in the tower and returns T, Vec<T>, Alt<T> or Mat<T> respectively.
template <class F>
ScalarField make_scalar(ChartPtr chart, F f) {
  Fn fn(
      [f](const auto& x) {
        using T = scalar_t<decltype(x)>;
        Vec<T> out(1);
        out[0] = f(x);
        return out;
      },
      1);
  return {std::move(chart), std::move(fn)};
}

template <class F>
VectorField make_vector(ChartPtr chart, F f) {
  const int n = chart->dim;
  return {std::move(chart), 1, Fn([f](const auto& x) { return f(x); }, n)};
}

template <class F>
KForm make_form(ChartPtr chart, int k, F f) {
  const int n = chart->dim;
  return {std::move(chart), k, Fn([f](const auto& x) { return f(x).c; }, binomial(n, k)), k > n};
}

template <class F>
KVector make_multivector(ChartPtr chart, int k, F f) {
  const int n = chart->dim;
  return {std::move(chart), k, Fn([f](const auto& x) { return f(x).c; }, binomial(n, k)), k > n};
}

template <class F>
MatrixField make_matrix(ChartPtr chart, int rows, int cols, F f) {
  Fn fn(
      [f, rows, cols](const auto& x) {
        using T = scalar_t<decltype(x)>;
        const Mat<T> m = f(x);
        if (m.rows() != rows || m.cols() != cols) throw std::logic_error("make_matrix: shape mismatch");
        return Vec<T>(Eigen::Map<const Vec<T>>(m.data(), m.size()));
      },
      rows * cols);
  return {std::move(chart), rows, cols, std::move(fn)};
}

template <class F>
SmoothMap make_map(ChartPtr source, ChartPtr target, F f) {
  const int m = target->dim;
  return {std::move(source), std::move(target), Fn([f](const auto& x) { return f(x); }, m)};
}

template <bool Up>
AltField<Up> zero_alt(ChartPtr chart, int k) {
  const int n = chart->dim;
  const int size = binomial(n, k);
  return {std::move(chart), k,
          Fn(
              [size](const auto& x) {
                using T = scalar_t<decltype(x)>;
                return Vec<T>(Vec<T>::Zero(size));
              },
              size),
          k > n};
}
inline KForm zero_form(ChartPtr chart, int k) { return zero_alt<false>(std::move(chart), k); }
inline KVector zero_multivector(ChartPtr chart, int k) { return zero_alt<true>(std::move(chart), k); }

// Constant coordinate differential dx^i and coordinate vector ∂_i.
KForm coordinate_differential(ChartPtr chart, int i);
VectorField coordinate_vector(ChartPtr chart, int i);
// Columns of a matrix field as vector fields.
std::vector<VectorField> columns(const MatrixField& m);

// ---------------------------------------------------------------------------
// Derivative engine

enum class DerivativeMode { Dual, FiniteDifference };

struct DerivativeSettings {
  DerivativeMode mode = DerivativeMode::Dual;
  // Central-difference step as a fraction of each coordinate's box width.
  double fd_step = 1e-6;
};

DerivativeSettings derivative_settings();
void set_derivative_settings(const DerivativeSettings& s);

// Set before any concurrent evaluation; restores the previous settings on exit.
class ScopedDerivativeSettings {
 public:
  explicit ScopedDerivativeSettings(const DerivativeSettings& s) : saved_(derivative_settings()) {
    set_derivative_settings(s);
  }
  ~ScopedDerivativeSettings() { set_derivative_settings(saved_); }
  ScopedDerivativeSettings(const ScopedDerivativeSettings&) = delete;
  ScopedDerivativeSettings& operator=(const ScopedDerivativeSettings&) = delete;

 private:
  DerivativeSettings saved_;
};

[[noreturn]] void throw_nesting_exhausted();

// Jacobian (out_dim × chart.dim) of f at x.
template <class T>
Mat<T> jacobian(const Fn& f, const Chart& chart, const Vec<T>& x) {
  const int n = chart.dim;
  const DerivativeSettings s = derivative_settings();
  if (s.mode == DerivativeMode::FiniteDifference) {
    Mat<T> jac(f.out_dim(), n);
    for (int l = 0; l < n; ++l) {
      const double h = s.fd_step * chart.sample_box[l].width();
      Vec<T> xp = x, xm = x;
      xp[l] += h;
      xm[l] -= h;
      jac.col(l) = (f(xp) - f(xm)) / (2.0 * h);
    }
    return jac;
  } else {
    if constexpr (dual_level<T> >= kMaxDualLevel) {
      throw_nesting_exhausted();
    } else {
      using D = Dual<T>;
      Mat<T> jac(f.out_dim(), n);
      Vec<D> xd(n);
      for (int i = 0; i < n; ++i) xd[i] = D(x[i], T(0));
      for (int l = 0; l < n; ++l) {
        xd[l].d = T(1);
        const Vec<D> y = f(xd);
        for (Eigen::Index r = 0; r < y.size(); ++r) jac(r, l) = y[r].d;
        xd[l].d = T(0);
      }
      return jac;
    }
  }
}

// Directional derivative (D f)(x)·v with a single seeded evaluation in dual mode.
template <class T>
Vec<T> directional(const Fn& f, const Chart& chart, const Vec<T>& x, const Vec<T>& v) {
  const DerivativeSettings s = derivative_settings();
  if (s.mode == DerivativeMode::FiniteDifference) return jacobian(f, chart, x) * v;
  if constexpr (dual_level<T> >= kMaxDualLevel) {
    throw_nesting_exhausted();
  } else {
    using D = Dual<T>;
    Vec<D> xd(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) xd[i] = D(x[i], v[i]);
    const Vec<D> y = f(xd);
    Vec<T> out(y.size());
    for (Eigen::Index r = 0; r < y.size(); ++r) out[r] = y[r].d;
    return out;
  }
}

template <class T>
Vec<T> gradient(const ScalarField& f, const Vec<T>& x) {
  return jacobian(f.fn(), *f.chart(), x).row(0).transpose();
}

}  // namespace nonholo
