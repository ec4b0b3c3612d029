#include "nonholo/calculus.hpp"

#include <stdexcept>

namespace nonholo {

namespace {

void require_same_chart(const ChartPtr& a, const ChartPtr& b, const char* op) {
  if (a != b && (a->name != b->name || a->dim != b->dim))
    throw std::invalid_argument(std::string(op) + ": fields live on different charts (" + a->name + ", " + b->name + ")");
}

}  // namespace

KForm exterior_derivative(const KForm& w) {
  const ChartPtr chart = w.chart();
  const int n = chart->dim, k = w.degree();
  if (k + 1 > n) return zero_form(chart, k + 1);
  return make_form(chart, k + 1, [w, n, k](const auto& x) {
    using T = scalar_t<decltype(x)>;
    const Mat<T> jac = jacobian(w.fn(), *w.chart(), x);
    Alt<T> out(n, k + 1);
    const IndexTable& t = index_table(n, k + 1);
    int rest[kMaxDegree];
    for (int s = 0; s < t.size(); ++s) {
      const auto& I = t.idx[s];
      T acc = T(0);
      for (int j = 0; j <= k; ++j) {
        int q = 0;
        for (int p = 0; p <= k; ++p)
          if (p != j) rest[q++] = I[p];
        const SignedSlot r = slot_of(n, rest, k);
        const T term = jac(r.slot, I[j]);
        acc += (j % 2 == 0) ? term : T(-term);
      }
      out.c[s] = acc;
    }
    return out;
  });
}

OneForm differential(const ScalarField& f) {
  const int n = f.chart()->dim;
  return make_form(f.chart(), 1, [f, n](const auto& x) {
    using T = scalar_t<decltype(x)>;
    return Alt<T>(n, 1, gradient(f, x));
  });
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  require_same_chart(a.chart(), b.chart(), "scalar sum");
  return make_scalar(a.chart(), [a, b](const auto& x) { return a(x) + b(x); });
}

template <bool Up>
AltField<Up> wedge(const AltField<Up>& a, const AltField<Up>& b) {
  require_same_chart(a.chart(), b.chart(), "wedge");
  const int n = a.dim(), k = a.degree() + b.degree();
  if (k > n) return zero_alt<Up>(a.chart(), k);
  return {a.chart(), k,
          Fn([a, b](const auto& x) { return wedge(a(x), b(x)).c; }, binomial(n, k))};
}
template KForm wedge(const KForm&, const KForm&);
template KVector wedge(const KVector&, const KVector&);

KForm interior(const VectorField& x, const KForm& w) {
  require_same_chart(x.chart(), w.chart(), "interior");
  if (w.degree() < 1) throw std::invalid_argument("interior: degree underflow");
  return make_form(w.chart(), w.degree() - 1, [x, w](const auto& p) { return interior(x.vec(p), w(p)); });
}

KVector interior(const OneForm& a, const KVector& p) {
  require_same_chart(a.chart(), p.chart(), "interior");
  if (p.degree() < 1) throw std::invalid_argument("interior: degree underflow");
  return make_multivector(p.chart(), p.degree() - 1, [a, p](const auto& x) { return interior(a(x).c, p(x)); });
}

KVector sharp(const BiVector& pi, const KForm& phi) {
  require_same_chart(pi.chart(), phi.chart(), "sharp");
  if (pi.degree() != 2) throw std::invalid_argument("sharp: expects a bivector");
  return make_multivector(pi.chart(), phi.degree(), [pi, phi](const auto& x) { return sharp_at(pi(x), phi(x)); });
}

OneForm flat(const TwoForm& b, const VectorField& x) { return interior(x, b); }

TriVector jacobiator(const BiVector& pi) {
  const ChartPtr chart = pi.chart();
  const int n = chart->dim;
  if (n < 3) return zero_multivector(chart, 3);
  return make_multivector(chart, 3, [pi, n](const auto& x) {
    using T = scalar_t<decltype(x)>;
    const Mat<T> p = to_matrix(pi(x));
    const Mat<T> jac = jacobian(pi.fn(), *pi.chart(), x);
    // dp[l](j,k) = ∂_l π^{jk}
    std::vector<Mat<T>> dp(n);
    for (int l = 0; l < n; ++l) dp[l] = to_matrix(Alt<T>(n, 2, jac.col(l)));
    // g(i,j,k) = π^{il} ∂_l π^{jk}
    auto g = [&](int i, int j, int k) {
      T s = T(0);
      for (int l = 0; l < n; ++l) s += p(i, l) * dp[l](j, k);
      return s;
    };
    Alt<T> out(n, 3);
    const IndexTable& t = index_table(n, 3);
    for (int s = 0; s < t.size(); ++s) {
      const int i = t.idx[s][0], j = t.idx[s][1], k = t.idx[s][2];
      out.c[s] = g(i, j, k) + g(j, k, i) + g(k, i, j);
    }
    return out;
  });
}

template <bool Up>
AltField<Up> operator+(const AltField<Up>& a, const AltField<Up>& b) {
  require_same_chart(a.chart(), b.chart(), "sum");
  if (a.degree() != b.degree()) throw std::invalid_argument("sum: degree mismatch");
  return {a.chart(), a.degree(), Fn([a, b](const auto& x) { return Vec<scalar_t<decltype(x)>>(a.fn()(x) + b.fn()(x)); }, a.fn().out_dim()),
          a.degenerate()};
}
template <bool Up>
AltField<Up> operator-(const AltField<Up>& a, const AltField<Up>& b) {
  require_same_chart(a.chart(), b.chart(), "difference");
  if (a.degree() != b.degree()) throw std::invalid_argument("difference: degree mismatch");
  return {a.chart(), a.degree(), Fn([a, b](const auto& x) { return Vec<scalar_t<decltype(x)>>(a.fn()(x) - b.fn()(x)); }, a.fn().out_dim()),
          a.degenerate()};
}
template <bool Up>
AltField<Up> operator-(const AltField<Up>& a) {
  return {a.chart(), a.degree(), Fn([a](const auto& x) { return Vec<scalar_t<decltype(x)>>(-a.fn()(x)); }, a.fn().out_dim()),
          a.degenerate()};
}
template <bool Up>
AltField<Up> operator*(double s, const AltField<Up>& a) {
  return {a.chart(), a.degree(), Fn([a, s](const auto& x) { return Vec<scalar_t<decltype(x)>>(a.fn()(x) * s); }, a.fn().out_dim()),
          a.degenerate()};
}
template <bool Up>
AltField<Up> operator*(const ScalarField& f, const AltField<Up>& a) {
  require_same_chart(f.chart(), a.chart(), "product");
  return {a.chart(), a.degree(), Fn([a, f](const auto& x) { return Vec<scalar_t<decltype(x)>>(a.fn()(x) * f(x)); }, a.fn().out_dim()),
          a.degenerate()};
}

template KForm operator+(const KForm&, const KForm&);
template KVector operator+(const KVector&, const KVector&);
template KForm operator-(const KForm&, const KForm&);
template KVector operator-(const KVector&, const KVector&);
template KForm operator-(const KForm&);
template KVector operator-(const KVector&);
template KForm operator*(double, const KForm&);
template KVector operator*(double, const KVector&);
template KForm operator*(const ScalarField&, const KForm&);
template KVector operator*(const ScalarField&, const KVector&);

ScalarField pullback(const SmoothMap& f, const ScalarField& g) {
  return make_scalar(f.source(), [f, g](const auto& x) { return g(f(x)); });
}

KForm pullback(const SmoothMap& f, const KForm& w) {
  if (w.chart()->dim != f.target()->dim) throw std::invalid_argument("pullback: form does not live on the map's target");
  return make_form(f.source(), w.degree(), [f, w](const auto& x) {
    using T = scalar_t<decltype(x)>;
    const Mat<T> df = jacobian(f.fn(), *f.source(), x);
    return transform(w(f(x)), Mat<T>(df.transpose()));
  });
}

KVector pushforward(const SmoothMap& f, const SmoothMap& finv, const KVector& p) {
  if (p.chart()->dim != f.source()->dim) throw std::invalid_argument("pushforward: multivector does not live on the map's source");
  return make_multivector(f.target(), p.degree(), [f, finv, p](const auto& y) {
    using T = scalar_t<decltype(y)>;
    const Vec<T> x = finv(y);
    const Mat<T> df = jacobian(f.fn(), *f.source(), x);
    return transform(p(x), df);
  });
}

VectorField lie_bracket(const VectorField& x, const VectorField& y) {
  require_same_chart(x.chart(), y.chart(), "lie_bracket");
  return make_vector(x.chart(), [x, y](const auto& p) {
    using T = scalar_t<decltype(p)>;
    const Chart& c = *x.chart();
    return Vec<T>(directional(y.fn(), c, p, x.vec(p)) - directional(x.fn(), c, p, y.vec(p)));
  });
}

KForm lie_derivative(const VectorField& x, const KForm& w) {
  require_same_chart(x.chart(), w.chart(), "lie_derivative");
  if (w.degree() == 0) throw std::invalid_argument("lie_derivative: use the differential for functions");
  return interior(x, exterior_derivative(w)) + exterior_derivative(interior(x, w));
}

KVector lie_derivative(const VectorField& x, const KVector& p) {
  require_same_chart(x.chart(), p.chart(), "lie_derivative");
  const int n = p.dim(), k = p.degree();
  return make_multivector(p.chart(), k, [x, p, n, k](const auto& pt) {
    using T = scalar_t<decltype(pt)>;
    const Chart& c = *p.chart();
    const Vec<T> xv = x.vec(pt);
    const Alt<T> pv = p(pt);
    const Mat<T> dx = jacobian(x.fn(), c, pt);
    Alt<T> out(n, k, directional(p.fn(), c, pt, xv));
    const IndexTable& t = index_table(n, k);
    std::vector<Vec<T>> args(k);
    for (int s = 0; s < t.size(); ++s) {
      for (int j = 0; j < k; ++j) {
        for (int m = 0; m < k; ++m) {
          if (m == j) {
            args[m] = dx.row(t.idx[s][m]).transpose();
          } else {
            args[m] = Vec<T>::Zero(n);
            args[m][t.idx[s][m]] = T(1);
          }
        }
        out.c[s] -= evaluate(pv, args);
      }
    }
    return out;
  });
}

}  // namespace nonholo
