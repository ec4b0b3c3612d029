#pragma once

// Pointwise antisymmetric tensors stored on strictly increasing multi-indices
// in lexicographic order. Forms and multivectors share this storage; the
// pairing with vectors or covectors uses the determinant convention
// (dx∧dy)(∂x,∂y) = 1.

#include <array>
#include <stdexcept>
#include <vector>

#include "nonholo/dual.hpp"

namespace nonholo {

inline constexpr int kMaxDegree = 4;
inline constexpr int kMaxDim = 16;

struct IndexTable {
  int n = 0;
  int k = 0;
  std::vector<std::array<int, kMaxDegree>> idx;
  // Dense lookup over n^k ordered tuples: rank of the sorted tuple or -1.
  std::vector<int> rank;
  std::vector<int> sign;
  int size() const { return static_cast<int>(idx.size()); }
};

const IndexTable& index_table(int n, int k);

// Sign and component position of the (possibly unsorted) tuple; sign 0 for repeats.
struct SignedSlot {
  int sign;
  int slot;
};
SignedSlot slot_of(int n, const int* tuple, int k);

inline int binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  int r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

template <class T>
struct Alt {
  int n = 0;
  int k = 0;
  Vec<T> c;

  Alt() = default;
  Alt(int dim, int degree) : n(dim), k(degree), c(Vec<T>::Zero(binomial(dim, degree))) {}
  Alt(int dim, int degree, Vec<T> comps) : n(dim), k(degree), c(std::move(comps)) {}

  T operator()(std::initializer_list<int> ix) const {
    const std::vector<int> t(ix);
    const SignedSlot s = slot_of(n, t.data(), static_cast<int>(t.size()));
    if (s.sign == 0) return T(0);
    return s.sign > 0 ? c[s.slot] : T(-c[s.slot]);
  }
  void set(std::initializer_list<int> ix, const T& value) {
    const std::vector<int> t(ix);
    const SignedSlot s = slot_of(n, t.data(), static_cast<int>(t.size()));
    if (s.sign == 0) throw std::invalid_argument("Alt::set: repeated index");
    c[s.slot] = s.sign > 0 ? value : T(-value);
  }
};

template <class T>
Alt<T> operator+(const Alt<T>& a, const Alt<T>& b) {
  return {a.n, a.k, a.c + b.c};
}
template <class T>
Alt<T> operator-(const Alt<T>& a, const Alt<T>& b) {
  return {a.n, a.k, a.c - b.c};
}
template <class T>
Alt<T> operator*(const T& s, const Alt<T>& a) {
  return {a.n, a.k, a.c * s};
}

// Antisymmetric matrix of a degree-2 tensor.
template <class T>
Mat<T> to_matrix(const Alt<T>& a) {
  Mat<T> m = Mat<T>::Zero(a.n, a.n);
  const IndexTable& t = index_table(a.n, 2);
  for (int s = 0; s < t.size(); ++s) {
    m(t.idx[s][0], t.idx[s][1]) = a.c[s];
    m(t.idx[s][1], t.idx[s][0]) = -a.c[s];
  }
  return m;
}

// Upper triangle of m, i.e. m is assumed antisymmetric.
template <class T>
Alt<T> from_matrix(const Mat<T>& m) {
  Alt<T> a(static_cast<int>(m.rows()), 2);
  const IndexTable& t = index_table(a.n, 2);
  for (int s = 0; s < t.size(); ++s) a.c[s] = m(t.idx[s][0], t.idx[s][1]);
  return a;
}

template <class T>
Alt<T> alt_from_vector(const Vec<T>& v) {
  return {static_cast<int>(v.size()), 1, v};
}

// Value on k vectors (or covectors): Σ_I a_I det[v_b(I_c)].
template <class T>
T evaluate(const Alt<T>& a, const std::vector<Vec<T>>& vs) {
  if (static_cast<int>(vs.size()) != a.k) throw std::invalid_argument("evaluate: argument count mismatch");
  const IndexTable& t = index_table(a.n, a.k);
  T total = T(0);
  for (int s = 0; s < t.size(); ++s) {
    const auto& I = t.idx[s];
    T det;
    switch (a.k) {
      case 0:
        det = T(1);
        break;
      case 1:
        det = vs[0][I[0]];
        break;
      case 2:
        det = vs[0][I[0]] * vs[1][I[1]] - vs[0][I[1]] * vs[1][I[0]];
        break;
      case 3: {
        const auto& u = vs[0];
        const auto& v = vs[1];
        const auto& w = vs[2];
        det = u[I[0]] * (v[I[1]] * w[I[2]] - v[I[2]] * w[I[1]]) -
              u[I[1]] * (v[I[0]] * w[I[2]] - v[I[2]] * w[I[0]]) +
              u[I[2]] * (v[I[0]] * w[I[1]] - v[I[1]] * w[I[0]]);
        break;
      }
      default:
        throw std::invalid_argument("evaluate: degree above 3");
    }
    total += a.c[s] * det;
  }
  return total;
}

template <class T>
Alt<T> wedge(const Alt<T>& a, const Alt<T>& b) {
  const int n = a.n, k = a.k + b.k;
  Alt<T> out(n, k);
  if (k > n) return out;
  const IndexTable& ta = index_table(n, a.k);
  const IndexTable& tb = index_table(n, b.k);
  int tuple[kMaxDegree];
  for (int i = 0; i < ta.size(); ++i) {
    for (int j = 0; j < tb.size(); ++j) {
      for (int p = 0; p < a.k; ++p) tuple[p] = ta.idx[i][p];
      for (int p = 0; p < b.k; ++p) tuple[a.k + p] = tb.idx[j][p];
      const SignedSlot s = slot_of(n, tuple, k);
      if (s.sign == 0) continue;
      out.c[s.slot] += (s.sign > 0 ? 1.0 : -1.0) * (a.c[i] * b.c[j]);
    }
  }
  return out;
}

// Contraction of the first slot with v.
template <class T>
Alt<T> interior(const Vec<T>& v, const Alt<T>& a) {
  if (a.k < 1) throw std::invalid_argument("interior: degree underflow");
  Alt<T> out(a.n, a.k - 1);
  const IndexTable& t = index_table(a.n, a.k);
  int rest[kMaxDegree];
  for (int s = 0; s < t.size(); ++s) {
    const auto& I = t.idx[s];
    for (int j = 0; j < a.k; ++j) {
      int q = 0;
      for (int p = 0; p < a.k; ++p)
        if (p != j) rest[q++] = I[p];
      const SignedSlot r = slot_of(a.n, rest, a.k - 1);
      const T term = v[I[j]] * a.c[s];
      out.c[r.slot] += (j % 2 == 0) ? term : T(-term);
    }
  }
  return out;
}

// Components out_J = a(m.row(J_1), ..., m.row(J_k)). Pushforward of a
// multivector uses the Jacobian, pullback of a form its transpose.
template <class T>
Alt<T> transform(const Alt<T>& a, const Mat<T>& m) {
  const int nout = static_cast<int>(m.rows());
  Alt<T> out(nout, a.k);
  const IndexTable& to = index_table(nout, a.k);
  std::vector<Vec<T>> args(a.k);
  for (int s = 0; s < to.size(); ++s) {
    for (int p = 0; p < a.k; ++p) args[p] = m.row(to.idx[s][p]).transpose();
    out.c[s] = evaluate(a, args);
  }
  return out;
}

template <class T>
double max_abs(const Alt<T>& a) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < a.c.size(); ++i) m = std::max(m, std::abs(value_of(a.c[i])));
  return m;
}

}  // namespace nonholo
