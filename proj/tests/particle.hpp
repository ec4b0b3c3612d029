#pragma once

// Nonholonomic particle shared by several test files.

#include <cmath>

#include "nonholo/mechanics.hpp"
#include "nonholo/symmetry.hpp"

namespace nonholo::testing {

// Particle in ℝ³ with ż = y ẋ; U is optional.
inline MechanicalSystem particle(bool with_potential = false, bool holonomic = false) {
  MechanicalSystem s;
  s.name = holonomic ? "holo" : (with_potential ? "particle_u" : "particle_t");
  s.Q = make_chart(s.name, {"x", "y", "z"}, {{-2, 2}, {-2, 2}, {-2, 2}});
  s.kappa = make_matrix(s.Q, 3, 3, [](const auto& q) {
    using T = scalar_t<decltype(q)>;
    return Mat<T>(Mat<T>::Identity(3, 3));
  });
  s.potential = make_scalar(s.Q, [with_potential](const auto& q) {
    using T = scalar_t<decltype(q)>;
    using std::sin;
    return with_potential ? T(sin(q[0])) : T(0);
  });
  s.constraint_forms.push_back(make_form(s.Q, 1, [holonomic](const auto& q) {
    using T = scalar_t<decltype(q)>;
    Alt<T> a(3, 1);
    a.c << (holonomic ? T(0) : T(-q[1])), T(0), T(1);
    return a;
  }));
  s.frame_D.push_back(make_vector(s.Q, [holonomic](const auto& q) {
    using T = scalar_t<decltype(q)>;
    Vec<T> v(3);
    v << T(1), T(0), (holonomic ? T(0) : T(q[1]));
    return v;
  }));
  s.frame_D.push_back(coordinate_vector(s.Q, 1));
  s.frame_W.push_back(coordinate_vector(s.Q, 2));
  return s;
}

// Canonical-momentum chart (x, y, z, p_x, p_y) with p_z = y p_x on M.
struct CanonicalChart {
  ChartPtr chart;
  SmoothMap to;    // adapted → canonical
  SmoothMap from;  // canonical → adapted
};

inline CanonicalChart canonical(const ConstrainedPhase& ph) {
  CanonicalChart c;
  c.chart = make_chart("particle_canonical", {"x", "y", "z", "px", "py"}, {});
  c.to = make_map(ph.M, c.chart, [](const auto& m) {
    using T = scalar_t<decltype(m)>;
    using std::sqrt;
    Vec<T> out = m;
    out[3] = m[3] / sqrt(1.0 + m[1] * m[1]);
    return out;
  });
  c.from = make_map(c.chart, ph.M, [](const auto& m) {
    using T = scalar_t<decltype(m)>;
    using std::sqrt;
    Vec<T> out = m;
    out[3] = m[3] * sqrt(1.0 + m[1] * m[1]);
    return out;
  });
  return c;
}

// Displayed π_nh in the canonical chart.
inline BiVector expected_pi_nh(ChartPtr c) {
  return make_multivector(c, 2, [](const auto& m) {
    using T = scalar_t<decltype(m)>;
    const T y = m[1], px = m[3];
    const T s = 1.0 + y * y;
    Alt<T> p(5, 2);
    p.set({0, 3}, 1.0 / s);
    p.set({2, 3}, y / s);
    p.set({1, 4}, T(1));
    p.set({3, 4}, -(y * px) / s);
    return p;
  });
}

// x- and z-translations with 𝔤_W = span{e_z}.
inline LieAlgebraData particle_lie(const ConstrainedPhase& ph) {
  LieAlgebraData lie;
  lie.dim_g = 2;
  lie.structure_constants = abelian_constants(2);
  lie.generators_Q = {coordinate_vector(ph.Q, 0), coordinate_vector(ph.Q, 2)};
  lie.g_W_basis = {1};
  return lie;
}

// Chaplygin restriction: z-translations only.
inline LieAlgebraData chaplygin_lie(const ConstrainedPhase& ph) {
  LieAlgebraData lie;
  lie.dim_g = 1;
  lie.structure_constants = abelian_constants(1);
  lie.generators_Q = {coordinate_vector(ph.Q, 2)};
  lie.g_W_basis = {0};
  return lie;
}

}  // namespace nonholo::testing
