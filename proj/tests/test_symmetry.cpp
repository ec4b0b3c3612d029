#include <doctest.h>

#include <cmath>

#include "nonholo/symmetry.hpp"
#include "particle.hpp"
#include "support.hpp"

using namespace nonholo;
using namespace nonholo::testing;

namespace {

double px_of(const Vec<double>& m) { return m[3] / std::sqrt(1.0 + m[1] * m[1]); }

void check_report(const SymmetryReport& r) {
  CHECK(r.a_on_c <= 1e-12);
  CHECK(r.a_on_w <= 1e-12);
  CHECK(r.k_vs_bracket <= 1e-8);
  CHECK(r.bold_k_semibasic <= 1e-10);
  CHECK(r.bold_k_vs_generator <= 1e-8);
  CHECK(r.jk_semibasic <= 1e-10);
  CHECK(r.jk_invariance <= 1e-8);
  CHECK(r.k_vs_dA <= 1e-8);
  CHECK(r.dk_on_c <= 1e-8);
  CHECK(r.djk_vs_dj_wedge_k <= 1e-8);
  CHECK(r.hamiltonian_generator <= 1e-8);
  CHECK(r.momentum_equivariance <= 1e-8);
  CHECK(r.s_in_c <= 1e-10);
}

}  // namespace

TEST_CASE("particle A_W, 𝒦_W, 𝒥 and ⟨𝒥,𝒦_W⟩") {
  const ConstrainedPhase ph = build_constrained_phase(particle(true));
  const SymmetryStructure s = build_symmetry_structure(ph, particle_lie(ph));
  const TwoForm jk = jk_two_form(s);
  for (const auto& x : samples(*ph.M, 40)) {
    const double y = x[1], px = px_of(x);
    // A_W = (0, dz − y dx)
    CHECK(max_abs(s.A_W[0](x).c) == 0.0);
    CHECK(max_abs(Vec<double>(s.A_W[1](x).c - vec({-y, 0, 1, 0, 0}))) <= 1e-12);
    // 𝒦_W = (0, dx∧dy)
    Alt<double> dxdy(5, 2);
    dxdy.set({0, 1}, 1.0);
    CHECK(max_abs(s.K_W[0](x).c) <= 1e-12);
    CHECK(max_abs(Vec<double>(s.K_W[1](x).c - dxdy.c)) <= 1e-12);
    CHECK(s.J[0](x) == doctest::Approx(px).epsilon(1e-12));
    CHECK(s.J[1](x) == doctest::Approx(y * px).epsilon(1e-12));
    CHECK(max_abs(Vec<double>(jk(x).c - (y * px) * dxdy.c)) <= 1e-12);
  }
  // (y=1, p_x=2): ⟨𝒥,𝒦_W⟩(∂x,∂y) = 2; 𝒥 = (p_x, y p_x) = (2, 2).
  const Vec<double> m0 = vec({0.0, 1.0, 0.0, 2.0 * std::sqrt(2.0), 0.0});
  CHECK(jk(m0)({0, 1}) == doctest::Approx(2.0));
  CHECK(s.J[0](m0) == doctest::Approx(2.0));
  CHECK(s.J[1](m0) == doctest::Approx(2.0));
}

TEST_CASE("particle structural identities") {
  for (bool pot : {false, true}) {
    const ConstrainedPhase ph = build_constrained_phase(particle(pot));
    check_report(check_symmetry(build_symmetry_structure(ph, particle_lie(ph)), 25, 3));
  }
}

TEST_CASE("lifted generators are cotangent lifts") {
  const ConstrainedPhase ph = build_constrained_phase(particle(false));
  const SymmetryStructure s = build_symmetry_structure(ph, particle_lie(ph));
  // Translations preserve the adapted momenta.
  for (const auto& x : samples(*ph.M, 20)) CHECK(max_abs(Mat<double>(s.eta_M(x).bottomRows(2))) == 0.0);
}

TEST_CASE("Jacobiator formulas hold for the particle") {
  const ConstrainedPhase ph = build_constrained_phase(particle(true));
  const SymmetryStructure s = build_symmetry_structure(ph, particle_lie(ph));
  SUBCASE("B = 0") {
    const JacobiatorReport r = verify_jacobiator(s, zero_form(ph.M, 2), 30, 11);
    CHECK(r.curvature_formula <= 1e-7);
    CHECK(r.momentum_formula <= 1e-7);
    CHECK(r.pairing_formula <= 1e-7);
    CHECK(r.jacobiator_max > 1e-2);
    CHECK_FALSE(r.normalized);
  }
  SUBCASE("B = −⟨𝒥,𝒦_W⟩") {
    const JacobiatorReport r = verify_jacobiator(s, -jk_two_form(s), 30, 11);
    CHECK(r.curvature_formula <= 1e-7);
    CHECK(r.momentum_formula <= 1e-7);
    CHECK(r.pairing_formula <= 1e-7);
  }
  SUBCASE("generic B, normalized first") {
    const TwoForm b = make_form(ph.M, 2, [](const auto& x) {
      using T = scalar_t<decltype(x)>;
      using std::sin;
      Alt<T> w(5, 2);
      const IndexTable& t = index_table(5, 2);
      for (int sl = 0; sl < t.size(); ++sl) w.c[sl] = 0.2 * sin(0.7 * sl + x[0] * x[t.idx[sl][1]] + x[4]);
      return w;
    });
    const JacobiatorReport r = verify_jacobiator(s, b, 20, 11);
    CHECK(r.normalized);
    CHECK(r.b_section_residual > 1e-3);
    CHECK(r.curvature_formula <= 1e-7);
    CHECK(r.momentum_formula <= 1e-7);
    CHECK(r.pairing_formula <= 1e-7);
  }
}

TEST_CASE("ψ for the particle matches the direct cyclic expansion") {
  const ConstrainedPhase ph = build_constrained_phase(particle(false));
  const SymmetryStructure s = build_symmetry_structure(ph, particle_lie(ph));
  const BiVector pi = nh_bivector(ph);
  const TriVector psi = psi_trivector(s, pi);
  double largest = 0.0;
  for (const auto& x : samples(*ph.M, 30)) {
    // Only γ = dz sees (0,1)_M = ∂z, so ψ(dz,dp1,dp2) = dx∧dy(π♯dp1, π♯dp2).
    const Mat<double> p = to_matrix(pi(x));
    const double oracle = p(3, 0) * p(4, 1) - p(3, 1) * p(4, 0);
    const Alt<double> v = psi(x);
    CHECK(v({2, 3, 4}) == doctest::Approx(oracle).epsilon(1e-12));
    largest = std::max(largest, std::abs(oracle));
    // Triples without dz vanish.
    CHECK(v({0, 1, 3}) == 0.0);
    CHECK(v({1, 3, 4}) == 0.0);
  }
  CHECK(largest > 1e-2);
}

TEST_CASE("d𝒥∧𝒦_W equals d⟨𝒥,𝒦_W⟩ for the particle") {
  const ConstrainedPhase ph = build_constrained_phase(particle(false));
  const SymmetryStructure s = build_symmetry_structure(ph, particle_lie(ph));
  const ThreeForm a = dj_wedge_k(s);
  const ThreeForm b = exterior_derivative(jk_two_form(s));
  for (const auto& x : samples(*ph.M, 30)) CHECK(max_abs(Vec<double>(a(x).c - b(x).c)) <= 1e-9);
}

TEST_CASE("nonholonomic momentum map of the particle") {
  const ConstrainedPhase ph = build_constrained_phase(particle(false));
  const SymmetryStructure s = build_symmetry_structure(ph, particle_lie(ph));
  for (const auto& x : samples(*ph.M, 20)) {
    const double y = x[1], px = px_of(x);
    // P_gS(a,b) = a(1,y)
    const Mat<double> pg = s.P_gS(x);
    CHECK(max_abs(Mat<double>(pg - (Mat<double>(2, 2) << 1, 0, y, 0).finished())) <= 1e-12);
    for (double a : {1.0, -0.5})
      CHECK(nh_momentum(s, vec({a, 0.7}))(x) == doctest::Approx(a * (1 + y * y) * px).epsilon(1e-12));
  }
  const Vec<double> m0 = vec({0.3, 1.0, -0.2, 2.0 * std::sqrt(2.0), 0.4});
  CHECK(nh_momentum(s, vec({1.0, 0.0}))(m0) == doctest::Approx(4.0));
}

TEST_CASE("Chaplygin restriction of the particle") {
  const ConstrainedPhase ph = build_constrained_phase(particle(false));
  const SymmetryStructure s = build_symmetry_structure(ph, chaplygin_lie(ph));
  CHECK(s.S.cols() == 0);
  check_report(check_symmetry(s, 20, 5));
  const JacobiatorReport r = verify_jacobiator(s, zero_form(ph.M, 2), 20, 5);
  CHECK(r.curvature_formula <= 1e-7);
  CHECK(r.momentum_formula <= 1e-7);
  CHECK(r.pairing_formula <= 1e-7);
  // A is the principal connection dz − y dx and 𝒦 its curvature.
  for (const auto& x : samples(*ph.M, 10)) CHECK(s.K_W[0](x)({0, 1}) == doctest::Approx(1.0));
}

TEST_CASE("holonomic constraints give zero curvature and ψ") {
  const ConstrainedPhase ph = build_constrained_phase(particle(false, true));
  const SymmetryStructure s = build_symmetry_structure(ph, particle_lie(ph));
  const TriVector psi = psi_trivector(s, nh_bivector(ph));
  const ThreeForm djk = dj_wedge_k(s);
  for (const auto& x : samples(*ph.M, 10)) {
    for (const auto& k : s.K_W) CHECK(max_abs(k(x).c) <= 1e-12);
    CHECK(max_abs(psi(x).c) <= 1e-12);
    CHECK(max_abs(djk(x).c) <= 1e-12);
  }
}

TEST_CASE("symmetry preconditions are enforced") {
  const ConstrainedPhase ph = build_constrained_phase(particle(false));
  SUBCASE("wrong structure constants") {
    LieAlgebraData lie = particle_lie(ph);
    lie.structure_constants[0](0, 1) = 1.0;
    lie.structure_constants[0](1, 0) = -1.0;
    CHECK_THROWS_WITH_AS(build_symmetry_structure(ph, lie), doctest::Contains("structure constants"), std::domain_error);
  }
  SUBCASE("g_W does not generate W") {
    LieAlgebraData lie = particle_lie(ph);
    lie.g_W_basis = {0};
    CHECK_THROWS_WITH_AS(build_symmetry_structure(ph, lie), doctest::Contains("vertical-symmetry"), std::domain_error);
  }
  SUBCASE("dimension assumption") {
    LieAlgebraData lie;
    lie.dim_g = 1;
    lie.structure_constants = abelian_constants(1);
    lie.generators_Q = {coordinate_vector(ph.Q, 0)};
    lie.g_W_basis = {};
    CHECK_THROWS_AS(build_symmetry_structure(ph, lie), std::domain_error);
  }
}
