#include <doctest.h>

#include <cmath>
#include <string>

#include "nonholo/reduction.hpp"
#include "particle.hpp"
#include "support.hpp"

using namespace nonholo;
using namespace nonholo::testing;

namespace {

// M/G with coordinates (y, p_x, p_y), p_x canonical.
QuotientChart particle_quotient(const ConstrainedPhase& ph) {
  QuotientChart q;
  q.total = ph.M;
  q.base = make_chart(ph.M->name + "/G", {"y", "px", "py"}, {{-2, 2}, {-1.5, 1.5}, {-2, 2}});
  q.rho = make_map(q.total, q.base, [](const auto& m) {
    using T = scalar_t<decltype(m)>;
    using std::sqrt;
    Vec<T> b(3);
    b << m[1], m[3] / sqrt(1.0 + m[1] * m[1]), m[4];
    return b;
  });
  q.sigma = make_map(q.base, q.total, [](const auto& b) {
    using T = scalar_t<decltype(b)>;
    using std::sqrt;
    Vec<T> m(5);
    m << T(0), b[0], T(0), b[1] * sqrt(1.0 + b[0] * b[0]), b[2];
    return m;
  });
  return q;
}

// W°/G with coordinates (y, p̃_x, p̃_y) of the covector p̃_x dx + p̃_y dy.
QuotientChart particle_quotient0(const ConstrainedPhase& ph0) {
  QuotientChart q;
  q.total = ph0.M;
  q.base = make_chart(ph0.M->name + "/G", {"y", "ptx", "pty"}, {{-2, 2}, {-3, 3}, {-2, 2}});
  q.rho = make_map(q.total, q.base, [](const auto& m) {
    using T = scalar_t<decltype(m)>;
    using std::sqrt;
    Vec<T> b(3);
    b << m[1], m[3] * sqrt(1.0 + m[1] * m[1]), m[4];
    return b;
  });
  q.sigma = make_map(q.base, q.total, [](const auto& b) {
    using T = scalar_t<decltype(b)>;
    using std::sqrt;
    Vec<T> m(5);
    m << T(0), b[0], T(0), b[1] / sqrt(1.0 + b[0] * b[0]), b[2];
    return m;
  });
  return q;
}

// (x, y, p1, p2) for the z-translation quotient.
QuotientChart chaplygin_quotient(const ConstrainedPhase& ph) {
  QuotientChart q;
  q.total = ph.M;
  q.base = make_chart(ph.M->name + "/Gz", {"x", "y", "p1", "p2"}, {{-2, 2}, {-2, 2}, {-2, 2}, {-2, 2}});
  q.rho = make_map(q.total, q.base, [](const auto& m) {
    using T = scalar_t<decltype(m)>;
    Vec<T> b(4);
    b << m[0], m[1], m[3], m[4];
    return b;
  });
  q.sigma = make_map(q.base, q.total, [](const auto& b) {
    using T = scalar_t<decltype(b)>;
    Vec<T> m(5);
    m << b[0], b[1], T(0), b[2], b[3];
    return m;
  });
  return q;
}

BiVector reduced_from(ChartPtr base, double factor) {
  return make_multivector(base, 2, [factor](const auto& b) {
    using T = scalar_t<decltype(b)>;
    Alt<T> p(3, 2);
    p.set({0, 2}, T(1));
    p.set({1, 2}, -factor * b[0] * b[1] / (1.0 + b[0] * b[0]));
    return p;
  });
}

ScalarField casimir(ChartPtr base) {
  return make_scalar(base, [](const auto& b) { return (1.0 + b[0] * b[0]) * b[1]; });
}

struct Fixture {
  ConstrainedPhase ph = build_constrained_phase(particle());
  SymmetryStructure s = build_symmetry_structure(ph, particle_lie(ph));
  QuotientChart q = particle_quotient(ph);
};

}  // namespace

TEST_CASE("particle quotient charts are sections of orbit projections") {
  Fixture f;
  const QuotientReport r = check_quotient(f.q, f.s.lie.generators_M, 50, 3);
  CHECK(r.section_residual <= 1e-10);
  CHECK(r.orbit_residual <= 1e-10);
  const ConstrainedPhase ph0 = annihilator_phase(f.ph);
  const SymmetryStructure s0 = build_symmetry_structure(ph0, particle_lie(ph0));
  const QuotientReport r0 = check_quotient(particle_quotient0(ph0), s0.lie.generators_M, 50, 3);
  CHECK(r0.section_residual <= 1e-10);
  CHECK(r0.orbit_residual <= 1e-10);
}

TEST_CASE("reduced nonholonomic bivector of the particle") {
  Fixture f;
  ReductionReport rep;
  const BiVector red = reduce_bivector(nh_bivector(f.ph), f.q, f.s.lie.generators_M, 16, 11, &rep);
  CHECK(rep.invariance <= 1e-8);
  CHECK(rep.section_independence <= 1e-8);
  const BiVector expected = reduced_from(f.q.base, 1.0);
  for (const auto& b : samples(*f.q.base, 60)) CHECK(max_abs(Vec<double>(red(b).c - expected(b).c)) <= 1e-10);
}

TEST_CASE("π_𝒥𝒦 doubles the p_x p_y coefficient and Λ is Poisson") {
  Fixture f;
  double gap = 1.0;
  const BiVector pjk = pi_jk(f.s, 16, 11, &gap);
  CHECK(gap <= 1e-9);
  const CanonicalChart cc = canonical(f.ph);
  const BiVector in_canonical = pushforward(cc.to, cc.from, pjk);
  const BiVector nh = expected_pi_nh(cc.chart);
  for (const auto& x : samples(*cc.chart, 40)) {
    const double y = x[1], px = x[3];
    Alt<double> want = nh(x);
    want.set({3, 4}, -2.0 * y * px / (1.0 + y * y));
    CHECK(max_abs(Vec<double>(in_canonical(x).c - want.c)) <= 1e-10);
  }
  const BiVector lambda = reduce_bivector(pjk, f.q, f.s.lie.generators_M);
  const BiVector expected = reduced_from(f.q.base, 2.0);
  for (const auto& b : samples(*f.q.base, 40)) CHECK(max_abs(Vec<double>(lambda(b).c - expected(b).c)) <= 1e-10);
  CHECK(lambda(vec({1.0, 2.0, 0.3}))({1, 2}) == doctest::Approx(-2.0));
  const TriVector j = jacobiator(lambda);
  for (const auto& b : samples(*f.q.base, 40)) CHECK(max_abs(j(b).c) <= 1e-8);
}

TEST_CASE("canonical bivector on T*R2 reduces to the slice") {
  const ChartPtr c = make_chart("tr2", {"x1", "x2", "p1", "p2"}, {{-1, 1}, {-1, 1}, {-1, 1}, {-1, 1}});
  const BiVector pi = make_multivector(c, 2, [](const auto& x) {
    using T = scalar_t<decltype(x)>;
    Alt<T> p(4, 2);
    p.set({0, 2}, T(1));
    p.set({1, 3}, T(1));
    return p;
  });
  QuotientChart q;
  q.total = c;
  q.base = make_chart("tr2/G", {"x2", "p1", "p2"}, {{-1, 1}, {-1, 1}, {-1, 1}});
  q.rho = make_map(c, q.base, [](const auto& x) {
    using T = scalar_t<decltype(x)>;
    return Vec<T>(x.tail(3));
  });
  q.sigma = make_map(q.base, c, [](const auto& b) {
    using T = scalar_t<decltype(b)>;
    Vec<T> x(4);
    x << T(0), b[0], b[1], b[2];
    return x;
  });
  const BiVector red = reduce_bivector(pi, q, {coordinate_vector(c, 0)});
  for (const auto& b : samples(*q.base, 20)) {
    Alt<double> want(3, 2);
    want.set({0, 2}, 1.0);
    CHECK(max_abs(Vec<double>(red(b).c - want.c)) == 0.0);
  }

  const BiVector bent = make_multivector(c, 2, [](const auto& x) {
    using T = scalar_t<decltype(x)>;
    using std::cos;
    Alt<T> p(4, 2);
    p.set({0, 2}, T(1));
    p.set({1, 3}, 2.0 + cos(x[0]));
    return p;
  });
  std::string msg;
  try {
    reduce_bivector(bent, q, {coordinate_vector(c, 0)});
  } catch (const std::domain_error& e) {
    msg = e.what();
  }
  CHECK(msg.find("not invariant under generator 0") != std::string::npos);
  CHECK(msg.find("at (") != std::string::npos);
}

TEST_CASE("Λ₀ on W°/G is the canonical bracket in y") {
  Fixture f;
  const ConstrainedPhase ph0 = annihilator_phase(f.ph);
  const AnnihilatorBundle w = w_annihilator_bundle(f.ph, f.s.lie, particle_quotient0(ph0));
  CHECK(w.route_gap <= 1e-9);
  CHECK(w.kernel_residual <= 1e-9);
  CHECK(w.nondegeneracy >= 1e-6);
  for (const auto& b : samples(*w.Lambda0.chart(), 40)) {
    Alt<double> want(3, 2);
    want.set({0, 2}, 1.0);
    CHECK(max_abs(Vec<double>(w.Lambda0(b).c - want.c)) <= 1e-10);
  }
  // Ω_W° = dx∧dp̃_x + dy∧dp̃_y with p̃_x = √(1+y²) p1.
  for (const auto& x : samples(*ph0.M, 20)) {
    const double y = x[1], s = std::sqrt(1.0 + y * y);
    Alt<double> want(5, 2);
    want.set({0, 3}, s);
    want.set({0, 1}, y / s * x[3]);
    want.set({1, 4}, 1.0);
    CHECK(max_abs(Vec<double>(w.Omega_W0(x).c - want.c)) <= 1e-10);
  }
}

TEST_CASE("Ψ carries π_𝒥𝒦 to π₀ and matches the canonical form") {
  Fixture f;
  const ConstrainedPhase ph0 = annihilator_phase(f.ph);
  const QuotientChart q0 = particle_quotient0(ph0);
  const ReducedBundle rb = build_reduced_bundle(f.s, f.q, q0);
  const PsiReport pr = check_psi(f.s, rb.w0, rb.pi_JK, rb.psi, 30, 5);
  CHECK(pr.adapted_identity <= 1e-12);
  CHECK(pr.round_trip <= 1e-12);
  CHECK(pr.min_abs_det >= 0.5);
  CHECK(pr.tc_vs_c0 <= 1e-8);
  CHECK(pr.omega_pullback <= 1e-8);
  CHECK(pr.pi_pushforward <= 1e-8);
  CHECK(pr.momentum <= 1e-9);

  // Canonical covectors: (p_x, p_y, y p_x) on M goes to ((1+y²) p_x, p_y, 0) on W°.
  const CanonicalChart cc = canonical(f.ph);
  for (const auto& x : samples(*cc.chart, 30)) {
    const double y = x[1];
    const Vec<double> w = rb.Psi(cc.from(x));
    const Vec<double> cov = Mat<double>(ph0.coframe(Vec<double>(w.head(3))).topRows(2)).transpose() * Vec<double>(w.tail(2));
    CHECK(cov[0] == doctest::Approx((1.0 + y * y) * x[3]).epsilon(1e-12));
    CHECK(cov[1] == doctest::Approx(x[4]).epsilon(1e-12));
    CHECK(std::abs(cov[2]) <= 1e-12);
  }

  // Ψ*Ω_W° on C in canonical coordinates: (1+y²)dx∧dp_x + dy∧dp_y + 2y p_x dx∧dy.
  const TwoForm pulled = pullback(cc.from, pullback(rb.Psi, rb.w0.Omega_W0));
  for (const auto& x : samples(*cc.chart, 20)) {
    const double y = x[1], px = x[3];
    Mat<double> c = Mat<double>::Zero(5, 4);
    c.col(0) << 1, 0, y, 0, 0;
    c(1, 1) = 1;
    c(3, 2) = 1;
    c(4, 3) = 1;
    Alt<double> want(5, 2);
    want.set({0, 3}, 1.0 + y * y);
    want.set({1, 4}, 1.0);
    want.set({0, 1}, 2.0 * y * px);
    CHECK(max_abs(Mat<double>(c.transpose() * (to_matrix(pulled(x)) - to_matrix(want)) * c)) <= 1e-10);
  }

  const BundleReport br = check_reduced_bundle(rb, 20, 5);
  CHECK(br.lambda_jacobiator <= 1e-8);
  CHECK(br.lambda0_jacobiator <= 1e-8);
  CHECK(br.psi_red_poisson <= 1e-8);
}

TEST_CASE("(1+y²)p_x is a Casimir of Λ but not of the reduced nonholonomic bracket") {
  Fixture f;
  const BiVector lambda = reduce_bivector(pi_jk(f.s), f.q, f.s.lie.generators_M);
  const BiVector nh_red = reduce_bivector(nh_bivector(f.ph), f.q, f.s.lie.generators_M);
  CHECK(casimir_residual(lambda, casimir(f.q.base), 50, 3).value <= 1e-10);
  CHECK(casimir_residual(nh_red, casimir(f.q.base), 50, 3).value > 1e-3);
}

TEST_CASE("Bates–Śniatycki identity on the Chaplygin particle") {
  const ConstrainedPhase ph = build_constrained_phase(particle());
  const SymmetryStructure s = build_symmetry_structure(ph, chaplygin_lie(ph));
  const QuotientChart q = chaplygin_quotient(ph);
  const BatesSniatyckiReport r = bates_sniatycki_check(s, q, 20, 3);
  CHECK(r.residual <= 1e-7);
  CHECK(r.lambda_form_closed <= 1e-7);
  CHECK(r.lambda_form_gap <= 1e-9);
  CHECK(r.jk_basic <= 1e-10);
  // Oracle: ⟨𝒥,𝒦⟩_red = y p1/√(1+y²) dx∧dy, so d⟨𝒥,𝒦⟩_red = y/√(1+y²) dx∧dy∧dp1.
  const ThreeForm d_jk = exterior_derivative(pullback(q.sigma, jk_two_form(s)));
  const TwoForm omega = inverse_two_form(reduce_bivector(nh_bivector(ph), q, s.lie.generators_M));
  const ThreeForm d_omega = exterior_derivative(omega);
  for (const auto& b : samples(*q.base, 20)) {
    const double y = b[1];
    CHECK(d_jk(b)({0, 1, 2}) == doctest::Approx(y / std::sqrt(1.0 + y * y)).epsilon(1e-10));
    CHECK(d_omega(b)({0, 1, 2}) == doctest::Approx(-y / std::sqrt(1.0 + y * y)).epsilon(1e-8));
  }

  Fixture f;
  CHECK_THROWS_WITH(bates_sniatycki_check(f.s, f.q, 4, 3), doctest::Contains("Chaplygin"));

  const ConstrainedPhase holo = build_constrained_phase(particle(false, true));
  const SymmetryStructure sh = build_symmetry_structure(holo, chaplygin_lie(holo));
  const BatesSniatyckiReport rh = bates_sniatycki_check(sh, chaplygin_quotient(holo), 10, 3);
  CHECK(rh.residual <= 1e-12);
  const ThreeForm dh = exterior_derivative(pullback(chaplygin_quotient(holo).sigma, jk_two_form(sh)));
  for (const auto& b : samples(*chaplygin_quotient(holo).base, 10)) CHECK(max_abs(dh(b).c) <= 1e-12);
}

TEST_CASE("reduced dynamics gauge: non-basic particle, basic Chaplygin variant") {
  Fixture f;
  const ReducedGaugeReport r = reduced_dynamics_gauge_check(f.s, zero_form(f.ph.M, 2), f.q, 16, 3);
  CHECK(r.dynamical_residual == 0.0);
  CHECK_FALSE(r.basic);
  CHECK_FALSE(r.applicable);
  CHECK(r.basic_contraction > 1e-3);
  CHECK(r.reduced_jacobiator <= 1e-7);

  const ReducedGaugeReport rj = reduced_dynamics_gauge_check(f.s, -jk_two_form(f.s), f.q, 16, 3);
  CHECK(rj.basic);
  CHECK_FALSE(rj.applicable);
  CHECK(rj.dynamical_residual > 1e-3);
  CHECK(rj.gauge_residual <= 1e-9);
  CHECK(rj.twisted_residual <= 1e-8);
  CHECK(rj.reduced_jacobiator <= 1e-7);

  const SymmetryStructure sc = build_symmetry_structure(f.ph, chaplygin_lie(f.ph));
  const ReducedGaugeReport rc = reduced_dynamics_gauge_check(sc, zero_form(f.ph.M, 2), chaplygin_quotient(f.ph), 16, 3);
  CHECK(rc.basic);
  CHECK(rc.applicable);
  CHECK(rc.gauge_residual <= 1e-9);
  CHECK(rc.twisted_residual <= 1e-6);
  CHECK(rc.reduced_jacobiator <= 1e-7);
  CHECK(rc.conserved <= 1e-9);
}
