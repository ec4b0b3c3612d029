#include "nonholo/examples.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Geometry>

#include "nonholo/calculus.hpp"

namespace nonholo {

const char* to_string(Origin o) { return o == Origin::Literature ? "literature" : "derived"; }

const char* to_string(Target t) {
  switch (t) {
    case Target::PiNh: return "pi_nh";
    case Target::JK: return "jk";
    case Target::Momentum: return "momentum";
    case Target::PiNhRed: return "pi_nh_red";
    case Target::Lambda: return "Lambda";
    case Target::Lambda0: return "Lambda0";
    case Target::OmegaW0: return "Omega_W0";
    case Target::Psi: return "Psi";
    case Target::CasimirLambda: return "casimir_Lambda";
    case Target::CasimirLambda0: return "casimir_Lambda0";
    case Target::NhMomentum: return "nh_momentum";
    case Target::Conserved: return "conserved";
    case Target::ReducedNh: return "reduced_nh";
    case Target::ReducedGauge: return "reduced_gauge";
  }
  return "?";
}

std::string suite_of(Target t) {
  switch (t) {
    case Target::PiNh:
    case Target::JK:
    case Target::Momentum: return "jk";
    case Target::PiNhRed:
    case Target::Lambda:
    case Target::Lambda0: return "lambda";
    case Target::OmegaW0:
    case Target::Psi: return "psi";
    case Target::CasimirLambda:
    case Target::CasimirLambda0:
    case Target::NhMomentum:
    case Target::Conserved: return "casimir";
    case Target::ReducedNh: return "dynamics";
    case Target::ReducedGauge: return "twisted";
  }
  return "";
}

double ExampleBundle::parameter(const std::string& n) const {
  for (const auto& p : parameters)
    if (p.name == n) return p.value;
  throw std::out_of_range(name + " has no parameter " + n);
}

const ExpectedField& ExampleBundle::field(const std::string& n) const {
  for (const auto& f : expected)
    if (f.name == n) return f;
  throw std::out_of_range(name + " has no expected field " + n);
}

std::vector<std::string> example_names() {
  return {"particle", "particle_chaplygin", "disk", "snakeboard", "ball_rank0", "ball_rank1", "ball_rank2", "ball_rank3"};
}

const std::vector<std::string>& all_suite_names() {
  static const std::vector<std::string> names = {"jacobiator", "jk",      "lambda",  "psi",
                                                 "casimir",    "dynamics", "twisted", "bates_sniatycki"};
  return names;
}

std::vector<std::string> list_suites(const ExampleBundle& b) {
  const bool chaplygin = b.lie.g_W_basis.size() == static_cast<std::size_t>(b.lie.dim_g);
  std::vector<std::string> out;
  for (const auto& s : all_suite_names()) {
    bool use = true;
    if (s == "bates_sniatycki") use = chaplygin;
    if (s == "casimir")
      use = std::any_of(b.expected.begin(), b.expected.end(), [](const ExpectedField& f) { return suite_of(f.target) == "casimir"; });
    if (use) out.push_back(s);
  }
  return out;
}

namespace {

// X' = X U with X the κ-orthonormal frame.
template <class T>
Mat<T> frame_change(const MechanicalSystem& sys, const Vec<T>& q) {
  const auto fd = frame_data(sys, q);
  const int r = static_cast<int>(sys.frame_D.size());
  Mat<T> xp(sys.Q->dim, r);
  for (int j = 0; j < r; ++j) xp.col(j) = sys.frame_D[j].vec(q);
  return fd.coframe.topRows(r) * xp;
}

ChartPtr with_momenta(const ConstrainedPhase& ph, const std::string& name, const std::vector<std::string>& momentum_names,
                      const std::vector<int>& kept, Interval momentum_box) {
  std::vector<std::string> names;
  std::vector<Interval> box;
  std::vector<bool> periodic;
  for (int i : kept) {
    names.push_back(ph.Q->coord_names[i]);
    box.push_back(ph.Q->sample_box[i]);
    periodic.push_back(ph.Q->periodic[i]);
  }
  for (const auto& m : momentum_names) {
    names.push_back(m);
    box.push_back(momentum_box);
    periodic.push_back(false);
  }
  return make_chart(name, names, box, periodic);
}

std::vector<int> iota_indices(int n) {
  std::vector<int> v(n);
  for (int i = 0; i < n; ++i) v[i] = i;
  return v;
}

template <class T>
Mat<T> rot_z(const T& a) {
  using std::cos;
  using std::sin;
  Mat<T> m = Mat<T>::Identity(3, 3);
  m(0, 0) = cos(a);
  m(0, 1) = -sin(a);
  m(1, 0) = sin(a);
  m(1, 1) = cos(a);
  return m;
}

template <class T>
Mat<T> rot_y(const T& a) {
  using std::cos;
  using std::sin;
  Mat<T> m = Mat<T>::Identity(3, 3);
  m(0, 0) = cos(a);
  m(0, 2) = sin(a);
  m(2, 0) = -sin(a);
  m(2, 2) = cos(a);
  return m;
}

// g = R_z(φ) R_y(θ) R_z(ψ).
template <class T>
Mat<T> attitude(const T& phi, const T& theta, const T& psi) {
  return rot_z(phi) * rot_y(theta) * rot_z(psi);
}

// Ω = E (φ̇, θ̇, ψ̇); the rows of E are the left Maurer-Cartan forms λ_i.
template <class T>
Mat<T> euler_matrix(const T& theta, const T& psi) {
  using std::cos;
  using std::sin;
  Mat<T> e(3, 3);
  e << -sin(theta) * cos(psi), sin(psi), T(0),  //
      sin(theta) * sin(psi), cos(psi), T(0),    //
      cos(theta), T(0), T(1);
  return e;
}

template <class T>
Vec<T> gamma_of(const T& theta, const T& psi) {
  return euler_matrix(theta, psi).col(0);
}

// v₁ λ₂∧λ₃ + v₂ λ₃∧λ₁ + v₃ λ₁∧λ₂ with λ_i = Σ_a lam(i, a) dx^{offset+a}.
template <class T>
Alt<T> cross_form(const Vec<T>& v, const Mat<T>& lam, int n, int offset) {
  std::vector<Alt<T>> l(3, Alt<T>(n, 1));
  for (int i = 0; i < 3; ++i)
    for (int a = 0; a < lam.cols(); ++a) l[i].c[offset + a] = lam(i, a);
  Alt<T> out(n, 2);
  for (int i = 0; i < 3; ++i) out = out + v[i] * wedge(l[(i + 1) % 3], l[(i + 2) % 3]);
  return out;
}

ScalarField zero_potential(ChartPtr q) {
  return make_scalar(q, [](const auto& x) {
    using T = scalar_t<decltype(x)>;
    return T(0);
  });
}

SmoothMap identity_map(ChartPtr c) {
  return make_map(c, c, [](const auto& x) { return x; });
}

ExpectedField expect(std::string name, Origin o, Target t, SmoothMap display) {
  ExpectedField f;
  f.name = std::move(name);
  f.origin = o;
  f.target = t;
  f.display = std::move(display);
  return f;
}

ExpectedField expect_bivector(std::string name, Origin o, Target t, SmoothMap display, BiVector p) {
  ExpectedField f = expect(std::move(name), o, t, std::move(display));
  f.bivector = std::move(p);
  return f;
}

ExpectedField expect_form(std::string name, Origin o, Target t, SmoothMap display, KForm w) {
  ExpectedField f = expect(std::move(name), o, t, std::move(display));
  f.form = std::move(w);
  return f;
}

ExpectedField expect_scalar(std::string name, Origin o, Target t, SmoothMap display, ScalarField s,
                            Vec<double> eta = {}) {
  ExpectedField f = expect(std::move(name), o, t, std::move(display));
  f.scalar = std::move(s);
  f.eta = std::move(eta);
  return f;
}

Vec<double> unit_vector(int n, int i) {
  Vec<double> v = Vec<double>::Zero(n);
  v[i] = 1.0;
  return v;
}

// ---------------------------------------------------------------------------
// Parameters

struct ParamSpec {
  std::string name;
  double def;
};

constexpr Interval kPositiveBox{0.1, 10.0};

std::vector<Parameter> resolve(const std::string& example, const std::vector<ParamSpec>& specs, const ParameterMap& given) {
  for (const auto& [k, v] : given) {
    const bool known = std::any_of(specs.begin(), specs.end(), [&](const ParamSpec& s) { return s.name == k; });
    if (!known) throw std::invalid_argument(example + ": unknown parameter " + k);
  }
  std::vector<Parameter> out;
  for (const auto& s : specs) {
    Parameter p{s.name, s.def, kPositiveBox};
    if (auto it = given.find(s.name); it != given.end()) p.value = it->second;
    if (!(p.value >= p.safe.lo && p.value <= p.safe.hi))
      throw std::domain_error(example + ": parameter " + p.name + " = " + std::to_string(p.value) + " outside [" +
                              std::to_string(p.safe.lo) + ", " + std::to_string(p.safe.hi) + "]");
    out.push_back(p);
  }
  return out;
}

double value(const std::vector<Parameter>& ps, const std::string& n) {
  for (const auto& p : ps)
    if (p.name == n) return p.value;
  throw std::logic_error("missing parameter " + n);
}

void finish(ExampleBundle& b) {
  b.phase = build_constrained_phase(b.system);
  b.phase0 = annihilator_phase(b.phase);
  if (!b.gauge.chart()) b.gauge = zero_form(b.phase.M, 2);
  b.monitors.insert(b.monitors.begin(), {"H_M", b.phase.H_M});
}

// ---------------------------------------------------------------------------
// Particle in ℝ³ with ż = y ẋ

MechanicalSystem particle_system(const std::string& name) {
  MechanicalSystem s;
  s.name = name;
  s.Q = make_chart(name, {"x", "y", "z"}, {{-2, 2}, {-2, 2}, {-2, 2}});
  s.kappa = make_matrix(s.Q, 3, 3, [](const auto& q) {
    using T = scalar_t<decltype(q)>;
    return Mat<T>(Mat<T>::Identity(3, 3));
  });
  s.potential = zero_potential(s.Q);
  s.constraint_forms.push_back(make_form(s.Q, 1, [](const auto& q) {
    using T = scalar_t<decltype(q)>;
    Alt<T> a(3, 1);
    a.c << T(-q[1]), T(0), T(1);
    return a;
  }));
  s.frame_D.push_back(make_vector(s.Q, [](const auto& q) {
    using T = scalar_t<decltype(q)>;
    Vec<T> v(3);
    v << T(1), T(0), q[1];
    return v;
  }));
  s.frame_D.push_back(coordinate_vector(s.Q, 1));
  s.frame_W.push_back(coordinate_vector(s.Q, 2));
  s.momentum_box = {-3.0, 3.0};
  return s;
}

// Adapted (x, y, z, p1, p2) → canonical (x, y, z, p_x, p_y); p1 = √(1+y²) p_x.
SmoothMap particle_canonical(const ConstrainedPhase& ph) {
  const ChartPtr c = make_chart(ph.M->name + "/canonical", {"x", "y", "z", "px", "py"}, ph.M->sample_box);
  return make_map(ph.M, c, [](const auto& m) {
    using T = scalar_t<decltype(m)>;
    using std::sqrt;
    Vec<T> out = m;
    out[3] = m[3] / sqrt(1.0 + m[1] * m[1]);
    return out;
  });
}

BiVector particle_reduced(ChartPtr base, double factor) {
  return make_multivector(base, 2, [factor](const auto& b) {
    using T = scalar_t<decltype(b)>;
    Alt<T> p(3, 2);
    p.set({0, 2}, T(1));
    p.set({1, 2}, -factor * b[0] * b[1] / (1.0 + b[0] * b[0]));
    return p;
  });
}

void particle_common(ExampleBundle& b) {
  const SmoothMap canon = particle_canonical(b.phase);
  const ChartPtr cc = canon.target();
  b.simulation_chart = ChartChange{canon, make_map(cc, b.phase.M, [](const auto& c) {
                                     using T = scalar_t<decltype(c)>;
                                     using std::sqrt;
                                     Vec<T> m = c;
                                     m[3] = c[3] * sqrt(1.0 + c[1] * c[1]);
                                     return m;
                                   })};
  b.expected.push_back(expect_bivector("pi_nh", Origin::Literature, Target::PiNh, canon,
                                       make_multivector(cc, 2, [](const auto& m) {
                                         using T = scalar_t<decltype(m)>;
                                         const T y = m[1], px = m[3];
                                         const T s = 1.0 + y * y;
                                         Alt<T> p(5, 2);
                                         p.set({0, 3}, 1.0 / s);
                                         p.set({2, 3}, y / s);
                                         p.set({1, 4}, T(1));
                                         p.set({3, 4}, -(y * px) / s);
                                         return p;
                                       })));
  b.expected.push_back(expect_form("jk", Origin::Literature, Target::JK, canon, make_form(cc, 2, [](const auto& m) {
                                     using T = scalar_t<decltype(m)>;
                                     Alt<T> w(5, 2);
                                     w.set({0, 1}, m[1] * m[3]);
                                     return w;
                                   })));
  const double px_default = 2.0;
  b.x0 = Vec<double>(5);
  b.x0 << 0.0, 1.0, 0.0, px_default * std::sqrt(2.0), 1.0;
}

ExampleBundle make_particle() {
  ExampleBundle b;
  b.name = "particle";
  b.system = particle_system("particle");
  finish(b);
  const ConstrainedPhase& ph = b.phase;
  b.lie.dim_g = 2;
  b.lie.structure_constants = abelian_constants(2);
  b.lie.generators_Q = {coordinate_vector(ph.Q, 0), coordinate_vector(ph.Q, 2)};
  b.lie.g_W_basis = {1};

  // M/G: (y, p_x, p_y) with p_x canonical.
  b.quotient.total = ph.M;
  b.quotient.base = make_chart("particle/M/G", {"y", "px", "py"}, {{-2, 2}, {-1.5, 1.5}, {-2, 2}});
  b.quotient.rho = make_map(ph.M, b.quotient.base, [](const auto& m) {
    using T = scalar_t<decltype(m)>;
    using std::sqrt;
    Vec<T> r(3);
    r << m[1], m[3] / sqrt(1.0 + m[1] * m[1]), m[4];
    return r;
  });
  b.quotient.sigma = make_map(b.quotient.base, ph.M, [](const auto& r) {
    using T = scalar_t<decltype(r)>;
    using std::sqrt;
    Vec<T> m(5);
    m << T(0), r[0], T(0), r[1] * sqrt(1.0 + r[0] * r[0]), r[2];
    return m;
  });
  // W°/G: (y, p̃_x, p̃_y) of the covector p̃_x dx + p̃_y dy.
  b.quotient0 = frame_quotient(b.phase0, {1}, {"ptx", "pty"}, {-3, 3});

  particle_common(b);
  const SmoothMap canon = b.field("pi_nh").display;
  const ChartPtr base = b.quotient.base, base0 = b.quotient0.base;
  const SmoothMap id = identity_map(base), id0 = identity_map(base0);
  const SmoothMap frame0 = frame_momentum_display(b.phase0, {"ptx", "pty"});

  b.expected.push_back(expect_scalar("momentum_x", Origin::Derived, Target::Momentum, canon,
                                     make_scalar(canon.target(), [](const auto& m) { return m[3]; }), unit_vector(2, 0)));
  b.expected.push_back(expect_scalar("momentum_z", Origin::Literature, Target::Momentum, canon,
                                     make_scalar(canon.target(), [](const auto& m) { return m[1] * m[3]; }),
                                     unit_vector(2, 1)));
  b.expected.push_back(expect_bivector("pi_nh_red", Origin::Literature, Target::PiNhRed, id, particle_reduced(base, 1.0)));
  b.expected.push_back(expect_bivector("Lambda", Origin::Literature, Target::Lambda, id, particle_reduced(base, 2.0)));
  b.expected.push_back(expect_bivector("Lambda0", Origin::Literature, Target::Lambda0, id0,
                                       make_multivector(base0, 2, [](const auto& r) {
                                         using T = scalar_t<decltype(r)>;
                                         Alt<T> p(3, 2);
                                         p.set({0, 2}, T(1));
                                         return p;
                                       })));
  b.expected.push_back(expect_form("Omega_W0", Origin::Derived, Target::OmegaW0, frame0,
                                   make_form(frame0.target(), 2, [](const auto& w) {
                                     using T = scalar_t<decltype(w)>;
                                     Alt<T> o(5, 2);
                                     o.set({0, 3}, T(1));
                                     o.set({1, 4}, T(1));
                                     return o;
                                   })));
  ExpectedField psi = expect("Psi", Origin::Derived, Target::Psi, canon);
  psi.display_target = frame0;
  psi.map = make_map(canon.target(), frame0.target(), [](const auto& m) {
    using T = scalar_t<decltype(m)>;
    Vec<T> w = m;
    w[3] = (1.0 + m[1] * m[1]) * m[3];
    return w;
  });
  b.expected.push_back(psi);
  b.expected.push_back(expect_scalar("casimir_Lambda", Origin::Literature, Target::CasimirLambda, id,
                                     make_scalar(base, [](const auto& r) { return (1.0 + r[0] * r[0]) * r[1]; })));
  b.expected.push_back(expect_scalar("casimir_Lambda0", Origin::Literature, Target::CasimirLambda0, id0,
                                     make_scalar(base0, [](const auto& r) { return r[1]; })));
  b.expected.push_back(expect_scalar("nh_momentum", Origin::Literature, Target::NhMomentum, canon,
                                     make_scalar(canon.target(), [](const auto& m) { return (1.0 + m[1] * m[1]) * m[3]; }),
                                     unit_vector(2, 0)));
  b.monitors.push_back({"f_casimir", pullback(canon, make_scalar(canon.target(), [](const auto& m) {
                                                return (1.0 + m[1] * m[1]) * m[3];
                                              }))});
  return b;
}

ExampleBundle make_particle_chaplygin() {
  ExampleBundle b;
  b.name = "particle_chaplygin";
  b.system = particle_system("particle_chaplygin");
  finish(b);
  const ConstrainedPhase& ph = b.phase;
  b.lie.dim_g = 1;
  b.lie.structure_constants = abelian_constants(1);
  b.lie.generators_Q = {coordinate_vector(ph.Q, 2)};
  b.lie.g_W_basis = {0};
  b.basic_gauge = true;

  b.quotient = frame_quotient(ph, {0, 1}, {"pt1", "pt2"}, {-3, 3});
  b.quotient0 = frame_quotient(b.phase0, {0, 1}, {"Px", "Py"}, {-3, 3});
  particle_common(b);
  const ChartPtr base0 = b.quotient0.base;
  b.expected.push_back(expect_bivector("Lambda0", Origin::Literature, Target::Lambda0, identity_map(base0),
                                       make_multivector(base0, 2, [](const auto& r) {
                                         using T = scalar_t<decltype(r)>;
                                         Alt<T> p(4, 2);
                                         p.set({0, 2}, T(1));
                                         p.set({1, 3}, T(1));
                                         return p;
                                       })));
  return b;
}

// ---------------------------------------------------------------------------
// Vertical rolling disk, Q = (x, y, φ, ψ)

ExampleBundle make_disk(const ParameterMap& given) {
  ExampleBundle b;
  b.name = "disk";
  b.parameters = resolve("disk", {{"m", 1.0}, {"R", 1.0}, {"I", 2.0}, {"J", 1.0}}, given);
  const double m = value(b.parameters, "m"), R = value(b.parameters, "R"), I = value(b.parameters, "I"),
               J = value(b.parameters, "J");
  MechanicalSystem& s = b.system;
  s.name = "disk";
  s.Q = make_chart("disk", {"x", "y", "phi", "psi"}, {{-2, 2}, {-2, 2}, {0, 2 * std::numbers::pi}, {0, 2 * std::numbers::pi}},
                   {false, false, true, true});
  s.kappa = make_matrix(s.Q, 4, 4, [m, I, J](const auto& q) {
    using T = scalar_t<decltype(q)>;
    Vec<T> d(4);
    d << T(m), T(m), T(I), T(J);
    return Mat<T>(d.asDiagonal());
  });
  s.potential = zero_potential(s.Q);
  for (int c = 0; c < 2; ++c)
    s.constraint_forms.push_back(make_form(s.Q, 1, [R, c](const auto& q) {
      using T = scalar_t<decltype(q)>;
      using std::cos;
      using std::sin;
      Alt<T> a(4, 1);
      a.c[c] = T(1);
      a.c[2] = c == 0 ? T(-R * cos(q[3])) : T(-R * sin(q[3]));
      return a;
    }));
  s.frame_D.push_back(make_vector(s.Q, [R](const auto& q) {
    using T = scalar_t<decltype(q)>;
    using std::cos;
    using std::sin;
    Vec<T> v(4);
    v << R * cos(q[3]), R * sin(q[3]), T(1), T(0);
    return v;
  }));
  s.frame_D.push_back(coordinate_vector(s.Q, 3));
  s.frame_W = {coordinate_vector(s.Q, 0), coordinate_vector(s.Q, 1)};
  finish(b);
  const ConstrainedPhase& ph = b.phase;
  b.lie.dim_g = 3;
  b.lie.structure_constants = abelian_constants(3);
  b.lie.generators_Q = {coordinate_vector(ph.Q, 0), coordinate_vector(ph.Q, 1), coordinate_vector(ph.Q, 2)};
  b.lie.g_W_basis = {0, 1};
  b.basic_gauge = true;

  const std::vector<std::string> pn = {"pt_phi", "pt_psi"};
  b.quotient = frame_quotient(ph, {3}, pn, {-3, 3});
  b.quotient0 = frame_quotient(b.phase0, {3}, pn, {-3, 3});
  const SmoothMap disp = frame_momentum_display(ph, pn);
  const SmoothMap disp0 = frame_momentum_display(b.phase0, pn);
  const ChartPtr dc = disp.target(), dc0 = disp0.target();
  const ChartPtr base = b.quotient.base, base0 = b.quotient0.base;
  const double c = m * R / (m * R * R + I);

  b.expected.push_back(expect_form("jk", Origin::Literature, Target::JK, disp, zero_form(dc, 2)));
  b.expected.push_back(expect_scalar("momentum_x", Origin::Literature, Target::Momentum, disp,
                                     make_scalar(dc, [c](const auto& w) {
                                       using std::cos;
                                       return c * cos(w[3]) * w[4];
                                     }),
                                     unit_vector(3, 0)));
  b.expected.push_back(expect_scalar("momentum_y", Origin::Derived, Target::Momentum, disp,
                                     make_scalar(dc, [c](const auto& w) {
                                       using std::sin;
                                       return c * sin(w[3]) * w[4];
                                     }),
                                     unit_vector(3, 1)));
  const double cphi = I / (m * R * R + I);
  b.expected.push_back(expect_scalar("momentum_phi", Origin::Derived, Target::Momentum, disp,
                                     make_scalar(dc, [cphi](const auto& w) { return cphi * w[4]; }), unit_vector(3, 2)));
  const auto dpsi_dptpsi = [](ChartPtr c3) {
    return make_multivector(c3, 2, [](const auto& r) {
      using T = scalar_t<decltype(r)>;
      Alt<T> p(3, 2);
      p.set({0, 2}, T(1));
      return p;
    });
  };
  b.expected.push_back(expect_bivector("pi_nh_red", Origin::Literature, Target::PiNhRed, identity_map(base), dpsi_dptpsi(base)));
  b.expected.push_back(expect_bivector("Lambda", Origin::Literature, Target::Lambda, identity_map(base), dpsi_dptpsi(base)));
  b.expected.push_back(expect_bivector("Lambda0", Origin::Literature, Target::Lambda0, identity_map(base0), dpsi_dptpsi(base0)));
  b.expected.push_back(expect_form("Omega_W0", Origin::Literature, Target::OmegaW0, disp0, make_form(dc0, 2, [](const auto& w) {
                                     using T = scalar_t<decltype(w)>;
                                     Alt<T> o(6, 2);
                                     o.set({3, 5}, T(1));
                                     o.set({2, 4}, T(1));
                                     return o;
                                   })));
  ExpectedField psi = expect("Psi", Origin::Literature, Target::Psi, disp);
  psi.display_target = disp0;
  psi.map = make_map(dc, dc0, [](const auto& w) { return w; });
  b.expected.push_back(psi);
  b.expected.push_back(expect_scalar("casimir_Lambda", Origin::Literature, Target::CasimirLambda, identity_map(base),
                                     make_scalar(base, [](const auto& r) { return r[1]; })));
  b.expected.push_back(expect_scalar("casimir_Lambda0", Origin::Literature, Target::CasimirLambda0, identity_map(base0),
                                     make_scalar(base0, [](const auto& r) { return r[1]; })));
  b.expected.push_back(expect_scalar("nh_momentum", Origin::Literature, Target::NhMomentum, disp,
                                     make_scalar(dc, [](const auto& w) { return w[4]; }), unit_vector(3, 2)));
  const ScalarField p_phi = make_scalar(dc, [cphi](const auto& w) { return cphi * w[4]; });
  b.expected.push_back(expect_scalar("conserved_p_phi", Origin::Literature, Target::Conserved, disp, p_phi));
  b.monitors.push_back({"pt_phi", pullback(disp, make_scalar(dc, [](const auto& w) { return w[4]; }))});
  b.monitors.push_back({"p_phi", pullback(disp, p_phi)});
  b.x0 = Vec<double>(6);
  b.x0 << 0.0, 0.0, 0.0, 0.3, 1.0, 0.5;
  return b;
}

// ---------------------------------------------------------------------------
// Snakeboard, Q = (x, y, θ, φ, ψ)

ExampleBundle make_snakeboard(const ParameterMap& given) {
  ExampleBundle b;
  b.name = "snakeboard";
  b.parameters = resolve("snakeboard", {{"m", 1.0}, {"r", 1.0}, {"J", 0.5}, {"J1", 1.0}}, given);
  const double m = value(b.parameters, "m"), r = value(b.parameters, "r"), J = value(b.parameters, "J"),
               J1 = value(b.parameters, "J1");
  // The θψ block [[m r², J], [J, J]] is positive definite iff J < m r².
  if (!(J < m * r * r))
    throw std::domain_error("snakeboard: J = " + std::to_string(J) + " must be below m r² = " + std::to_string(m * r * r));
  constexpr double kPhiMargin = 0.3;
  MechanicalSystem& s = b.system;
  s.name = "snakeboard";
  const double tau = 2 * std::numbers::pi;
  s.Q = make_chart("snakeboard", {"x", "y", "theta", "phi", "psi"},
                   {{-2, 2}, {-2, 2}, {0, tau}, {kPhiMargin, std::numbers::pi - kPhiMargin}, {0, tau}},
                   {false, false, true, false, true});
  s.kappa = make_matrix(s.Q, 5, 5, [m, r, J, J1](const auto& q) {
    using T = scalar_t<decltype(q)>;
    Mat<T> k = Mat<T>::Zero(5, 5);
    k(0, 0) = T(m);
    k(1, 1) = T(m);
    k(2, 2) = T(m * r * r);
    k(3, 3) = T(2 * J1);
    k(4, 4) = T(J);
    k(2, 4) = T(J);
    k(4, 2) = T(J);
    return k;
  });
  s.potential = zero_potential(s.Q);
  for (int c = 0; c < 2; ++c)
    s.constraint_forms.push_back(make_form(s.Q, 1, [r, c](const auto& q) {
      using T = scalar_t<decltype(q)>;
      using std::cos;
      using std::sin;
      using std::tan;
      Alt<T> a(5, 1);
      a.c[c] = T(1);
      const T cot = 1.0 / tan(q[3]);
      a.c[2] = r * cot * (c == 0 ? cos(q[2]) : sin(q[2]));
      return a;
    }));
  s.frame_D.push_back(make_vector(s.Q, [r](const auto& q) {
    using T = scalar_t<decltype(q)>;
    using std::cos;
    using std::sin;
    using std::tan;
    const T cot = 1.0 / tan(q[3]);
    Vec<T> v(5);
    v << -r * cos(q[2]) * cot, -r * sin(q[2]) * cot, T(1), T(0), T(0);
    return v;
  }));
  s.frame_D.push_back(coordinate_vector(s.Q, 3));
  s.frame_D.push_back(coordinate_vector(s.Q, 4));
  s.frame_W = {coordinate_vector(s.Q, 0), coordinate_vector(s.Q, 1)};
  finish(b);
  const ConstrainedPhase& ph = b.phase;
  b.lie.dim_g = 3;
  b.lie.structure_constants = abelian_constants(3);
  b.lie.generators_Q = {coordinate_vector(ph.Q, 0), coordinate_vector(ph.Q, 1), coordinate_vector(ph.Q, 4)};
  b.lie.g_W_basis = {0, 1};
  b.basic_gauge = true;

  const std::vector<std::string> pn = {"pt_theta", "pt_phi", "pt_psi"};
  b.quotient = frame_quotient(ph, {2, 3}, pn, {-2, 2});
  b.quotient0 = frame_quotient(b.phase0, {2, 3}, pn, {-2, 2});
  const SmoothMap disp = frame_momentum_display(ph, pn);
  const SmoothMap disp0 = frame_momentum_display(b.phase0, pn);
  const ChartPtr dc = disp.target(), dc0 = disp0.target();
  const ChartPtr base = b.quotient.base, base0 = b.quotient0.base;

  // Coefficient of dθ∧dφ in ⟨𝒥,𝒦_W⟩ in terms of (φ, p̃_θ − p̃_ψ).
  const auto jk_coeff = [m, r, J](const auto& phi, const auto& dp) {
    using std::sin;
    using std::tan;
    const auto s2 = sin(phi) * sin(phi);
    return -(m * r * r / tan(phi)) / (m * r * r - J * s2) * dp;
  };
  b.expected.push_back(expect_form("jk", Origin::Literature, Target::JK, disp, make_form(dc, 2, [jk_coeff](const auto& w) {
                                     using T = scalar_t<decltype(w)>;
                                     Alt<T> o(8, 2);
                                     o.set({2, 3}, T(jk_coeff(w[3], w[5] - w[7])));
                                     return o;
                                   })));
  for (int c = 0; c < 2; ++c)
    b.expected.push_back(expect_scalar(c == 0 ? "momentum_x" : "momentum_y", Origin::Literature, Target::Momentum, disp,
                                       make_scalar(dc,
                                                   [m, r, J, c](const auto& w) {
                                                     using std::cos;
                                                     using std::sin;
                                                     using std::tan;
                                                     const auto s2 = sin(w[3]) * sin(w[3]);
                                                     const auto trig = c == 0 ? cos(w[2]) : sin(w[2]);
                                                     return -m * r * trig * s2 / tan(w[3]) / (m * r * r - J * s2) *
                                                            (w[5] - w[7]);
                                                   }),
                                       unit_vector(3, c)));
  b.expected.push_back(expect_scalar("momentum_psi", Origin::Literature, Target::Momentum, disp,
                                     make_scalar(dc, [](const auto& w) { return w[7]; }), unit_vector(3, 2)));
  const auto lambda0 = [](ChartPtr c5) {
    return make_multivector(c5, 2, [](const auto& r5) {
      using T = scalar_t<decltype(r5)>;
      Alt<T> p(5, 2);
      p.set({0, 2}, T(1));
      p.set({1, 3}, T(1));
      return p;
    });
  };
  b.expected.push_back(expect_bivector("Lambda", Origin::Derived, Target::Lambda, identity_map(base), lambda0(base)));
  b.expected.push_back(expect_bivector("Lambda0", Origin::Literature, Target::Lambda0, identity_map(base0), lambda0(base0)));
  b.expected.push_back(expect_form("Omega_W0", Origin::Literature, Target::OmegaW0, disp0, make_form(dc0, 2, [](const auto& w) {
                                     using T = scalar_t<decltype(w)>;
                                     Alt<T> o(8, 2);
                                     o.set({2, 5}, T(1));
                                     o.set({3, 6}, T(1));
                                     o.set({4, 7}, T(1));
                                     return o;
                                   })));
  ExpectedField psi = expect("Psi", Origin::Derived, Target::Psi, disp);
  psi.display_target = disp0;
  psi.map = make_map(dc, dc0, [](const auto& w) { return w; });
  b.expected.push_back(psi);
  b.expected.push_back(expect_scalar("casimir_Lambda", Origin::Literature, Target::CasimirLambda, identity_map(base),
                                     make_scalar(base, [](const auto& r5) { return r5[4]; })));
  b.expected.push_back(expect_scalar("casimir_Lambda0", Origin::Literature, Target::CasimirLambda0, identity_map(base0),
                                     make_scalar(base0, [](const auto& r5) { return r5[4]; })));
  const ScalarField pt_psi = make_scalar(dc, [](const auto& w) { return w[7]; });
  b.expected.push_back(expect_scalar("nh_momentum", Origin::Literature, Target::NhMomentum, disp, pt_psi, unit_vector(3, 2)));
  b.expected.push_back(expect_scalar("conserved_pt_psi", Origin::Literature, Target::Conserved, disp, pt_psi));
  b.expected.push_back(expect_form("reduced_gauge", Origin::Literature, Target::ReducedGauge, identity_map(base),
                                   make_form(base, 2, [jk_coeff](const auto& r5) {
                                     using T = scalar_t<decltype(r5)>;
                                     Alt<T> o(5, 2);
                                     o.set({0, 1}, T(jk_coeff(r5[1], r5[2] - r5[4])));
                                     return o;
                                   })));
  b.monitors.push_back({"pt_psi", pullback(disp, pt_psi)});
  b.x0 = Vec<double>(8);
  b.x0 << 0.0, 0.0, 0.2, 1.0, 0.1, 0.5, 0.3, 0.4;
  return b;
}

// ---------------------------------------------------------------------------
// Ball with constraint ẋ = r A ω on Q = SO(3) × ℝ³, z-y-z Euler angles.

Mat<double> ball_matrix(int rank) {
  Mat<double> a = Mat<double>::Zero(3, 3);
  if (rank == 1) a(2, 2) = 1.0;
  if (rank >= 2) {
    a(0, 1) = 1.0;
    a(1, 0) = -1.0;
  }
  if (rank == 3) a(2, 2) = 1.0;
  return a;
}

// (𝕀 + m r² (Ag)ᵀ(Ag))⁻¹ K
template <class T>
Vec<T> body_velocity(const Mat<double>& A, const Vec<double>& inertia, double m, double r, const Mat<T>& g,
                     const Vec<T>& K) {
  const Mat<T> ag = A.cast<T>() * g;
  Mat<T> k = T(m * r * r) * Mat<T>(ag.transpose() * ag);
  for (int i = 0; i < 3; ++i) k(i, i) += inertia[i];
  return LU<T>(k).solve(K);
}

// gᵀAᵀAg written in γ for the four admissible matrices.
template <class T>
Mat<T> ata_in_gamma(int rank, const Vec<T>& gamma) {
  const Mat<T> gg = gamma * gamma.transpose();
  switch (rank) {
    case 1: return gg;
    case 2: return Mat<T>(Mat<T>::Identity(3, 3) - gg);
    case 3: return Mat<T>::Identity(3, 3);
    default: return Mat<T>::Zero(3, 3);
  }
}

ExampleBundle make_ball(int rank, const ParameterMap& given) {
  ExampleBundle b;
  b.name = "ball_rank" + std::to_string(rank);
  b.parameters = resolve(b.name, {{"m", 1.0}, {"r", 1.0}, {"I1", 1.0}, {"I2", 2.0}, {"I3", 3.0}}, given);
  const double m = value(b.parameters, "m"), r = value(b.parameters, "r");
  Vec<double> inertia(3);
  inertia << value(b.parameters, "I1"), value(b.parameters, "I2"), value(b.parameters, "I3");
  const Mat<double> A = ball_matrix(rank);

  // θ stays away from the Euler-angle singularities θ ∈ {0, π}.
  constexpr double kThetaMargin = 0.3;
  const double tau = 2 * std::numbers::pi;
  MechanicalSystem& s = b.system;
  s.name = b.name;
  s.Q = make_chart(b.name, {"phi", "theta", "psi", "x1", "x2", "x3"},
                   {{0, tau}, {kThetaMargin, std::numbers::pi - kThetaMargin}, {0, tau}, {-2, 2}, {-2, 2}, {-2, 2}},
                   {true, false, true, false, false, false});
  s.kappa = make_matrix(s.Q, 6, 6, [inertia, m](const auto& q) {
    using T = scalar_t<decltype(q)>;
    const Mat<T> e = euler_matrix(q[1], q[2]);
    Mat<T> k = Mat<T>::Zero(6, 6);
    k.topLeftCorner(3, 3) = e.transpose() * inertia.cast<T>().asDiagonal() * e;
    for (int i = 3; i < 6; ++i) k(i, i) = T(m);
    return k;
  });
  s.potential = zero_potential(s.Q);
  // ε = dx − r A g λ
  for (int c = 0; c < 3; ++c)
    s.constraint_forms.push_back(make_form(s.Q, 1, [A, r, c](const auto& q) {
      using T = scalar_t<decltype(q)>;
      const Mat<T> row = T(-r) * (A.cast<T>() * attitude(q[0], q[1], q[2]) * euler_matrix(q[1], q[2]));
      Alt<T> a(6, 1);
      a.c.head(3) = row.row(c).transpose();
      a.c[3 + c] = T(1);
      return a;
    }));
  // X^left_j + r A g e_j ∂x
  for (int j = 0; j < 3; ++j)
    s.frame_D.push_back(make_vector(s.Q, [A, r, j](const auto& q) {
      using T = scalar_t<decltype(q)>;
      const Mat<T> e = euler_matrix(q[1], q[2]);
      Vec<T> ej = Vec<T>::Zero(3);
      ej[j] = T(1);
      Vec<T> v(6);
      v.head(3) = LU<T>(e).solve(ej);
      v.tail(3) = T(r) * (A.cast<T>() * attitude(q[0], q[1], q[2])).col(j);
      return v;
    }));
  s.frame_W = {coordinate_vector(s.Q, 3), coordinate_vector(s.Q, 4), coordinate_vector(s.Q, 5)};
  s.momentum_box = {-1.5, 1.5};
  finish(b);
  const ConstrainedPhase& ph = b.phase;

  // G = {(h, a) : h e₃ = e₃} acting by (hg, hx + a); e₀ rotates about e₃.
  b.lie.dim_g = 4;
  b.lie.structure_constants.assign(4, Mat<double>::Zero(4, 4));
  b.lie.structure_constants[2](0, 1) = 1.0;
  b.lie.structure_constants[2](1, 0) = -1.0;
  b.lie.structure_constants[1](0, 2) = -1.0;
  b.lie.structure_constants[1](2, 0) = 1.0;
  b.lie.generators_Q = {make_vector(ph.Q,
                                    [](const auto& q) {
                                      using T = scalar_t<decltype(q)>;
                                      Vec<T> v = Vec<T>::Zero(6);
                                      v[0] = T(1);
                                      v[3] = -q[4];
                                      v[4] = q[3];
                                      return v;
                                    }),
                        coordinate_vector(ph.Q, 3), coordinate_vector(ph.Q, 4), coordinate_vector(ph.Q, 5)};
  b.lie.g_W_basis = {1, 2, 3};

  const std::vector<std::string> pn = {"K1", "K2", "K3"};
  b.quotient = frame_quotient(ph, {1, 2}, pn, {-2, 2});
  b.quotient0 = frame_quotient(b.phase0, {1, 2}, pn, {-2, 2});
  const SmoothMap disp = frame_momentum_display(ph, pn);
  const SmoothMap disp0 = frame_momentum_display(b.phase0, pn);
  const ChartPtr dc = disp.target(), dc0 = disp0.target();

  // (θ, ψ, K) ↦ (γ, K) ∈ ℝ⁶.
  const auto ambient_of = [](const QuotientChart& q, const std::string& tag) {
    const ChartPtr amb = make_chart(q.base->name + "/" + tag, {"g1", "g2", "g3", "K1", "K2", "K3"},
                                      {{-1, 1}, {-1, 1}, {-1, 1}, {-4, 4}, {-4, 4}, {-4, 4}});
    return make_map(q.base, amb, [](const auto& x) {
      using T = scalar_t<decltype(x)>;
      Vec<T> out(6);
      out.head(3) = gamma_of(x[0], x[1]);
      out.tail(3) = x.tail(3);
      return out;
    });
  };
  const SmoothMap amb = ambient_of(b.quotient, "ambient"), amb0 = ambient_of(b.quotient0, "ambient");
  const ChartPtr ac = amb.target(), ac0 = amb0.target();

  // Ω on the (q, K) display chart.
  const auto omega_at = [A, inertia, m, r](const auto& w) {
    using T = scalar_t<decltype(w)>;
    const Vec<T> K = w.tail(3);
    return body_velocity<T>(A, inertia, m, r, attitude(w[0], w[1], w[2]), K);
  };

  b.expected.push_back(expect_form("jk", Origin::Derived, Target::JK, disp, make_form(dc, 2, [A, m, r, omega_at](const auto& w) {
                                     using T = scalar_t<decltype(w)>;
                                     const Mat<T> ag = A.cast<T>() * attitude(w[0], w[1], w[2]);
                                     const Vec<T> v = T(-(m * r * r)) * (ag.transpose() * (ag * omega_at(w)));
                                     return cross_form<T>(v, euler_matrix(w[1], w[2]), 9, 0);
                                   })));
  for (int i = 0; i < 3; ++i)
    b.expected.push_back(expect_scalar("momentum_eta" + std::to_string(i + 1), Origin::Literature, Target::Momentum, disp,
                                       make_scalar(dc,
                                                   [A, m, r, i, omega_at](const auto& w) {
                                                     using T = scalar_t<decltype(w)>;
                                                     const Vec<T> ago = A.cast<T>() * attitude(w[0], w[1], w[2]) * omega_at(w);
                                                     return T(m * r * ago[i]);
                                                   }),
                                       unit_vector(4, i + 1)));
  // {K_i,K_j} = −ε_ijl K_l, {γ_i,K_j} = −ε_ijl γ_l, {γ_i,γ_j} = 0
  const auto lie_poisson = [](ChartPtr c6) {
    return make_multivector(c6, 2, [](const auto& x) {
      using T = scalar_t<decltype(x)>;
      Alt<T> p(6, 2);
      for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3, l = (i + 2) % 3;
        p.set({3 + i, 3 + j}, -x[3 + l]);
        p.set({i, 3 + j}, -x[l]);
        p.set({j, 3 + i}, x[l]);
      }
      return p;
    });
  };
  b.expected.push_back(expect_bivector("Lambda", Origin::Literature, Target::Lambda, amb, lie_poisson(ac)));
  b.expected.push_back(expect_bivector("Lambda0", Origin::Literature, Target::Lambda0, amb0, lie_poisson(ac0)));
  // λ_i∧dK_i − K·dλ with dλ = −(λ₂∧λ₃, λ₃∧λ₁, λ₁∧λ₂)
  b.expected.push_back(expect_form("Omega_W0", Origin::Literature, Target::OmegaW0, disp0, make_form(dc0, 2, [](const auto& w) {
                                     using T = scalar_t<decltype(w)>;
                                     const Mat<T> e = euler_matrix(w[1], w[2]);
                                     Alt<T> o = cross_form<T>(Vec<T>(w.tail(3)), e, 9, 0);
                                     for (int i = 0; i < 3; ++i) {
                                       Alt<T> lam(9, 1), dk(9, 1);
                                       lam.c.head(3) = e.row(i).transpose();
                                       dk.c[6 + i] = T(1);
                                       o = o + wedge(lam, dk);
                                     }
                                     return o;
                                   })));
  ExpectedField psi = expect("Psi", Origin::Literature, Target::Psi, disp);
  psi.display_target = disp0;
  psi.map = make_map(dc, dc0, [](const auto& w) { return w; });
  b.expected.push_back(psi);
  const auto k_dot_gamma = [](ChartPtr c6) {
    return make_scalar(c6, [](const auto& x) { return x[0] * x[3] + x[1] * x[4] + x[2] * x[5]; });
  };
  b.expected.push_back(expect_scalar("casimir_Lambda", Origin::Literature, Target::CasimirLambda, amb, k_dot_gamma(ac)));
  b.expected.push_back(expect_scalar("casimir_Lambda0", Origin::Literature, Target::CasimirLambda0, amb0, k_dot_gamma(ac0)));
  const ScalarField kg = make_scalar(dc, [](const auto& w) {
    using T = scalar_t<decltype(w)>;
    const Vec<T> g = gamma_of(w[1], w[2]);
    return T(g.dot(Vec<T>(w.tail(3))));
  });
  b.expected.push_back(expect_scalar("nh_momentum", Origin::Literature, Target::NhMomentum, disp, kg, unit_vector(4, 0)));
  b.expected.push_back(expect_scalar("conserved_K_gamma", Origin::Literature, Target::Conserved, disp, kg));

  // Ω = (𝕀 + m r² gᵀAᵀAg)⁻¹ K in ambient coordinates.
  const auto omega_ambient = [rank, inertia, m, r](const auto& x) {
    using T = scalar_t<decltype(x)>;
    const Vec<T> g = x.head(3);
    Mat<T> k = T(m * r * r) * ata_in_gamma<T>(rank, g);
    for (int i = 0; i < 3; ++i) k(i, i) += inertia[i];
    return Vec<T>(LU<T>(k).solve(Vec<T>(x.tail(3))));
  };
  ExpectedField red = expect("reduced_nh", Origin::Literature, Target::ReducedNh, amb);
  red.vector = make_vector(ac, [omega_ambient](const auto& x) {
    using T = scalar_t<decltype(x)>;
    const Eigen::Matrix<T, 3, 1> g = x.head(3), K = x.tail(3), w = omega_ambient(x);
    Vec<T> out(6);
    out.head(3) = g.cross(w);
    out.tail(3) = K.cross(w);
    return out;
  });
  b.expected.push_back(red);

  // ℬ: rank 1 has B = 0 and ℬ = ⟨𝒥,𝒦_W⟩_red = −r²m⟨γ,Ω⟩ γ·dγ×dγ; rank 2 has
  // ℬ = r²m⟨γ,Ω⟩ γ·dγ×dγ; ranks 0 and 3 have ℬ = 0. The overall sign follows
  // 𝒦_W(X,Y) = −A_W([X,Y]) and dλ = −λ×λ.
  const double bsign = rank == 1 ? -1.0 : (rank == 2 ? 1.0 : 0.0);
  b.expected.push_back(expect_form("reduced_gauge", Origin::Derived, Target::ReducedGauge, amb,
                                   make_form(ac, 2, [bsign, m, r, omega_ambient](const auto& x) {
                                     using T = scalar_t<decltype(x)>;
                                     const Vec<T> g = x.head(3);
                                     const T c = bsign * m * r * r * g.dot(omega_ambient(x));
                                     return cross_form<T>(Vec<T>(c * g), Mat<T>::Identity(3, 3), 6, 0);
                                   })));

  if (rank >= 2) {
    // B = r²m ⟨Ω, λ×λ⟩ with Ω = λ(Tτ X p).
    const MechanicalSystem sys = b.system;
    b.gauge = make_form(ph.M, 2, [sys, m, r](const auto& x) {
      using T = scalar_t<decltype(x)>;
      const Vec<T> q = x.head(6), p = x.tail(3);
      const auto fd = frame_data(sys, q);
      const Mat<T> e = euler_matrix(q[1], q[2]);
      const Vec<T> omega = e * (fd.X.topRows(3) * p);
      return cross_form<T>(Vec<T>(T(m * r * r) * omega), e, 9, 0);
    });
  }
  b.basic_gauge = true;
  b.monitors.push_back({"K_dot_gamma", pullback(disp, kg)});
  b.x0 = Vec<double>(9);
  b.x0 << 0.2, 1.1, 0.7, 0.1, -0.2, 0.3, 0.5, -0.3, 0.8;
  if (rank == 2) b.witness_point = b.x0;
  return b;
}

}  // namespace

SmoothMap frame_momentum_display(const ConstrainedPhase& ph, const std::vector<std::string>& momentum_names) {
  if (static_cast<int>(momentum_names.size()) != ph.r)
    throw std::invalid_argument("frame_momentum_display: expected " + std::to_string(ph.r) + " momentum names");
  const ChartPtr c = with_momenta(ph, ph.M->name + "/frame", momentum_names, iota_indices(ph.N), ph.sys.momentum_box);
  const MechanicalSystem sys = ph.sys;
  const int N = ph.N, r = ph.r;
  return make_map(ph.M, c, [sys, N, r](const auto& x) {
    using T = scalar_t<decltype(x)>;
    const Vec<T> q = x.head(N);
    Vec<T> out = x;
    out.tail(r) = frame_change(sys, q).transpose() * Vec<T>(x.tail(r));
    return out;
  });
}

QuotientChart frame_quotient(const ConstrainedPhase& ph, const std::vector<int>& kept,
                             const std::vector<std::string>& momentum_names, Interval momentum_box) {
  if (static_cast<int>(momentum_names.size()) != ph.r)
    throw std::invalid_argument("frame_quotient: expected " + std::to_string(ph.r) + " momentum names");
  QuotientChart q;
  q.total = ph.M;
  q.base = with_momenta(ph, ph.M->name + "/G", momentum_names, kept, momentum_box);
  const MechanicalSystem sys = ph.sys;
  const int N = ph.N, r = ph.r, nk = static_cast<int>(kept.size());
  q.rho = make_map(q.total, q.base, [sys, N, r, nk, kept](const auto& x) {
    using T = scalar_t<decltype(x)>;
    const Vec<T> qq = x.head(N);
    Vec<T> b(nk + r);
    for (int i = 0; i < nk; ++i) b[i] = x[kept[i]];
    b.tail(r) = frame_change(sys, qq).transpose() * Vec<T>(x.tail(r));
    return b;
  });
  q.sigma = make_map(q.base, q.total, [sys, N, r, nk, kept](const auto& b) {
    using T = scalar_t<decltype(b)>;
    Vec<T> x = Vec<T>::Zero(N + r);
    for (int i = 0; i < nk; ++i) x[kept[i]] = b[i];
    const Vec<T> qq = x.head(N);
    const Mat<T> ut = frame_change(sys, qq).transpose();
    x.tail(r) = LU<T>(ut).solve(Vec<T>(b.tail(r)));
    return x;
  });
  return q;
}

ExampleBundle make_example(const std::string& name, const ParameterMap& params) {
  if (name == "particle" || name == "particle_chaplygin") {
    if (!params.empty()) throw std::invalid_argument(name + ": unknown parameter " + params.begin()->first);
    return name == "particle" ? make_particle() : make_particle_chaplygin();
  }
  if (name == "disk") return make_disk(params);
  if (name == "snakeboard") return make_snakeboard(params);
  for (int rank = 0; rank <= 3; ++rank)
    if (name == "ball_rank" + std::to_string(rank)) return make_ball(rank, params);
  throw std::invalid_argument("unknown example " + name);
}

}  // namespace nonholo
