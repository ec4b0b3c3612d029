#include "nonholo/symmetry.hpp"

#include <algorithm>
#include <sstream>

namespace nonholo {

namespace {

template <class T>
Mat<T> generators_at(const std::vector<VectorField>& gens, int N, const Vec<T>& q) {
  Mat<T> h(N, static_cast<Eigen::Index>(gens.size()));
  for (std::size_t k = 0; k < gens.size(); ++k) h.col(static_cast<Eigen::Index>(k)) = gens[k].vec(q);
  return h;
}

// Lifted generators (η_Q, p_i ↦ P·[η_Q, X_i]) with P = κXp.
template <class T>
Mat<T> eta_m_at(const ConstrainedPhase& ph, const std::vector<VectorField>& gens, const Vec<T>& x) {
  const int N = ph.N, r = ph.r, n = ph.dim();
  const Vec<T> q = x.head(N);
  const Vec<T> p = x.tail(r);
  const Mat<T> xf = ph.frame_X(q);
  const Vec<T> cov = ph.covector_basis(q) * p;
  Mat<T> out = Mat<T>::Zero(n, static_cast<Eigen::Index>(gens.size()));
  for (std::size_t k = 0; k < gens.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    const Vec<T> eta = gens[k].vec(q);
    out.col(kk).head(N) = eta;
    const Vec<T> dx_eta = directional(ph.frame_X.fn(), *ph.Q, q, eta);
    const Mat<T> deta = jacobian(gens[k].fn(), *ph.Q, q);
    for (int i = 0; i < r; ++i) {
      const Vec<T> bracket = Vec<T>(dx_eta.segment(static_cast<Eigen::Index>(i) * N, N)) - deta * xf.col(i);
      out(N + i, kk) = cov.dot(bracket);
    }
  }
  return out;
}

// A_W on Q: dim_g × N, from the split TQ = D ⊕ span{η_Q : η ∈ 𝔤_W}.
template <class T>
Mat<T> a_w_q(const ConstrainedPhase& ph, const LieAlgebraData& lie, const Vec<T>& q) {
  const int N = ph.N, r = ph.r, k = static_cast<int>(lie.g_W_basis.size());
  Mat<T> f(N, N);
  f.leftCols(r) = ph.frame_X(q);
  for (int a = 0; a < k; ++a) f.col(r + a) = lie.generators_Q[lie.g_W_basis[a]].vec(q);
  const Mat<T> coeff = qr_solve<T>(f, Mat<T>::Identity(N, N), "D/W split");
  Mat<T> out = Mat<T>::Zero(lie.dim_g, N);
  for (int a = 0; a < k; ++a) out.row(lie.g_W_basis[a]) = coeff.row(r + a);
  return out;
}

template <class T>
Mat<T> p_c_at(const ConstrainedPhase& ph, const LieAlgebraData& lie, const Vec<T>& x) {
  const int n = ph.dim(), r = ph.r, k = static_cast<int>(lie.g_W_basis.size());
  const Mat<T> c = ph.C_frame(x);
  std::vector<VectorField> gw;
  for (int a : lie.g_W_basis) gw.push_back(lie.generators_Q[a]);
  Mat<T> f(n, n);
  f.leftCols(2 * r) = c;
  f.rightCols(k) = eta_m_at(ph, gw, x);
  const Mat<T> coeff = qr_solve<T>(f, Mat<T>::Identity(n, n), "C/W split");
  return c * coeff.topRows(2 * r);
}

Mat<double> matrix_of(const KForm& w, const Vec<double>& x) { return to_matrix(w(x)); }

}  // namespace

std::vector<Mat<double>> abelian_constants(int dim_g) {
  return std::vector<Mat<double>>(dim_g, Mat<double>::Zero(dim_g, dim_g));
}

LieReport check_lie_data(const ConstrainedPhase& ph, const LieAlgebraData& lie, int samples, std::uint64_t seed) {
  const int N = ph.N, g = lie.dim_g;
  if (static_cast<int>(lie.generators_Q.size()) != g || static_cast<int>(lie.structure_constants.size()) != g)
    throw std::invalid_argument("LieAlgebraData: generator or structure-constant count differs from dim_g");
  LieReport rep;
  rep.min_rank_D_plus_V = N;
  // [e_i, e_j] = c^k_{ij} e_k must stay in 𝔤_W whenever one entry is in 𝔤_W.
  std::vector<bool> in_w(g, false);
  for (int a : lie.g_W_basis) in_w[a] = true;
  for (int i = 0; i < g; ++i)
    for (int a : lie.g_W_basis)
      for (int k = 0; k < g; ++k)
        if (!in_w[k] && std::abs(lie.structure_constants[k](i, a)) > 1e-12) rep.g_W_ideal_closed = false;

  std::vector<std::vector<VectorField>> brackets(g, std::vector<VectorField>(g));
  for (int i = 0; i < g; ++i)
    for (int j = i + 1; j < g; ++j) brackets[i][j] = lie_bracket(lie.generators_Q[i], lie.generators_Q[j]);
  double worst = -1.0;
  for (const auto& q : sample_points(*ph.Q, samples, seed, "lie")) {
    const Mat<double> h = generators_at(lie.generators_Q, N, q);
    double local = 0.0;
    for (int i = 0; i < g; ++i)
      for (int j = i + 1; j < g; ++j) {
        Vec<double> res = brackets[i][j].vec(q);
        for (int k = 0; k < g; ++k) res += lie.structure_constants[k](i, j) * h.col(k);
        local = std::max(local, max_abs_entry(res));
      }
    rep.bracket_residual = std::max(rep.bracket_residual, local);
    Mat<double> hw(N, static_cast<Eigen::Index>(lie.g_W_basis.size()));
    for (std::size_t a = 0; a < lie.g_W_basis.size(); ++a) hw.col(static_cast<Eigen::Index>(a)) = h.col(lie.g_W_basis[a]);
    const Mat<double> wq = ph.frame_Z(q);
    const double span = std::max(span_residual(hw, wq), span_residual(wq, hw));
    rep.w_span_residual = std::max(rep.w_span_residual, span);
    Mat<double> dv(N, ph.r + g);
    dv << ph.frame_X(q), h;
    const int rank = static_cast<int>(numerical_rank(dv));
    rep.min_rank_D_plus_V = std::min(rep.min_rank_D_plus_V, rank);
    const double score = std::max(local, span) + (rank < N ? 1.0 : 0.0);
    if (score > worst) {
      worst = score;
      rep.worst_point = q;
    }
  }
  return rep;
}

SymmetryStructure build_symmetry_structure(const ConstrainedPhase& phase, LieAlgebraData lie, int samples, std::uint64_t seed) {
  const LieReport lr = check_lie_data(phase, lie, samples, seed);
  const std::string where = phase.sys.name + ": ";
  if (lr.bracket_residual > 1e-9)
    throw std::domain_error(where + "generator brackets do not match the structure constants at " + format_point(lr.worst_point));
  if (!lr.g_W_ideal_closed) throw std::domain_error(where + "[g, g_W] is not contained in g_W");
  if (static_cast<int>(lie.g_W_basis.size()) != phase.k || lr.w_span_residual > 1e-9)
    throw std::domain_error(where + "vertical-symmetry condition fails: g_W does not generate W at " +
                            format_point(lr.worst_point));
  if (lr.min_rank_D_plus_V < phase.N)
    throw std::domain_error(where + "dimension assumption fails: rank(D + V) = " + std::to_string(lr.min_rank_D_plus_V) +
                            " < " + std::to_string(phase.N) + " at " + format_point(lr.worst_point));

  SymmetryStructure s;
  const int N = phase.N, r = phase.r, n = phase.dim(), g = lie.dim_g, k = phase.k;
  const ConstrainedPhase ph = phase;
  const auto gens = lie.generators_Q;
  s.eta_M = make_matrix(ph.M, n, g, [ph, gens](const auto& x) { return eta_m_at(ph, gens, x); });
  s.V = s.eta_M;
  lie.generators_M = columns(s.eta_M);
  for (int j = 0; j < g; ++j)
    if (std::find(lie.g_W_basis.begin(), lie.g_W_basis.end(), j) == lie.g_W_basis.end()) s.g_S_complement.push_back(j);

  std::vector<VectorField> gw;
  for (int a : lie.g_W_basis) gw.push_back(gens[a]);
  s.W_frame = make_matrix(ph.M, n, k, [ph, gw](const auto& x) { return eta_m_at(ph, gw, x); });
  s.P_C = make_matrix(ph.M, n, n, [ph, lie](const auto& x) { return p_c_at(ph, lie, x); });
  s.P_W = make_matrix(ph.M, n, n, [ph, lie, n](const auto& x) {
    using T = scalar_t<decltype(x)>;
    return Mat<T>(Mat<T>::Identity(n, n) - p_c_at(ph, lie, x));
  });
  s.A_W_matrix = make_matrix(ph.M, g, n, [ph, lie, N, n, g](const auto& x) {
    using T = scalar_t<decltype(x)>;
    Mat<T> a = Mat<T>::Zero(g, n);
    a.leftCols(N) = a_w_q(ph, lie, Vec<T>(x.head(N)));
    return a;
  });
  s.P_gS = make_matrix(ph.M, g, g, [ph, lie, N, g](const auto& x) {
    using T = scalar_t<decltype(x)>;
    const Vec<T> q = x.head(N);
    return Mat<T>(Mat<T>::Identity(g, g) - a_w_q(ph, lie, q) * generators_at(lie.generators_Q, N, q));
  });
  const MatrixField pgs = s.P_gS;
  const std::vector<int> comp = s.g_S_complement;
  s.S = make_matrix(ph.M, n, g - k, [ph, gens, pgs, comp, n, g, k](const auto& x) {
    using T = scalar_t<decltype(x)>;
    const Mat<T> e = eta_m_at(ph, gens, x);
    const Mat<T> proj = pgs(x);
    Mat<T> out(n, g - k);
    for (int j = 0; j < g - k; ++j) out.col(j) = e * proj.col(comp[j]);
    return out;
  });

  const MatrixField am = s.A_W_matrix, pc = s.P_C;
  for (int c = 0; c < g; ++c) {
    s.A_W.push_back(make_form(ph.M, 1, [am, c, n](const auto& x) {
      using T = scalar_t<decltype(x)>;
      return Alt<T>(n, 1, Vec<T>(am(x).row(c).transpose()));
    }));
    const KForm da = exterior_derivative(s.A_W.back());
    s.K_W.push_back(make_form(ph.M, 2, [da, pc](const auto& x) {
      using T = scalar_t<decltype(x)>;
      const Mat<T> p = pc(x);
      return from_matrix<T>(Mat<T>(p.transpose() * to_matrix(da(x)) * p));
    }));
    const MatrixField basis = ph.covector_basis;
    const VectorField eta = gens[c];
    s.J.push_back(make_scalar(ph.M, [basis, eta, N, r](const auto& x) {
      using T = scalar_t<decltype(x)>;
      const Vec<T> q = x.head(N);
      return T((basis(q) * Vec<T>(x.tail(r))).dot(eta.vec(q)));
    }));
  }
  s.phase = phase;
  s.lie = std::move(lie);
  return s;
}

VectorField generator_of(const SymmetryStructure& s, const Vec<double>& xi) {
  const MatrixField e = s.eta_M;
  return make_vector(s.phase.M, [e, xi](const auto& x) {
    using T = scalar_t<decltype(x)>;
    return Vec<T>(e(x) * xi.cast<T>());
  });
}

TwoForm jk_two_form(const SymmetryStructure& s) {
  TwoForm out = zero_form(s.phase.M, 2);
  for (int c = 0; c < s.dim_g(); ++c) out = out + s.J[c] * s.K_W[c];
  return out;
}

ThreeForm dj_wedge_k(const SymmetryStructure& s) {
  ThreeForm out = zero_form(s.phase.M, 3);
  for (int c = 0; c < s.dim_g(); ++c) out = out + wedge(differential(s.J[c]), s.K_W[c]);
  return out;
}

TriVector psi_trivector(const SymmetryStructure& s, const BiVector& pi_b) {
  const int n = s.phase.dim(), g = s.dim_g();
  const auto kw = s.K_W;
  const MatrixField e = s.eta_M;
  return make_multivector(s.phase.M, 3, [pi_b, kw, e, n, g](const auto& x) {
    using T = scalar_t<decltype(x)>;
    const Mat<T> p = to_matrix(pi_b(x));  // row a is π♯dx^a
    const Mat<T> em = e(x);
    // kv[c] = (𝒦^c(π♯dx^a, π♯dx^b))_{ab}
    std::vector<Mat<T>> kv(g);
    for (int c = 0; c < g; ++c) kv[c] = p * to_matrix(kw[c](x)) * p.transpose();
    auto w = [&](int a, int b, int comp) {
      T acc = T(0);
      for (int c = 0; c < g; ++c) acc += kv[c](a, b) * em(comp, c);
      return acc;
    };
    Alt<T> out(n, 3);
    const IndexTable& t = index_table(n, 3);
    for (int sl = 0; sl < t.size(); ++sl) {
      const int a = t.idx[sl][0], b = t.idx[sl][1], c = t.idx[sl][2];
      out.c[sl] = w(a, b, c) + w(b, c, a) + w(c, a, b);
    }
    return out;
  });
}

std::vector<std::vector<Vec<double>>> bold_k_at(const SymmetryStructure& s, const Vec<double>& x, const Mat<double>& args) {
  const int n = s.phase.dim();
  const Mat<double> pc = s.P_C(x);
  const Mat<double> pw = s.P_W(x);
  const Mat<double> jac = jacobian(s.P_C.fn(), *s.phase.M, x);  // (n·n)×n, column-major entries
  auto dpc_along = [&](const Vec<double>& w) {
    const Vec<double> flat = jac * w;
    return Mat<double>(Eigen::Map<const Mat<double>>(flat.data(), n, n));
  };
  const Eigen::Index m = args.cols();
  std::vector<Mat<double>> d(m);
  for (Eigen::Index a = 0; a < m; ++a) d[a] = dpc_along(pc * args.col(a));
  std::vector<std::vector<Vec<double>>> out(m, std::vector<Vec<double>>(m));
  // [P_C u, P_C v] = D_{P_C u}(P_C) v − D_{P_C v}(P_C) u for constant u, v.
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b)
      out[a][b] = -pw * (d[a] * args.col(b) - d[b] * args.col(a));
  return out;
}

JacobiatorReport verify_jacobiator(const SymmetryStructure& s, const TwoForm& b, int samples, std::uint64_t seed) {
  JacobiatorReport rep;
  const auto pts = sample_points(*s.phase.M, samples, seed, "jacobiator");
  const int n = s.phase.dim(), k = s.phase.k;
  for (const auto& x : pts) {
    const Mat<double> wf = s.W_frame(x);
    const Alt<double> bx = b(x);
    for (int a = 0; a < k; ++a)
      rep.b_section_residual = std::max(rep.b_section_residual, max_abs_entry(interior(Vec<double>(wf.col(a)), bx).c));
  }
  TwoForm bn = b;
  if (rep.b_section_residual > 1e-12) {
    bn = normalize_gauge(b, s.P_C);
    rep.normalized = true;
  }
  const BiVector pi_b = gauge_transform(nh_bivector(s.phase), bn);
  const TriVector jac = jacobiator(pi_b);
  const ThreeForm db = exterior_derivative(bn);
  const ThreeForm djk = dj_wedge_k(s);
  const ThreeForm d_jk = exterior_derivative(jk_two_form(s));
  const TriVector psi = psi_trivector(s, pi_b);
  const IndexTable& t = index_table(n, 3);
  double worst = -1.0;
  for (const auto& x : pts) {
    const Mat<double> p = to_matrix(pi_b(x));
    const Vec<double> lhs = jac(x).c;
    const Vec<double> ps = psi(x).c;
    const Alt<double> dbx = db(x);
    const Vec<double> r_mom = transform(dbx + djk(x), p).c - ps;
    const Vec<double> r_pair = transform(dbx + d_jk(x), p).c - ps;
    // Curvature formula from 𝐊_W, Ω_M and dB on v_a = π_B♯dx^a.
    const Mat<double> v = p.transpose();
    const auto kb = bold_k_at(s, x, v);
    const Mat<double> om = matrix_of(s.phase.Omega_M, x);
    const Vec<double> dbv = transform(dbx, p).c;
    Vec<double> r_curv(t.size());
    auto term = [&](int a, int bb, int c) { return kb[a][bb].dot(om * v.col(c)) - kb[a][bb][c]; };
    for (int sl = 0; sl < t.size(); ++sl) {
      const int a = t.idx[sl][0], bb = t.idx[sl][1], c = t.idx[sl][2];
      r_curv[sl] = term(a, bb, c) + term(bb, c, a) + term(c, a, bb) + dbv[sl];
    }
    const double e_curv = max_abs_entry(Vec<double>(lhs - r_curv));
    const double e_mom = max_abs_entry(Vec<double>(lhs - r_mom));
    const double e_pair = max_abs_entry(Vec<double>(lhs - r_pair));
    rep.curvature_formula = std::max(rep.curvature_formula, e_curv);
    rep.momentum_formula = std::max(rep.momentum_formula, e_mom);
    rep.pairing_formula = std::max(rep.pairing_formula, e_pair);
    rep.jacobiator_max = std::max(rep.jacobiator_max, max_abs_entry(lhs));
    const double score = std::max({e_curv, e_mom, e_pair});
    if (score > worst) {
      worst = score;
      rep.worst_point = x;
    }
  }
  return rep;
}

ScalarField nh_momentum(const SymmetryStructure& s, const Vec<double>& eta) {
  const MatrixField pgs = s.P_gS, basis = s.phase.covector_basis;
  const auto gens = s.lie.generators_Q;
  const int N = s.phase.N, r = s.phase.r;
  return make_scalar(s.phase.M, [pgs, basis, gens, eta, N, r](const auto& x) {
    using T = scalar_t<decltype(x)>;
    const Vec<T> q = x.head(N);
    const Vec<T> xi = pgs(x) * eta.cast<T>();
    return T((basis(q) * Vec<T>(x.tail(r))).dot(generators_at(gens, N, q) * xi));
  });
}

SymmetryReport check_symmetry(const SymmetryStructure& s, int samples, std::uint64_t seed) {
  SymmetryReport rep;
  const ConstrainedPhase& ph = s.phase;
  const int N = ph.N, r = ph.r, n = ph.dim(), g = s.dim_g();
  const auto pts = sample_points(*ph.M, samples, seed, "symmetry");

  const TwoForm jk = jk_two_form(s);
  const ThreeForm d_jk = exterior_derivative(jk);
  const ThreeForm djk = dj_wedge_k(s);
  std::vector<KForm> da, dk, lie_jk;
  std::vector<OneForm> dj;
  for (int c = 0; c < g; ++c) {
    da.push_back(exterior_derivative(s.A_W[c]));
    dk.push_back(exterior_derivative(s.K_W[c]));
    dj.push_back(differential(s.J[c]));
    lie_jk.push_back(lie_derivative(s.lie.generators_M[c], jk));
  }
  std::vector<std::vector<VectorField>> cbr(2 * r, std::vector<VectorField>(2 * r));
  for (int i = 0; i < 2 * r; ++i)
    for (int j = i + 1; j < 2 * r; ++j) cbr[i][j] = lie_bracket(ph.C[i], ph.C[j]);

  double worst = -1.0;
  for (const auto& x : pts) {
    double local = 0.0;
    auto upd = [&](double& field, double v) {
      field = std::max(field, v);
      local = std::max(local, v);
    };
    const Mat<double> cf = ph.C_frame(x);
    const Mat<double> am = s.A_W_matrix(x);
    const Mat<double> em = s.eta_M(x);
    upd(rep.a_on_c, max_abs_entry(Mat<double>(am * cf)));
    const Mat<double> aw = am * s.W_frame(x);
    for (std::size_t a = 0; a < s.lie.g_W_basis.size(); ++a) {
      Vec<double> e = Vec<double>::Zero(g);
      e[s.lie.g_W_basis[a]] = 1.0;
      upd(rep.a_on_w, max_abs_entry(Vec<double>(aw.col(static_cast<Eigen::Index>(a)) - e)));
    }
    std::vector<Mat<double>> km(g), dam(g);
    for (int c = 0; c < g; ++c) {
      km[c] = to_matrix(s.K_W[c](x));
      dam[c] = to_matrix(da[c](x));
    }
    for (int i = 0; i < 2 * r; ++i)
      for (int j = i + 1; j < 2 * r; ++j) {
        const Vec<double> br = cbr[i][j].vec(x);
        const Vec<double> abr = am * br;
        for (int c = 0; c < g; ++c) upd(rep.k_vs_bracket, std::abs(cf.col(i).dot(km[c] * cf.col(j)) + abr[c]));
      }
    // 𝒦_W = dA_W when one argument is in C (vertical symmetry).
    for (int c = 0; c < g; ++c) upd(rep.k_vs_dA, max_abs_entry(Mat<double>(cf.transpose() * (km[c] - dam[c]))));
    // d𝒦_W on C-triples.
    for (int c = 0; c < g; ++c) upd(rep.dk_on_c, max_abs_entry(transform(dk[c](x), Mat<double>(cf.transpose())).c));
    upd(rep.djk_vs_dj_wedge_k, max_abs_entry(Vec<double>(d_jk(x).c - djk(x).c)));

    // Bold 𝐊_W on the coordinate basis.
    const Mat<double> id = Mat<double>::Identity(n, n);
    const auto kb = bold_k_at(s, x, id);
    for (int a = 0; a < n; ++a)
      for (int bb = 0; bb < n; ++bb) {
        Vec<double> kv(g);
        for (int c = 0; c < g; ++c) kv[c] = km[c](a, bb);
        upd(rep.bold_k_vs_generator, max_abs_entry(Vec<double>(kb[a][bb] - em * kv)));
        if (a >= N) upd(rep.bold_k_semibasic, max_abs_entry(kb[a][bb]));
      }
    const Alt<double> jkx = jk(x);
    for (int i = 0; i < r; ++i) upd(rep.jk_semibasic, max_abs_entry(interior(Vec<double>(id.col(N + i)), jkx).c));
    for (int c = 0; c < g; ++c) upd(rep.jk_invariance, max_abs_entry(lie_jk[c](x).c));

    // i_{η_M} Ω_M = ⟨d𝒥, η⟩ for a point-dependent η.
    Vec<double> eta(g);
    for (int c = 0; c < g; ++c) eta[c] = std::sin(1.0 + c + x.sum()) + 0.3 * x[c % n];
    const Vec<double> lhs = interior(Vec<double>(em * eta), ph.Omega_M(x)).c;
    Vec<double> rhs = Vec<double>::Zero(n);
    for (int c = 0; c < g; ++c) rhs += eta[c] * dj[c](x).c;
    upd(rep.hamiltonian_generator, max_abs_entry(Vec<double>(lhs - rhs)));

    Vec<double> jv(g);
    for (int c = 0; c < g; ++c) jv[c] = s.J[c](x);
    for (int i = 0; i < g; ++i)
      for (int j = 0; j < g; ++j) {
        double v = dj[j](x).c.dot(em.col(i));
        for (int c = 0; c < g; ++c) v += s.lie.structure_constants[c](i, j) * jv[c];
        upd(rep.momentum_equivariance, std::abs(v));
      }
    upd(rep.s_in_c, span_residual(cf, s.S(x)));
    if (local > worst) {
      worst = local;
      rep.worst_point = x;
    }
  }
  return rep;
}

}  // namespace nonholo
