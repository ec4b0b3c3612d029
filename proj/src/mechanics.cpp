#include "nonholo/mechanics.hpp"

#include <sstream>

#include <Eigen/Eigenvalues>

#include "nonholo/sampling.hpp"

namespace nonholo {

namespace {

template <class T>
Mat<T> frame_matrix(const std::vector<VectorField>& fields, int n, const Vec<T>& q) {
  Mat<T> m(n, static_cast<Eigen::Index>(fields.size()));
  for (std::size_t i = 0; i < fields.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = fields[i].vec(q);
  return m;
}

template <class T>
T kdot(const Vec<T>& a, const Mat<T>& kappa, const Vec<T>& b) {
  return a.dot(kappa * b);
}

}  // namespace

template <class T>
FrameData<T> frame_data(const MechanicalSystem& sys, const Vec<T>& q) {
  using std::sqrt;
  const int n = sys.Q->dim;
  FrameData<T> fd;
  fd.kappa = sys.kappa(q);
  fd.X = frame_matrix(sys.frame_D, n, q);
  for (Eigen::Index i = 0; i < fd.X.cols(); ++i) {
    Vec<T> v = fd.X.col(i);
    for (Eigen::Index j = 0; j < i; ++j) {
      const Vec<T> u = fd.X.col(j);
      v -= kdot<T>(u, fd.kappa, v) * u;
    }
    const T nrm = sqrt(kdot<T>(v, fd.kappa, v));
    fd.X.col(i) = v / nrm;
  }
  fd.Z = frame_matrix(sys.frame_W, n, q);
  Mat<T> f(n, n);
  f << fd.X, fd.Z;
  fd.coframe = qr_solve<T>(f, Mat<T>::Identity(n, n), "frame inversion");
  return fd;
}
template FrameData<S0> frame_data(const MechanicalSystem&, const Vec<S0>&);
template FrameData<S1> frame_data(const MechanicalSystem&, const Vec<S1>&);
template FrameData<S2> frame_data(const MechanicalSystem&, const Vec<S2>&);

void validate_system(const MechanicalSystem& sys, int samples, std::uint64_t seed) {
  const int n = sys.Q->dim;
  const int r = static_cast<int>(sys.frame_D.size());
  const int k = static_cast<int>(sys.frame_W.size());
  if (r + k != n)
    throw std::domain_error(sys.name + ": frame_D and frame_W do not add up to dim Q");
  if (static_cast<int>(sys.constraint_forms.size()) != k)
    throw std::domain_error(sys.name + ": constraint rank differs from the complement rank");
  SplitMix64 rng(stream_seed(seed, sys.name + "/validate"));
  for (int s = 0; s < samples; ++s) {
    const Vec<double> q = sys.Q->sample(rng);
    const Mat<double> kappa = sys.kappa(q);
    Eigen::SelfAdjointEigenSolver<Mat<double>> eig(kappa);
    if (eig.eigenvalues().minCoeff() <= 1e-10)
      throw std::domain_error(sys.name + ": kinetic metric not positive definite at " + format_point(q));
    const Mat<double> xp = frame_matrix(sys.frame_D, n, q);
    for (const auto& eps : sys.constraint_forms) {
      const Vec<double> e = eps(q).c;
      if ((xp.transpose() * e).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, e.cwiseAbs().maxCoeff()))
        throw std::domain_error(sys.name + ": frame_D not annihilated by the constraints at " + format_point(q));
    }
    Mat<double> f(n, n);
    f << xp, frame_matrix(sys.frame_W, n, q);
    Eigen::JacobiSVD<Mat<double>> svd(f);
    const auto& sv = svd.singularValues();
    if (sv[n - 1] <= 0.0 || sv[0] / sv[n - 1] > 1e8)
      throw std::domain_error(sys.name + ": D-frame and W-frame are not independent at " + format_point(q));
  }
}

ConstrainedPhase build_constrained_phase(const MechanicalSystem& sys) {
  validate_system(sys);
  ConstrainedPhase ph;
  ph.sys = sys;
  ph.Q = sys.Q;
  const int N = ph.N = sys.Q->dim;
  const int r = ph.r = static_cast<int>(sys.frame_D.size());
  const int k = ph.k = static_cast<int>(sys.frame_W.size());
  const int n = N + r;

  std::vector<std::string> names = sys.Q->coord_names;
  std::vector<Interval> box = sys.Q->sample_box;
  std::vector<bool> periodic = sys.Q->periodic;
  for (int i = 0; i < r; ++i) {
    names.push_back(i < static_cast<int>(sys.momentum_names.size()) ? sys.momentum_names[i] : "p" + std::to_string(i + 1));
    box.push_back(sys.momentum_box);
    periodic.push_back(false);
  }
  ph.M = make_chart(sys.name + "/M", names, box, periodic);

  std::vector<std::string> tq_names = sys.Q->coord_names;
  std::vector<Interval> tq_box = sys.Q->sample_box;
  std::vector<bool> tq_periodic = sys.Q->periodic;
  for (int i = 0; i < N; ++i) {
    tq_names.push_back("P_" + sys.Q->coord_names[i]);
    tq_box.push_back({-10.0, 10.0});
    tq_periodic.push_back(false);
  }
  ph.TQ = make_chart(sys.name + "/TQ", tq_names, tq_box, tq_periodic);

  const MechanicalSystem s = sys;
  ph.frame_X = make_matrix(sys.Q, N, r, [s](const auto& q) { return frame_data(s, q).X; });
  ph.frame_Z = make_matrix(sys.Q, N, k, [s](const auto& q) { return frame_data(s, q).Z; });
  ph.coframe = make_matrix(sys.Q, N, N, [s](const auto& q) { return frame_data(s, q).coframe; });
  ph.kappa_DW = make_matrix(sys.Q, r, k, [s](const auto& q) {
    const auto fd = frame_data(s, q);
    return decltype(fd.X)(fd.X.transpose() * fd.kappa * fd.Z);
  });
  ph.covector_basis = make_matrix(sys.Q, N, r, [s](const auto& q) {
    const auto fd = frame_data(s, q);
    return decltype(fd.X)(fd.kappa * fd.X);
  });

  const MatrixField basis = ph.covector_basis;
  ph.Theta_M = make_form(ph.M, 1, [basis, N, r, n](const auto& x) {
    using T = scalar_t<decltype(x)>;
    const Vec<T> q = x.head(N);
    Alt<T> a(n, 1);
    a.c.head(N) = basis(q) * Vec<T>(x.tail(r));
    return a;
  });

  const MatrixField coframe = ph.coframe;
  const MatrixField kdw = ph.kappa_DW;
  const ChartPtr Q = sys.Q;
  ph.Omega_M = make_form(ph.M, 2, [coframe, kdw, Q, N, r, k, n](const auto& x) {
    using T = scalar_t<decltype(x)>;
    const Vec<T> q = x.head(N);
    const Vec<T> p = x.tail(r);
    const Mat<T> cf = coframe(q);
    const Mat<T> jcf = jacobian(coframe.fn(), *Q, q);  // (N·N)×N, entry (a + N·b, u) = ∂_u cf(a,b)
    const Mat<T> kia = kdw(q);
    const Mat<T> jk = jacobian(kdw.fn(), *Q, q);  // (r·k)×N
    Mat<T> w = Mat<T>::Zero(n, n);
    auto d_coframe = [&](int a) {
      Mat<T> d(N, N);
      for (int u = 0; u < N; ++u)
        for (int v = 0; v < N; ++v) d(u, v) = jcf(a + N * v, u) - jcf(a + N * u, v);
      return d;
    };
    auto add_wedge = [&](const Vec<T>& alpha, const Vec<T>& beta) { w += alpha * beta.transpose() - beta * alpha.transpose(); };
    for (int i = 0; i < r; ++i) {
      Vec<T> xi = Vec<T>::Zero(n);
      xi.head(N) = cf.row(i).transpose();
      Vec<T> dp = Vec<T>::Zero(n);
      dp[N + i] = T(1);
      add_wedge(xi, dp);
      w.topLeftCorner(N, N) -= p[i] * d_coframe(i);
    }
    for (int a = 0; a < k; ++a) {
      Vec<T> za = Vec<T>::Zero(n);
      za.head(N) = cf.row(r + a).transpose();
      Vec<T> dc = Vec<T>::Zero(n);
      T c = T(0);
      for (int i = 0; i < r; ++i) {
        c += kia(i, a) * p[i];
        dc.head(N) += p[i] * jk.row(i + r * a).transpose();
        dc[N + i] = kia(i, a);
      }
      add_wedge(za, dc);
      w.topLeftCorner(N, N) -= c * d_coframe(r + a);
    }
    return from_matrix<T>(w);
  });

  const MatrixField fx = ph.frame_X, fz = ph.frame_Z;
  ph.C_frame = make_matrix(ph.M, n, 2 * r, [fx, N, r, n](const auto& x) {
    using T = scalar_t<decltype(x)>;
    Mat<T> c = Mat<T>::Zero(n, 2 * r);
    c.topLeftCorner(N, r) = fx(Vec<T>(x.head(N)));
    c.bottomRightCorner(r, r).setIdentity();
    return c;
  });
  ph.W_frame = make_matrix(ph.M, n, k, [fz, N, k, n](const auto& x) {
    using T = scalar_t<decltype(x)>;
    Mat<T> w = Mat<T>::Zero(n, k);
    w.topRows(N) = fz(Vec<T>(x.head(N)));
    return w;
  });
  const MatrixField cfr = ph.C_frame, wfr = ph.W_frame;
  ph.P_C = make_matrix(ph.M, n, n, [cfr, wfr, r, n](const auto& x) {
    using T = scalar_t<decltype(x)>;
    const Mat<T> c = cfr(x);
    Mat<T> f(n, n);
    f << c, wfr(x);
    const Mat<T> coeff = qr_solve<T>(f, Mat<T>::Identity(n, n), "C/W split");
    return Mat<T>(c * coeff.topRows(2 * r));
  });
  ph.C = columns(ph.C_frame);
  ph.W_cal = columns(ph.W_frame);

  const ScalarField u = sys.potential;
  ph.H_M = make_scalar(ph.M, [u, N, r](const auto& x) {
    using T = scalar_t<decltype(x)>;
    const Vec<T> p = x.tail(r);
    return T(0.5 * p.squaredNorm() - u(Vec<T>(x.head(N))));
  });
  ph.tau = make_map(ph.M, sys.Q, [N](const auto& x) {
    using T = scalar_t<decltype(x)>;
    return Vec<T>(x.head(N));
  });
  ph.iota = make_map(ph.M, ph.TQ, [basis, N, r](const auto& x) {
    using T = scalar_t<decltype(x)>;
    const Vec<T> q = x.head(N);
    Vec<T> out(2 * N);
    out << q, basis(q) * Vec<T>(x.tail(r));
    return out;
  });
  return ph;
}

BiVector bivector_from_section(const MatrixField& frame, const TwoForm& omega, const char* what) {
  const std::string label = what;
  return make_multivector(omega.chart(), 2, [frame, omega, label](const auto& x) {
    using T = scalar_t<decltype(x)>;
    const Mat<T> f = frame(x);
    const Mat<T> w = to_matrix(omega(x));
    const Mat<T> wf = f.transpose() * w * f;
    Mat<T> y;
    try {
      y = qr_solve<T>(wf, Mat<T>(f.transpose()), "restricted 2-form");
    } catch (const SingularError& e) {
      throw SingularError(label + ": " + e.what() + " at " + format_point(values_of(Vec<T>(x))), e.measure());
    }
    Mat<T> p = -(f * y);
    p = 0.5 * (p - Mat<T>(p.transpose()));
    return from_matrix<T>(p);
  });
}

BiVector nh_bivector(const ConstrainedPhase& phase) { return bivector_from_section(phase.C_frame, phase.Omega_M, "nh_bivector"); }

VectorField hamiltonian_vector_field(const BiVector& pi, const ScalarField& h) {
  return -sharp(pi, differential(h));
}

VectorField nh_vector_field(const ConstrainedPhase& phase) { return hamiltonian_vector_field(nh_bivector(phase), phase.H_M); }

PhaseReport check_phase(const ConstrainedPhase& phase, int samples, std::uint64_t seed) {
  PhaseReport rep;
  rep.min_abs_det_omega_c = std::numeric_limits<double>::infinity();
  SplitMix64 rng(stream_seed(seed, phase.sys.name + "/phase"));
  const int n = phase.dim();
  for (int s = 0; s < samples; ++s) {
    const Vec<double> x = phase.M->sample(rng);
    const Mat<double> c = phase.C_frame(x);
    const Mat<double> w = to_matrix(phase.Omega_M(x));
    rep.min_abs_det_omega_c = std::min(rep.min_abs_det_omega_c, std::abs(determinant<double>(Mat<double>(c.transpose() * w * c))));
    const Vec<double> q = x.head(phase.N);
    for (const auto& eps : phase.sys.constraint_forms) {
      const Vec<double> e = eps(q).c;
      rep.max_tau_c_outside_d = std::max(rep.max_tau_c_outside_d, (c.topRows(phase.N).transpose() * e).cwiseAbs().maxCoeff());
    }
    Mat<double> f(n, n);
    f << c, phase.W_frame(x);
    const Mat<double> pc = phase.P_C(x);
    // P_C fixes C and kills 𝒲.
    const Mat<double> res_c = pc * c - c;
    const Mat<double> res_w = pc * phase.W_frame(x);
    rep.max_split_residual = std::max({rep.max_split_residual, res_c.cwiseAbs().maxCoeff(),
                                       res_w.size() ? res_w.cwiseAbs().maxCoeff() : 0.0});
  }
  return rep;
}

}  // namespace nonholo
