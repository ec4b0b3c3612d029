#include "nonholo/gauge.hpp"

#include <limits>
#include <sstream>

#include <Eigen/SVD>

namespace nonholo {

namespace {

template <class T>
Mat<T> gauge_operator(const Mat<T>& p, const Mat<T>& b) {
  // On covector columns: π♯ = Pᵀ, B♭ = Bᵀ.
  const Eigen::Index n = p.rows();
  return Mat<T>(Mat<T>::Identity(n, n) + b.transpose() * p.transpose());
}

}  // namespace

BiVector gauge_transform(const BiVector& pi, const TwoForm& b) {
  if (pi.chart()->dim != b.chart()->dim) throw std::invalid_argument("gauge_transform: chart mismatch");
  return make_multivector(pi.chart(), 2, [pi, b](const auto& x) {
    using T = scalar_t<decltype(x)>;
    const Mat<T> p = to_matrix(pi(x));
    const Mat<T> m = gauge_operator<T>(p, to_matrix(b(x)));
    const LU<T> lu(Mat<T>(m.transpose()));
    const double det = value_of(lu.det);
    if (!(std::abs(det) >= kGaugeDetTol)) {
      std::ostringstream os;
      os << "gauge_transform: Id + B♭π♯ singular (det " << det << ") at (";
      const Vec<double> xv = values_of(Vec<T>(x));
      for (Eigen::Index i = 0; i < xv.size(); ++i) os << (i ? ", " : "") << xv[i];
      os << ")";
      throw SingularError(os.str(), det);
    }
    // π_B♯ = Pᵀ M^{-1}, so the matrix of π_B is M^{-ᵀ} P.
    Mat<T> pb = lu.solve(p);
    pb = 0.5 * (pb - Mat<T>(pb.transpose()));
    return from_matrix<T>(pb);
  });
}

TwoForm normalize_gauge(const TwoForm& b, const MatrixField& projector) {
  return make_form(b.chart(), 2, [b, projector](const auto& x) {
    using T = scalar_t<decltype(x)>;
    const Mat<T> pc = projector(x);
    return from_matrix<T>(Mat<T>(pc.transpose() * to_matrix(b(x)) * pc));
  });
}

GaugeReport check_dynamical_gauge(const TwoForm& b, const VectorField& x_h, int samples, std::uint64_t seed,
                                  const BiVector* pi) {
  GaugeReport rep;
  rep.min_det = std::numeric_limits<double>::infinity();
  const auto pts = sample_points(*b.chart(), samples, seed, "dynamical_gauge");
  const Extremum e = max_over(pts, [&](const Vec<double>& x) { return max_abs_entry(interior(x_h.vec(x), b(x)).c); });
  rep.dynamical_residual = e.value;
  rep.worst_point = e.point;
  if (pi) {
    for (const auto& x : pts) {
      const Mat<double> m = gauge_operator<double>(to_matrix((*pi)(x)), to_matrix(b(x)));
      const double det = std::abs(determinant<double>(m));
      Eigen::JacobiSVD<Mat<double>> svd(m);
      const auto& sv = svd.singularValues();
      rep.max_condition = std::max(rep.max_condition, sv[sv.size() - 1] > 0 ? sv[0] / sv[sv.size() - 1] : std::numeric_limits<double>::infinity());
      rep.min_det = std::min(rep.min_det, det);
      if (det < kGaugeDetTol) rep.failing_points.push_back(x);
    }
    rep.invertible_everywhere = rep.failing_points.empty();
  } else {
    rep.min_det = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

TwistedReport twisted_residual(const BiVector& pi, const ThreeForm& phi, int samples, std::uint64_t seed, bool check_closed) {
  TwistedReport rep;
  const auto pts = sample_points(*pi.chart(), samples, seed, "twisted");
  auto lhs = jacobiator(pi);
  auto rhs = sharp(pi, phi);
  const Extremum e = max_over(pts, [&](const Vec<double>& x) { return max_abs_entry(Vec<double>(lhs(x).c - rhs(x).c)); });
  rep.residual = e.value;
  rep.worst_point = e.point;
  if (check_closed && phi.degree() + 1 <= phi.dim()) {
    auto dphi = exterior_derivative(phi);
    rep.closedness = max_over(pts, [&](const Vec<double>& x) { return max_abs_entry(dphi(x).c); }).value;
    rep.closedness_checked = true;
  }
  return rep;
}

}  // namespace nonholo
