#pragma once

// Dense solvers generic over the scalar tower. Pivoting decisions use the
// innermost value so that dual parts follow the same elimination path.

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SVD>

#include "nonholo/dual.hpp"

namespace nonholo {

inline constexpr double kSolvePivotTol = 1e-10;
inline constexpr double kGaugeDetTol = 1e-10;
inline constexpr double kRankRelTol = 1e-8;

class SingularError : public std::runtime_error {
 public:
  SingularError(const std::string& what, double measure)
      : std::runtime_error(what), measure_(measure) {}
  double measure() const { return measure_; }

 private:
  double measure_;
};

// Householder QR with column pivoting. Handles square, tall and
// rank-deficient consistent systems (basic solution).
template <class T>
class PivotedQR {
 public:
  explicit PivotedQR(const Mat<T>& a, double tol = kSolvePivotTol) : qr_(a), tol_(tol) {
    const Eigen::Index m = qr_.rows(), n = qr_.cols();
    perm_.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) perm_[j] = j;
    const Eigen::Index steps = std::min(m, n);
    vs_.reserve(steps);
    rank_ = 0;
    double first = 0.0;
    for (Eigen::Index k = 0; k < steps; ++k) {
      Eigen::Index best = k;
      double best_norm = -1.0;
      for (Eigen::Index j = k; j < n; ++j) {
        double s = 0.0;
        for (Eigen::Index i = k; i < m; ++i) {
          const double x = value_of(qr_(i, j));
          s += x * x;
        }
        if (s > best_norm) {
          best_norm = s;
          best = j;
        }
      }
      best_norm = std::sqrt(best_norm);
      if (k == 0) first = best_norm;
      if (best_norm <= tol_ * std::max(1.0, first) || best_norm == 0.0) break;
      if (best != k) {
        qr_.col(k).swap(qr_.col(best));
        std::swap(perm_[k], perm_[best]);
      }
      Vec<T> v = qr_.block(k, k, m - k, 1);
      T nrm2 = T(0);
      for (Eigen::Index i = 0; i < v.size(); ++i) nrm2 += v[i] * v[i];
      using std::sqrt;
      T alpha = sqrt(nrm2);
      if (value_of(v[0]) > 0) alpha = -alpha;
      v[0] -= alpha;
      T vv = T(0);
      for (Eigen::Index i = 0; i < v.size(); ++i) vv += v[i] * v[i];
      for (Eigen::Index j = k; j < n; ++j) {
        T dot = T(0);
        for (Eigen::Index i = 0; i < v.size(); ++i) dot += v[i] * qr_(k + i, j);
        const T f = 2.0 * dot / vv;
        for (Eigen::Index i = 0; i < v.size(); ++i) qr_(k + i, j) -= f * v[i];
      }
      vs_.push_back({v, vv});
      ++rank_;
    }
    min_pivot_ = rank_ == 0 ? 0.0 : std::abs(value_of(qr_(rank_ - 1, rank_ - 1)));
  }

  Eigen::Index rank() const { return rank_; }
  double min_pivot() const { return min_pivot_; }
  bool full_column_rank() const { return rank_ == qr_.cols(); }

  Mat<T> solve(const Mat<T>& b) const {
    const Eigen::Index m = qr_.rows(), n = qr_.cols();
    Mat<T> y = b;
    for (Eigen::Index k = 0; k < rank_; ++k) {
      const auto& [v, vv] = vs_[k];
      for (Eigen::Index c = 0; c < y.cols(); ++c) {
        T dot = T(0);
        for (Eigen::Index i = 0; i < v.size(); ++i) dot += v[i] * y(k + i, c);
        const T f = 2.0 * dot / vv;
        for (Eigen::Index i = 0; i < v.size(); ++i) y(k + i, c) -= f * v[i];
      }
    }
    (void)m;
    Mat<T> z = Mat<T>::Zero(n, b.cols());
    for (Eigen::Index c = 0; c < b.cols(); ++c) {
      for (Eigen::Index i = rank_ - 1; i >= 0; --i) {
        T s = y(i, c);
        for (Eigen::Index j = i + 1; j < rank_; ++j) s -= qr_(i, j) * z(j, c);
        z(i, c) = s / qr_(i, i);
      }
    }
    Mat<T> x = Mat<T>::Zero(n, b.cols());
    for (Eigen::Index j = 0; j < n; ++j) x.row(perm_[j]) = z.row(j);
    return x;
  }

 private:
  Mat<T> qr_;
  double tol_;
  std::vector<Eigen::Index> perm_;
  std::vector<std::pair<Vec<T>, T>> vs_;
  Eigen::Index rank_ = 0;
  double min_pivot_ = 0.0;
};

// Solves a x = b for square nonsingular a; throws SingularError otherwise.
template <class T>
Mat<T> qr_solve(const Mat<T>& a, const Mat<T>& b, const char* what = "linear solve") {
  PivotedQR<T> qr(a);
  if (!qr.full_column_rank() || qr.rank() < a.rows()) {
    std::ostringstream os;
    os << what << ": singular matrix (rank " << qr.rank() << " of " << a.cols() << ", smallest pivot "
       << qr.min_pivot() << ")";
    throw SingularError(os.str(), qr.min_pivot());
  }
  return qr.solve(b);
}

template <class T>
struct LU {
  Mat<T> lu;
  std::vector<Eigen::Index> perm;
  int sign = 1;
  T det;

  explicit LU(const Mat<T>& a) : lu(a), perm(a.rows()) {
    const Eigen::Index n = a.rows();
    for (Eigen::Index i = 0; i < n; ++i) perm[i] = i;
    det = T(1);
    for (Eigen::Index k = 0; k < n; ++k) {
      Eigen::Index p = k;
      double best = std::abs(value_of(lu(k, k)));
      for (Eigen::Index i = k + 1; i < n; ++i) {
        const double x = std::abs(value_of(lu(i, k)));
        if (x > best) {
          best = x;
          p = i;
        }
      }
      if (p != k) {
        lu.row(k).swap(lu.row(p));
        std::swap(perm[k], perm[p]);
        sign = -sign;
      }
      det *= lu(k, k);
      if (best == 0.0) continue;
      for (Eigen::Index i = k + 1; i < n; ++i) {
        lu(i, k) /= lu(k, k);
        for (Eigen::Index j = k + 1; j < n; ++j) lu(i, j) -= lu(i, k) * lu(k, j);
      }
    }
    if (sign < 0) det = -det;
  }

  Mat<T> solve(const Mat<T>& b) const {
    const Eigen::Index n = lu.rows();
    Mat<T> x(n, b.cols());
    for (Eigen::Index i = 0; i < n; ++i) x.row(i) = b.row(perm[i]);
    for (Eigen::Index c = 0; c < b.cols(); ++c) {
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < i; ++j) x(i, c) -= lu(i, j) * x(j, c);
      for (Eigen::Index i = n - 1; i >= 0; --i) {
        for (Eigen::Index j = i + 1; j < n; ++j) x(i, c) -= lu(i, j) * x(j, c);
        x(i, c) /= lu(i, i);
      }
    }
    return x;
  }
};

template <class T>
T determinant(const Mat<T>& a) {
  return LU<T>(a).det;
}

inline Eigen::Index numerical_rank(const Mat<double>& a, double rel_tol = kRankRelTol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Mat<double>> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > rel_tol * s[0]) ++r;
  return r;
}

// Distance of the columns of b from the column span of a, relative to |b|.
inline double span_residual(const Mat<double>& a, const Mat<double>& b) {
  if (b.cols() == 0) return 0.0;
  if (a.cols() == 0) return b.cwiseAbs().maxCoeff();
  PivotedQR<double> qr(a, 1e-12);
  const Mat<double> x = qr.solve(b);
  return (a * x - b).cwiseAbs().maxCoeff();
}

// Orthonormal basis (columns) of the kernel of a.
inline Mat<double> null_space(const Mat<double>& a, double rel_tol = kRankRelTol) {
  Eigen::JacobiSVD<Mat<double>> svd(a, Eigen::ComputeFullV);
  const Eigen::Index r = numerical_rank(a, rel_tol);
  const Mat<double>& v = svd.matrixV();
  return v.rightCols(v.cols() - r);
}

}  // namespace nonholo
