#pragma once

#include <string>
#include <vector>

#include "nonholo/field.hpp"

namespace nonholo::testing {

inline std::vector<Vec<double>> samples(const Chart& chart, int count, std::uint64_t seed = 42) {
  SplitMix64 rng(stream_seed(seed, chart.name));
  std::vector<Vec<double>> out;
  for (int i = 0; i < count; ++i) out.push_back(chart.sample(rng));
  return out;
}

inline double max_abs(const Vec<double>& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }
inline double max_abs(const Mat<double>& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// Largest |a-b| over components, relative to max(1, |b|).
inline double rel_diff(const Vec<double>& a, const Vec<double>& b) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(b[i])));
  return m;
}

inline Vec<double> vec(std::initializer_list<double> xs) {
  Vec<double> v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

inline Vec<double> unit(int n, int i) {
  Vec<double> v = Vec<double>::Zero(n);
  v[i] = 1.0;
  return v;
}

}  // namespace nonholo::testing
