#pragma once

// Seeded sample sets and max-reductions over them.

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "nonholo/field.hpp"

namespace nonholo {

struct Extremum {
  double value = 0.0;
  Vec<double> point;
};

// "(x0, x1, …)" with six significant digits.
std::string format_point(const Vec<double>& x);

std::vector<Vec<double>> sample_points(const Chart& chart, int count, std::uint64_t seed, std::string_view tag);

// Largest f(x) over the points; the first maximizer wins ties.
template <class F>
Extremum max_over(const std::vector<Vec<double>>& points, F f) {
  Extremum e;
  for (const auto& x : points) {
    const double v = f(x);
    if (e.point.size() == 0 || v > e.value || std::isnan(v)) {
      e.value = v;
      e.point = x;
      if (std::isnan(v)) break;
    }
  }
  return e;
}

inline double max_abs_entry(const Vec<double>& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }
inline double max_abs_entry(const Mat<double>& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace nonholo
